#pragma once

#include <vector>

#include "axial/geometry.hpp"

namespace axial {

// Uniform grid in r*, with the radial data precomputed at every node.
struct Grid {
    double x0 = 0.0;
    double h = 0.1;
    int n = 0;
    std::vector<RadialPoint> pts;

    double x(int i) const { return x0 + h * i; }
    double x_max() const { return x(n - 1); }
    // nearest node index, clamped
    int index(double xv) const;
};

Grid make_grid(const Background& bg, double x_lo, double x_hi, double h);

// Centered finite differences of even order (2, 4, 6 or 8), dropping order near the ends.
// The two outermost nodes get zero.
double fd1_at(const std::vector<double>& u, int i, double h, int order);
double fd2_at(const std::vector<double>& u, int i, double h, int order);
void fd1(const std::vector<double>& u, double h, int order, std::vector<double>& out);
void fd2(const std::vector<double>& u, double h, int order, std::vector<double>& out);

double trapezoid(const std::vector<double>& f, double h);
double l2_norm(const std::vector<double>& f, double h);

}  // namespace axial
