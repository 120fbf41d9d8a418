#pragma once

#include <functional>
#include <string>
#include <vector>

namespace axial {

// A radius together with r - 2M kept separately, so that A = (r-2M)/r stays
// accurate deep in the near-horizon region where r rounds to 2M.
struct RadialPoint {
    double r;
    double y;
    double A;
};

class Background {
public:
    explicit Background(double M = 1.0);

    double M() const { return M_; }

    double mu(double r) const { return 2.0 * M_ / r; }
    double Delta(double r) const { return r * r - 2.0 * M_ * r; }
    double A(double r) const { return 1.0 - 2.0 * M_ / r; }
    double nu(double r) const;
    double mu2(double r) const;
    double mu3(double r) const;
    double psi(double r, double theta) const;

    double rstar(double r) const;
    double r_of(double rstar) const;
    RadialPoint point(double rstar) const;

private:
    double M_;
};

struct Coords {
    double tstar, u, v;
};

double tortoise_from_r(const Background& bg, double r);
double r_from_tortoise(const Background& bg, double rstar);
Coords coordinate_maps(const Background& bg, double t, double r);

// t* - t minus (r* - r): the constant separating the two log conventions
double offset_constant(const Background& bg);

// A slicing written as a graph t = tau + h(r*) over a window of r*.
struct Slicing {
    std::string name;
    double x_lo = 0.0, x_hi = 0.0;
    std::function<double(const RadialPoint&)> h;
    std::function<double(const RadialPoint&)> h_prime;  // dh/dr*
};

// Sigma_tau = {t* = tau}
Slicing star_slicing(const Background& bg, double x_lo, double x_hi);

struct FoliationParams {
    double r_in = 3.0;    // in units of M
    double r_out = 20.0;  // in units of M
    double x_lo = -10.0;  // slice window in r*, units of M
    double x_hi = 60.0;
    double tau_max = 200.0;
    int samples = 8001;
};

class Foliation {
public:
    double M = 1.0;
    double c0 = 0.0, c1 = 0.0;
    double r_in = 3.0, r_out = 20.0;
    double x_lo = -10.0, x_hi = 60.0;
    double tau_max = 0.0;
    double eps = 0.0;          // 1 - sup|h'|
    double blend_sup = 0.0;    // sup|h'| inside the blend region
    double min_uv_margin = 0.0;

    double h(const RadialPoint& p) const;
    double h_prime(const RadialPoint& p) const;
    Slicing slicing() const;
    std::string csv(const Background& bg, int n) const;
};

// Throws std::runtime_error if the blended slices are not spacelike.
Foliation build_foliation(const Background& bg, const FoliationParams& params);

// min over the window of (u - tau, v - tau) on the slice t = tau + h
double min_uv_minus_tau(const Background& bg, const Slicing& s, double tau, int n);

}  // namespace axial
