#include "axial/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace axial {

namespace {

// one-sided halves of the centered stencils, index k is the weight of u[i+k] (k >= 1)
const double kD1[4][4] = {
    {1.0 / 2, 0, 0, 0},
    {2.0 / 3, -1.0 / 12, 0, 0},
    {3.0 / 4, -3.0 / 20, 1.0 / 60, 0},
    {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280},
};
const double kD2c[4] = {-2.0, -5.0 / 2, -49.0 / 18, -205.0 / 72};
const double kD2[4][4] = {
    {1.0, 0, 0, 0},
    {4.0 / 3, -1.0 / 12, 0, 0},
    {3.0 / 2, -3.0 / 20, 1.0 / 90, 0},
    {8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560},
};

int usable_half_width(int i, int n, int order)
{
    return std::min({order / 2, i, n - 1 - i});
}

}  // namespace

int Grid::index(double xv) const
{
    int i = static_cast<int>(std::lround((xv - x0) / h));
    return std::clamp(i, 0, n - 1);
}

Grid make_grid(const Background& bg, double x_lo, double x_hi, double h)
{
    if (!(h > 0.0) || !(x_hi > x_lo))
        throw std::invalid_argument("make_grid: need h > 0 and x_hi > x_lo");
    Grid g;
    g.x0 = x_lo;
    g.h = h;
    g.n = static_cast<int>(std::floor((x_hi - x_lo) / h + 1e-9)) + 1;
    if (g.n < 16) throw std::invalid_argument("make_grid: fewer than 16 nodes");
    g.pts.resize(g.n);
    for (int i = 0; i < g.n; ++i) g.pts[i] = bg.point(g.x(i));
    return g;
}

double fd1_at(const std::vector<double>& u, int i, double h, int order)
{
    const int n = static_cast<int>(u.size());
    int k = usable_half_width(i, n, order);
    if (k == 0) return 0.0;
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += kD1[k - 1][j - 1] * (u[i + j] - u[i - j]);
    return acc / h;
}

double fd2_at(const std::vector<double>& u, int i, double h, int order)
{
    const int n = static_cast<int>(u.size());
    int k = usable_half_width(i, n, order);
    if (k == 0) return 0.0;
    double acc = kD2c[k - 1] * u[i];
    for (int j = 1; j <= k; ++j) acc += kD2[k - 1][j - 1] * (u[i + j] + u[i - j]);
    return acc / (h * h);
}

void fd1(const std::vector<double>& u, double h, int order, std::vector<double>& out)
{
    out.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) out[i] = fd1_at(u, static_cast<int>(i), h, order);
}

void fd2(const std::vector<double>& u, double h, int order, std::vector<double>& out)
{
    out.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) out[i] = fd2_at(u, static_cast<int>(i), h, order);
}

double trapezoid(const std::vector<double>& f, double h)
{
    if (f.size() < 2) return 0.0;
    double acc = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
    return acc * h;
}

double l2_norm(const std::vector<double>& f, double h)
{
    double acc = 0.0;
    for (double v : f) acc += v * v;
    return std::sqrt(acc * h);
}

}  // namespace axial
