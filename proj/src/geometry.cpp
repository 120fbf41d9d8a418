#include "axial/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace axial {

Background::Background(double M) : M_(M)
{
    if (!(M > 0.0) || !std::isfinite(M))
        throw std::invalid_argument("Background: M must be positive");
}

double Background::nu(double r) const { return 0.5 * std::log(A(r)); }
double Background::mu2(double r) const { return -0.5 * std::log(A(r)); }
double Background::mu3(double r) const { return std::log(r); }
double Background::psi(double r, double theta) const { return std::log(r * std::sin(theta)); }

double Background::rstar(double r) const
{
    if (!(r > 2.0 * M_))
        throw std::domain_error("tortoise_from_r: r must exceed 2M");
    return r + 2.0 * M_ * std::log(r - 2.0 * M_) - 3.0 * M_ - 2.0 * M_ * std::log(M_);
}

// In z = log(r - 2M) the tortoise map reads F(z) = e^z + 2M z - M - 2M log M - r*,
// which is increasing and convex, so Newton started right of the root is monotone.
RadialPoint Background::point(double x) const
{
    const double M = M_;
    const double c = M + 2.0 * M * std::log(M) + x;
    auto F = [&](double z) { return std::exp(z) + 2.0 * M * z - c; };

    double zlo = std::min(c / (2.0 * M), std::log(std::max(std::abs(x), M))) - 1.0;
    while (F(zlo) > 0.0) zlo -= std::max(1.0, std::abs(zlo));
    double zhi = std::log(std::max(c, M)) + 1.0;
    while (F(zhi) < 0.0) zhi += std::max(1.0, std::abs(zhi));

    double z = zhi;
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
        double fz = F(z);
        if (fz > 0.0) zhi = z; else zlo = z;
        double dz = fz / (std::exp(z) + 2.0 * M);
        double zn = z - dz;
        if (!(zn > zlo && zn < zhi)) zn = 0.5 * (zlo + zhi);
        done = std::abs(zn - z) <= 1e-15 * std::max(1.0, std::abs(z));
        z = zn;
    }
    if (!done) throw std::runtime_error("r_from_tortoise: inversion did not converge");
    RadialPoint p;
    p.y = std::exp(z);
    p.r = 2.0 * M + p.y;
    p.A = p.y / p.r;
    return p;
}

double Background::r_of(double x) const { return point(x).r; }

double tortoise_from_r(const Background& bg, double r) { return bg.rstar(r); }
double r_from_tortoise(const Background& bg, double x) { return bg.r_of(x); }

Coords coordinate_maps(const Background& bg, double t, double r)
{
    double rs = bg.rstar(r);
    Coords c;
    c.tstar = t + 2.0 * bg.M() * std::log(r - 2.0 * bg.M());
    c.u = 0.5 * (t - rs);
    c.v = 0.5 * (t + rs);
    return c;
}

double offset_constant(const Background& bg)
{
    return 3.0 * bg.M() + 2.0 * bg.M() * std::log(bg.M());
}

Slicing star_slicing(const Background& bg, double x_lo, double x_hi)
{
    const double M = bg.M();
    Slicing s;
    s.name = "sigma";
    s.x_lo = x_lo;
    s.x_hi = x_hi;
    s.h = [M](const RadialPoint& p) { return -2.0 * M * std::log(p.y); };
    s.h_prime = [M](const RadialPoint& p) { return -2.0 * M / p.r; };
    return s;
}

namespace {

double ramp(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double ramp_d(double x)
{
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

}  // namespace

double Foliation::h(const RadialPoint& p) const
{
    double hin = -2.0 * M * std::log(p.y) - c0;
    double hout = std::sqrt(p.r * p.r + 1.0) - c1;
    double s = ramp((p.r - r_in * M) / ((r_out - r_in) * M));
    return (1.0 - s) * hin + s * hout;
}

double Foliation::h_prime(const RadialPoint& p) const
{
    double w = (r_out - r_in) * M;
    double x = (p.r - r_in * M) / w;
    double s = ramp(x), ds = ramp_d(x) / w;
    double hin = -2.0 * M * std::log(p.y) - c0;
    double hout = std::sqrt(p.r * p.r + 1.0) - c1;
    double dout = p.r / std::sqrt(p.r * p.r + 1.0);
    // A * d/dr(-2M log y) is -2M/r exactly; skip the y/y cancellation
    return (1.0 - s) * (-2.0 * M / p.r) + p.A * (s * dout + ds * (hout - hin));
}

Slicing Foliation::slicing() const
{
    Slicing s;
    s.name = "tilde";
    s.x_lo = x_lo;
    s.x_hi = x_hi;
    Foliation self = *this;
    s.h = [self](const RadialPoint& p) { return self.h(p); };
    s.h_prime = [self](const RadialPoint& p) { return self.h_prime(p); };
    return s;
}

std::string Foliation::csv(const Background& bg, int n) const
{
    std::ostringstream os;
    os.precision(17);
    os << "r,r_star,h,h_prime\n";
    for (int i = 0; i < n; ++i) {
        double x = x_lo + (x_hi - x_lo) * i / (n - 1.0);
        RadialPoint p = bg.point(x);
        os << p.r << ',' << x << ',' << h(p) << ',' << h_prime(p) << '\n';
    }
    return os.str();
}

double min_uv_minus_tau(const Background& bg, const Slicing& s, double tau, int n)
{
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double x = s.x_lo + (s.x_hi - s.x_lo) * i / (n - 1.0);
        RadialPoint p = bg.point(x);
        double t = tau + s.h(p);
        double u = 0.5 * (t - x), v = 0.5 * (t + x);
        m = std::min(m, std::min(u - tau, v - tau));
    }
    return m;
}

Foliation build_foliation(const Background& bg, const FoliationParams& fp)
{
    if (!(fp.r_in > 2.0 && fp.r_out > fp.r_in))
        throw std::invalid_argument("build_foliation: need 2M < r_in < r_out");
    if (!(fp.x_hi > fp.x_lo) || fp.samples < 16)
        throw std::invalid_argument("build_foliation: bad window or resolution");

    Foliation f;
    f.M = bg.M();
    f.r_in = fp.r_in;
    f.r_out = fp.r_out;
    f.x_lo = fp.x_lo;
    f.x_hi = fp.x_hi;
    f.tau_max = fp.tau_max;

    // Blend region sampled in r*, plus the full window.
    const double M = bg.M();
    const double bx0 = bg.rstar(fp.r_in * M), bx1 = bg.rstar(fp.r_out * M);
    std::vector<RadialPoint> blend, window;
    for (int i = 0; i < fp.samples; ++i) {
        blend.push_back(bg.point(bx0 + (bx1 - bx0) * i / (fp.samples - 1.0)));
        window.push_back(bg.point(fp.x_lo + (fp.x_hi - fp.x_lo) * i / (fp.samples - 1.0)));
    }

    // Only c0 - c1 shapes the blend; pick it to minimise sup|h'| there.
    auto blend_sup = [&](double d) {
        Foliation g = f;
        g.c0 = d;
        g.c1 = 0.0;
        double m = 0.0;
        for (const auto& p : blend) m = std::max(m, std::abs(g.h_prime(p)));
        return m;
    };
    double best = 0.0, bestv = std::numeric_limits<double>::infinity();
    for (double d = -200.0 * M; d <= 200.0 * M; d += 0.5 * M) {
        double v = blend_sup(d);
        if (v < bestv) { bestv = v; best = d; }
    }
    double a = best - 0.5 * M, b = best + 0.5 * M;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = blend_sup(x1), f2 = blend_sup(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = blend_sup(x1); }
        else { a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = blend_sup(x2); }
    }
    double delta = 0.5 * (a + b);
    f.c0 = delta;
    f.c1 = 0.0;

    // Common shift so that h - |r*| >= tau_max on the window, i.e. u,v >= tau
    // for every tau in [0, tau_max].
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < fp.samples; ++i) {
        double x = fp.x_lo + (fp.x_hi - fp.x_lo) * i / (fp.samples - 1.0);
        m = std::min(m, f.h(window[i]) - std::abs(x));
    }
    double shift = fp.tau_max - m;
    f.c0 -= shift;
    f.c1 -= shift;

    double sup = 0.0;
    for (const auto& p : window) sup = std::max(sup, std::abs(f.h_prime(p)));
    for (const auto& p : blend) sup = std::max(sup, std::abs(f.h_prime(p)));
    f.blend_sup = blend_sup(delta);
    f.eps = 1.0 - sup;
    f.min_uv_margin = min_uv_minus_tau(bg, f.slicing(), fp.tau_max, fp.samples);
    if (!(f.eps > 0.0))
        throw std::runtime_error("build_foliation: blended slice is not spacelike (sup|h'| = " +
                                 std::to_string(sup) + ")");
    return f;
}

}  // namespace axial
