#include "axial/harmonics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace axial {

double legendre(int l, double x)
{
    if (l == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= l; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

SphereGrid::SphereGrid(int n)
{
    if (n < 4) throw std::invalid_argument("SphereGrid: need at least 4 nodes");
    x_.resize(n);
    w_.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x_[i] = z;
        w_[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    // barycentric weights for Legendre points: (-1)^j sqrt((1-x_j^2) w_j)
    bary_.resize(n);
    for (int j = 0; j < n; ++j)
        bary_[j] = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - x_[j] * x_[j]) * w_[j]);
    D_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D_(i, j) = (bary_[j] / bary_[i]) / (x_[i] - x_[j]);
            diag -= D_(i, j);
        }
        D_(i, i) = diag;
    }
}

Samples SphereGrid::derivative(const Samples& f) const
{
    Eigen::Map<const Eigen::VectorXd> v(f.data(), size());
    Eigen::VectorXd d = D_ * v;
    return Samples(d.data(), d.data() + d.size());
}

double SphereGrid::interpolate(const Samples& f, double x) const
{
    double num = 0.0, den = 0.0;
    for (int j = 0; j < size(); ++j) {
        double dx = x - x_[j];
        if (dx == 0.0) return f[j];
        double c = bary_[j] / dx;
        num += c * f[j];
        den += c;
    }
    return num / den;
}

double bundle_inner(const SphereGrid& g, const Samples& f, const Samples& h, int s)
{
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        double term = g.weights()[i] * f[i] * h[i] * std::pow(1.0 - g.x()[i] * g.x()[i], -s);
        if (!std::isfinite(term))
            throw std::domain_error("bundle_inner: non-finite integrand near the poles");
        acc += term;
    }
    return 2.0 * std::numbers::pi * acc;
}

double bundle_norm(const SphereGrid& g, const Samples& f, int s)
{
    return std::sqrt(bundle_inner(g, f, f, s));
}

Samples eth_raise(const SphereGrid& g, int s, const Samples& f)
{
    Samples fx = g.derivative(f), out(f.size());
    for (int i = 0; i < g.size(); ++i) {
        double x = g.x()[i];
        out[i] = -((1.0 - x * x) * fx[i] + 2.0 * s * x * f[i]) / std::numbers::sqrt2;
    }
    return out;
}

Samples eth_lower(const SphereGrid& g, int s, const Samples& f)
{
    (void)s;
    Samples fx = g.derivative(f);
    for (double& v : fx) v = -v / std::numbers::sqrt2;
    return fx;
}

Samples angular_laplacian(const SphereGrid& g, int s, const Samples& f)
{
    Samples fx = g.derivative(f), fxx = g.derivative(fx), out(f.size());
    for (int i = 0; i < g.size(); ++i) {
        double x = g.x()[i];
        out[i] = (1.0 - x * x) * fxx[i] + (2.0 * s - 2.0) * x * fx[i] + s * f[i];
    }
    return out;
}

double dirichlet_integral(const SphereGrid& g, int s, const Samples& f)
{
    Samples fx = g.derivative(f);
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        double x = g.x()[i], c = 1.0 - x * x;
        double dens = c * fx[i] * fx[i] + 2.0 * s * x * f[i] * fx[i] + 2.0 * s * s * x * x * f[i] * f[i] / c;
        acc += g.weights()[i] * dens * std::pow(c, -s);
    }
    return 2.0 * std::numbers::pi * acc;
}

double pole_exponent(const SphereGrid& g, const Samples& f)
{
    const int n = g.size();
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    auto est = [&](int a, int b) {
        double fa = std::abs(f[a]), fb = std::abs(f[b]);
        if (fa < 1e-13 * scale && fb < 1e-13 * scale) return std::numeric_limits<double>::infinity();
        double sa = std::sqrt(1.0 - g.x()[a] * g.x()[a]), sb = std::sqrt(1.0 - g.x()[b] * g.x()[b]);
        return std::log(fb / fa) / std::log(sb / sa);
    };
    return std::min(est(0, 1), est(n - 1, n - 2));
}

void require_pole_regular(const SphereGrid& g, int s, const Samples& f)
{
    if (s <= 0) return;
    double p = pole_exponent(g, f);
    if (p < 2.0 * s - 0.5)
        throw std::domain_error("section of spin " + std::to_string(s) +
                                " is not regular at the poles (exponent " + std::to_string(p) + ")");
}

HarmonicTable eval_harmonic(const SphereGrid& g, int s, int l)
{
    if (s < 0 || l < s)
        throw std::invalid_argument("eval_harmonic: need l >= s >= 0 (got s=" + std::to_string(s) +
                                    ", l=" + std::to_string(l) + ")");
    HarmonicTable t;
    t.s = s;
    t.l = l;
    t.values.resize(g.size());
    for (int i = 0; i < g.size(); ++i) t.values[i] = legendre(l, g.x()[i]);
    double n0 = bundle_norm(g, t.values, 0);
    for (double& v : t.values) v /= n0;
    for (int k = 0; k < s; ++k) {
        t.values = eth_raise(g, k, t.values);
        double nk = bundle_norm(g, t.values, k + 1);
        for (double& v : t.values) v /= nk;
    }
    t.norm = bundle_norm(g, t.values, s);
    return t;
}

double raise_constant(int s, int l)
{
    if (l < s + 1) return 0.0;
    return std::sqrt((l - s) * (l + s + 1.0) / 2.0);
}

double lower_constant(int s, int l)
{
    return -raise_constant(s - 1, l);
}

double harmonic_sup(const SphereGrid& g, const HarmonicTable& y)
{
    double m = 0.0;
    const int n = 4001;
    for (int i = 1; i < n - 1; ++i) {
        double th = std::numbers::pi * i / (n - 1.0);
        double v = std::abs(g.interpolate(y.values, std::cos(th))) / std::pow(std::sin(th), y.s);
        m = std::max(m, v);
    }
    return m;
}

std::vector<double> project_modes(const SphereGrid& g, int s, const Samples& f, int lmax)
{
    require_pole_regular(g, s, f);
    std::vector<double> c(lmax + 1, 0.0);
    for (int l = s; l <= lmax; ++l) c[l] = bundle_inner(g, f, eval_harmonic(g, s, l).values, s);
    return c;
}

Samples reconstruct(const SphereGrid& g, int s, const std::vector<double>& coeffs)
{
    Samples out(g.size(), 0.0);
    for (int l = s; l < static_cast<int>(coeffs.size()); ++l) {
        if (coeffs[l] == 0.0) continue;
        auto y = eval_harmonic(g, s, l);
        for (int i = 0; i < g.size(); ++i) out[i] += coeffs[l] * y.values[i];
    }
    return out;
}

}  // namespace axial
