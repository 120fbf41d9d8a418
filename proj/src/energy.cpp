#include "axial/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "axial/redshift.hpp"

namespace axial {

FieldSamples samples_from_state(const Grid& g, const std::vector<double>& u, const std::vector<double>& v,
                                int fd_order)
{
    FieldSamples s;
    s.h = g.h;
    const int n = g.n;
    s.x.resize(n);
    s.r.resize(n);
    s.A.resize(n);
    s.f.resize(n);
    s.ft.resize(n);
    s.fx.resize(n);
    s.hprime.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& p = g.pts[i];
        s.x[i] = g.x(i);
        s.r[i] = p.r;
        s.A[i] = p.A;
        s.f[i] = u[i] / p.r;
        s.ft[i] = v[i] / p.r;
        s.fx[i] = fd1_at(u, i, g.h, fd_order) / p.r - p.A * u[i] / (p.r * p.r);
    }
    return s;
}

FieldSamples samples_from_slice(const Grid& g, const SliceData& sd)
{
    FieldSamples s;
    s.h = g.h;
    for (size_t j = 0; j < sd.size(); ++j) {
        const auto& p = g.pts[sd.node[j]];
        s.x.push_back(sd.x[j]);
        s.r.push_back(p.r);
        s.A.push_back(p.A);
        s.f.push_back(sd.u[j] / p.r);
        s.ft.push_back(sd.ut[j] / p.r);
        s.fx.push_back(sd.ux[j] / p.r - p.A * sd.u[j] / (p.r * p.r));
        s.hprime.push_back(sd.hprime[j]);
    }
    return s;
}

Stress mode_stress(double f, double ft, double fx, double A, double Q)
{
    double kin = 0.5 * (ft * ft + fx * fx), pot = 0.5 * A * Q * f * f;
    return {kin + pot, ft * fx, kin - pot};
}

ModePotential mode_potential(const ModeIndex& m)
{
    m.validate();
    return {m.field, m.Lambda()};
}

Multiplier multiplier_T(const FieldSamples& s)
{
    return {std::vector<double>(s.size(), 1.0), std::vector<double>(s.size(), 0.0)};
}

Multiplier multiplier_N(const Background& bg, const FieldSamples& s, const Redshift& N)
{
    Multiplier C;
    C.ct.resize(s.size());
    C.cx.resize(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double r = s.r[i], A = s.A[i], mu = 2.0 * bg.M() / r;
        double a = N.a(r), b = N.b(r);
        C.ct[i] = a - b * mu / A;
        C.cx[i] = b / A;
    }
    return C;
}

std::vector<double> flux_density(const Background& bg, const ModePotential& mp, const FieldSamples& s,
                                 const Multiplier& C)
{
    std::vector<double> d(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double r = s.r[i], hp = s.hprime[i];
        Stress T = mode_stress(s.f[i], s.ft[i], s.fx[i], s.A[i], mp.Q(bg, r));
        double Jt = T.tt * C.ct[i] + T.tx * C.cx[i];
        double Jx = T.tx * C.ct[i] + T.xx * C.cx[i];
        d[i] = r * r * (Jt + hp * Jx);
    }
    return d;
}

double flux_through_graph(const Background& bg, const ModePotential& mp, const FieldSamples& s,
                          const Multiplier& C)
{
    for (double hp : s.hprime)
        if (!(std::abs(hp) < 1.0)) throw std::domain_error("flux_through_graph: slice is not spacelike");
    return trapezoid(flux_density(bg, mp, s, C), s.h);
}

double t_energy(const Background& bg, const ModePotential& mp, const FieldSamples& s)
{
    return flux_through_graph(bg, mp, s, multiplier_T(s));
}

double x_f(double M, double r) { return std::pow(1.0 + M / r, 2) * (1.0 - 3.0 * M / r); }

double x_fprime(double M, double r)
{
    return (M / (r * r)) * (1.0 - 2.0 * M / r) * (1.0 + M / r) * (1.0 + 9.0 * M / r);
}

double x_weight(double M, double r) { return x_fprime(M, r) + 2.0 * x_f(M, r) * (1.0 - 2.0 * M / r) / r; }

double x_base_coefficient(const Background& bg, FieldKind k, double r)
{
    const double M = bg.M();
    const double c[6] = {-534, -244, 304, 118, -105, 16};
    double num = 0.0;
    for (int j = 0; j <= 5; ++j) num += c[j] * std::pow(M, 5 - j) * std::pow(r, j);
    double q = num / (4.0 * std::pow(r, 8));
    if (k == FieldKind::Alpha) return q;
    // swap the potential terms -(M f/r^2) P - f P'/2 from V to W
    double F = x_f(M, r), A = bg.A(r);
    double dP = field_potential(bg, FieldKind::Beta, r) - field_potential(bg, FieldKind::Alpha, r);
    double dPr = field_potential_dr(bg, FieldKind::Beta, r) - field_potential_dr(bg, FieldKind::Alpha, r);
    return q - (M * F / (r * r)) * dP - 0.5 * F * A * dPr;
}

MorawetzAccumulator::MorawetzAccumulator(const Background& bg, const Grid& g, const ModeIndex& m,
                                         std::vector<double> checkpoints)
    : bg_(bg), g_(g), m_(m), mp_(mode_potential(m)), checkpoints_(std::move(checkpoints))
{
    std::sort(checkpoints_.begin(), checkpoints_.end());
    const double M = bg.M(), Lam = m.Lambda();
    wgrad_.resize(g.n);
    wzero_.resize(g.n);
    wang_.resize(g.n);
    kgrad_.resize(g.n);
    kzero_.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        double r = g.pts[i].r, A = g.pts[i].A;
        // r^2 A times each density
        wgrad_[i] = A;
        wzero_[i] = A / r;
        wang_[i] = A * (r - 3.0 * M) * (r - 3.0 * M) * Lam / (r * r * r);
        kgrad_[i] = r * r * x_fprime(M, r);
        kzero_[i] = r * r * A *
                    (x_f(M, r) / r * (1.0 - 3.0 * M / r) * Lam / (r * r) + x_base_coefficient(bg, m.field, r));
    }
}

MorawetzAccumulator::Pieces MorawetzAccumulator::pieces(const std::vector<double>& u)
{
    Pieces p{0, 0, 0, 0};
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g_.n; ++i) {
        const auto& pt = g_.pts[i];
        double f = u[i] / pt.r;
        double fx = fd1_at(u, i, g_.h, 8) / pt.r - pt.A * u[i] / (pt.r * pt.r);
        double a = wgrad_[i] * fx * fx, b = wzero_[i] * f * f, c = wang_[i] * f * f;
        double w = (i == 0 || i == g_.n - 1) ? 0.5 : 1.0;
        p.grad += w * a;
        p.zero += w * b;
        p.ang += w * c;
        p.k += w * (kgrad_[i] * fx * fx + kzero_[i] * f * f);
        lo = std::min(lo, a + b + c);
    }
    p.grad *= g_.h;
    p.zero *= g_.h;
    p.ang *= g_.h;
    p.k *= g_.h;
    min_integrand_ = std::min(min_integrand_, lo);
    return p;
}

void MorawetzAccumulator::start(const std::vector<double>& u, double t0)
{
    min_integrand_ = std::numeric_limits<double>::infinity();
    last_ = pieces(u);
    acc_ = MorawetzWindow{};
    acc_.t_end = t0;
    windows_.clear();
    next_ = 0;
}

StepObserver MorawetzAccumulator::observer()
{
    return [this](const StepView& sv) {
        Pieces p = pieces(sv.u1);
        double dt = sv.t1 - sv.t0;
        acc_.lhs_grad += 0.5 * dt * (last_.grad + p.grad);
        acc_.lhs_zero += 0.5 * dt * (last_.zero + p.zero);
        acc_.lhs_ang += 0.5 * dt * (last_.ang + p.ang);
        acc_.k_int += 0.5 * dt * (last_.k + p.k);
        acc_.lhs = acc_.lhs_grad + acc_.lhs_zero + acc_.lhs_ang;
        acc_.t_end = sv.t1;
        last_ = p;
        while (next_ < checkpoints_.size() && sv.t1 >= checkpoints_[next_] - 1e-9 * dt) {
            windows_.push_back(acc_);
            ++next_;
        }
    };
}

ZEnergies z_energies(const Background& bg, const ModePotential& mp, const FieldSamples& s, double t)
{
    std::vector<double> dir(s.size()), wtd(s.size()), dec(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double x = s.x[i], r = s.r[i], A = s.A[i], mu = 1.0 - A;
        double f = s.f[i], ft = s.ft[i], fx = s.fx[i];
        double Q = mp.Q(bg, r);
        Stress T = mode_stress(f, ft, fx, A, Q);
        double Zt = 0.5 * (t * t + x * x), Zx = t * x;
        dir[i] = r * r * (T.tt * Zt + T.tx * Zx);
        wtd[i] = dir[i] + r * r * ((t * x * A / r) * f * ft - (x * A / (2.0 * r)) * f * f);

        double S = 2.0 * (t * ft + x * fx), Sb = 2.0 * (x * ft + t * fx);
        double uv2 = 0.5 * (t * t + x * x);
        double p1 = 0.5 * S + (x / r) * f, p2 = 0.5 * Sb + (t / r) * f;
        dec[i] = 0.5 * r * r * ((mu / 8.0) * (S * S + Sb * Sb) + uv2 * A * Q * f * f + 0.5 * A * (p1 * p1 + p2 * p2));
    }
    return {trapezoid(dir, s.h), trapezoid(wtd, s.h), trapezoid(dec, s.h)};
}

InitialEnergies initial_energies(const Background& bg, const ModeIndex& m, const FieldSamples& s,
                                 const Redshift& N)
{
    ModePotential mp = mode_potential(m);
    std::vector<double> d = flux_density(bg, mp, s, multiplier_N(bg, s, N));
    std::vector<double> dw(d.size());
    for (size_t i = 0; i < d.size(); ++i) dw[i] = (1.0 + s.x[i] * s.x[i]) * d[i];
    double e = trapezoid(d, s.h), ew = trapezoid(dw, s.h);

    // weighted integrand must have died off over the outer tenth of the window
    size_t k0 = d.size() - std::max<size_t>(1, d.size() / 10);
    double tail = 0.0;
    for (size_t i = k0; i < d.size(); ++i) tail += std::abs(dw[i]) * s.h;
    if (tail > 1e-8 * std::abs(ew) && tail > 0.0)
        throw std::domain_error("initial_energies: weighted energy density does not decay at the outer end of "
                                "the window (tail fraction " + std::to_string(tail / std::abs(ew)) + ")");

    const double L = m.Lambda();
    auto sum = [&](int K) {
        double acc = 0.0, p = 1.0;
        for (int k = 0; k <= K; ++k, p *= L) acc += p;
        return acc;
    };
    return {sum(2) * e, sum(3) * ew, sum(6) * ew};
}

double zcoef_factor(double M, double r)
{
    return (2.0 * r - 8.0 * M) * std::log((r - 2.0 * M) / M) - 7.0 * r + 12.0 * M;
}

double zcoef(double M, double t, double r)
{
    return 4.0 * M * t * (r - 2.0 * M) / std::pow(r, 5) * zcoef_factor(M, r);
}

ZcoefBracket zcoef_sign_scan(const Background& bg, double tol)
{
    const double M = bg.M();
    ZcoefBracket b;
    std::vector<double> roots;
    const int n = 20000;
    double prev_r = 2.0 * M + 1e-9 * M, prev = zcoef_factor(M, prev_r);
    b.positive_near_horizon = prev > 0.0;
    for (int i = 1; i <= n; ++i) {
        double r = 2.0 * M + M * std::pow(10.0, -9.0 + 13.0 * i / n);
        double v = zcoef_factor(M, r);
        if ((v > 0) != (prev > 0)) {
            double lo = prev_r, hi = r;
            bool lo_pos = prev > 0;
            while (hi - lo > tol * std::max(1.0, lo)) {
                double mid = 0.5 * (lo + hi);
                if ((zcoef_factor(M, mid) > 0) == lo_pos) lo = mid; else hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = v;
        prev_r = r;
    }
    b.positive_far = prev > 0.0;
    if (roots.size() != 2)
        throw std::runtime_error("zcoef_sign_scan: expected two sign changes, found " + std::to_string(roots.size()));
    b.r_inner = roots[0];
    b.r_outer = roots[1];
    return b;
}

}  // namespace axial
