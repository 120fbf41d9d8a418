#include "axial/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace axial {

void ModeIndex::validate() const
{
    int s = spin();
    int lmin = field == FieldKind::Alpha ? 2 : 1;
    if (l < lmin)
        throw std::invalid_argument(tag() + " modes need l >= " + std::to_string(lmin) + " (spin " +
                                    std::to_string(s) + "), got l = " + std::to_string(l));
}

double field_potential(const Background& bg, FieldKind k, double r)
{
    if (k == FieldKind::Alpha) return 4.0 * bg.A(r) / (r * r);
    return (1.0 - 8.0 * bg.M() / r) / (r * r);
}

double field_potential_dr(const Background& bg, FieldKind k, double r)
{
    const double M = bg.M();
    if (k == FieldKind::Alpha) return 8.0 * M / std::pow(r, 4) - 8.0 * bg.A(r) / std::pow(r, 3);
    return 24.0 * M / std::pow(r, 4) - 2.0 / std::pow(r, 3);
}

double reduced_potential_at(const Background& bg, int l, const RadialPoint& p)
{
    double r = p.r;
    return p.A * (l * (l + 1.0) / (r * r) - 6.0 * bg.M() / (r * r * r));
}

std::vector<double> reduced_potential(const Background& bg, const ModeIndex& m, const Grid& g)
{
    m.validate();
    std::vector<double> V(g.n);
    for (int i = 0; i < g.n; ++i) V[i] = reduced_potential_at(bg, m.l, g.pts[i]);
    return V;
}

namespace {

double smooth_off(double s)
{
    // 1 for s <= 0, 0 for s >= 1, C-infinity in between
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    double a = std::exp(-1.0 / (1.0 - s)), b = std::exp(-1.0 / s);
    return a / (a + b);
}

double smooth_off_d(double s)
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    double a = std::exp(-1.0 / (1.0 - s)), b = std::exp(-1.0 / s);
    double da = -a / ((1.0 - s) * (1.0 - s)), db = b / (s * s);
    return (da * b - a * db) / ((a + b) * (a + b));
}

}  // namespace

double bump_support_radius(const BumpParams& b) { return 8.0 * b.width; }

double bump_profile(const BumpParams& b, double x)
{
    double z = (x - b.center) / b.width;
    double cut = smooth_off((std::abs(z) - 6.0) / 2.0);
    if (cut == 0.0) return 0.0;
    return b.amplitude * std::exp(-0.5 * z * z) * cut;
}

double bump_profile_dx(const BumpParams& b, double x)
{
    double z = (x - b.center) / b.width;
    double s = (std::abs(z) - 6.0) / 2.0;
    double cut = smooth_off(s);
    if (cut == 0.0) return 0.0;
    double g = b.amplitude * std::exp(-0.5 * z * z);
    double dz = 1.0 / b.width;
    double sgn = z >= 0 ? 1.0 : -1.0;
    return (-z * g * cut + g * smooth_off_d(s) * 0.5 * sgn) * dz;
}

InitialData gaussian_initial_data(const Grid& g, const BumpParams& b)
{
    if (!(b.width > 0.0)) throw std::invalid_argument("bump width must be positive");
    InitialData d;
    d.u.resize(g.n);
    d.v.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        double x = g.x(i);
        d.u[i] = bump_profile(b, x);
        // u(t, x) = F(x - c t) at t = 0
        d.v[i] = -b.velocity * bump_profile_dx(b, x);
    }
    d.support_lo = b.center - bump_support_radius(b);
    d.support_hi = b.center + bump_support_radius(b);
    if (b.amplitude == 0.0) d.support_lo = d.support_hi = b.center;
    if (d.support_lo <= g.x(4) || d.support_hi >= g.x(g.n - 5))
        throw std::invalid_argument("bump support reaches the grid ends");
    return d;
}

InitialData static_beta1_data(const Grid& g, double C1)
{
    InitialData d;
    d.u.resize(g.n);
    d.v.assign(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) d.u[i] = C1 / g.pts[i].r;
    d.stationary = true;
    d.support_lo = g.x(0);
    d.support_hi = g.x_max();
    return d;
}

InitialData zero_initial_data(const Grid& g)
{
    InitialData d;
    d.u.assign(g.n, 0.0);
    d.v.assign(g.n, 0.0);
    d.support_lo = d.support_hi = 0.5 * (g.x(0) + g.x_max());
    return d;
}

void check_causal_fit(const Grid& g, const InitialData& d, double T, double margin)
{
    if (d.stationary) return;
    double lo = d.support_lo - T - margin, hi = d.support_hi + T + margin;
    if (lo < g.x(0) || hi > g.x_max())
        throw BoundaryContact("grid [" + std::to_string(g.x(0)) + ", " + std::to_string(g.x_max()) +
                              "] does not contain support +- (T + margin) = [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
}

double default_dt(double h, double cfl) { return cfl * h; }

void check_cfl(double h, double dt, double cfl_max)
{
    if (!(dt > 0.0) || dt > cfl_max * h * (1.0 + 1e-12))
        throw std::invalid_argument("time step violates CFL: dt/h = " + std::to_string(dt / h) +
                                    " exceeds " + std::to_string(cfl_max));
}

Evolver::Evolver(const Grid& g, std::vector<double> Veff, const EvolverOptions& opt)
    : g_(g), V_(std::move(Veff)), opt_(opt)
{
    if (opt.scheme != 2 && opt.scheme != 4) throw std::invalid_argument("scheme must be 2 or 4");
    if (static_cast<int>(V_.size()) != g.n) throw std::invalid_argument("potential size mismatch");
    check_cfl(g.h, opt.dt);
    u_.assign(g.n, 0.0);
    v_.assign(g.n, 0.0);
    a_.assign(g.n, 0.0);
    u0_ = u_;
}

void Evolver::accel(const std::vector<double>& u, std::vector<double>& out) const
{
    const int n = g_.n, k = half_width();
    const double ih2 = 1.0 / (g_.h * g_.h);
    out.resize(n);
    for (int i = 0; i < k; ++i) out[i] = out[n - 1 - i] = 0.0;
    if (opt_.scheme == 2) {
        for (int i = 1; i < n - 1; ++i) out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2 - V_[i] * u[i];
    } else {
        const double c0 = -5.0 / 2, c1 = 4.0 / 3, c2 = -1.0 / 12;
        for (int i = 2; i < n - 2; ++i)
            out[i] = (c0 * u[i] + c1 * (u[i + 1] + u[i - 1]) + c2 * (u[i + 2] + u[i - 2])) * ih2 - V_[i] * u[i];
    }
}

void Evolver::set_state(const std::vector<double>& u, const std::vector<double>& v)
{
    if (static_cast<int>(u.size()) != g_.n || static_cast<int>(v.size()) != g_.n)
        throw std::invalid_argument("set_state: size mismatch");
    u_ = u;
    v_ = v;
    const int k = half_width();
    for (int i = 0; i < k; ++i) v_[i] = v_[g_.n - 1 - i] = 0.0;
    u0_ = u_;
    accel(u_, a_);
    t_ = 0.0;
    steps_ = 0;
    scale_ = 0.0;
    for (int i = 0; i < g_.n; ++i) scale_ = std::max({scale_, std::abs(u_[i]), std::abs(v_[i])});
}

void Evolver::step()
{
    const double dt = opt_.dt;
    const int n = g_.n;
    if (opt_.scheme == 2) {
        for (int i = 0; i < n; ++i) {
            v_[i] += 0.5 * dt * a_[i];
            u_[i] += dt * v_[i];
        }
        accel(u_, a_);
        for (int i = 0; i < n; ++i) v_[i] += 0.5 * dt * a_[i];
    } else {
        auto rhs = [&](const std::vector<double>& u, const std::vector<double>& v, std::vector<double>& du,
                       std::vector<double>& dv) {
            du = v;
            accel(u, dv);
        };
        tu_.resize(n);
        tv_.resize(n);
        rhs(u_, v_, k1u_, k1v_);
        for (int i = 0; i < n; ++i) { tu_[i] = u_[i] + 0.5 * dt * k1u_[i]; tv_[i] = v_[i] + 0.5 * dt * k1v_[i]; }
        rhs(tu_, tv_, k2u_, k2v_);
        for (int i = 0; i < n; ++i) { tu_[i] = u_[i] + 0.5 * dt * k2u_[i]; tv_[i] = v_[i] + 0.5 * dt * k2v_[i]; }
        rhs(tu_, tv_, k3u_, k3v_);
        for (int i = 0; i < n; ++i) { tu_[i] = u_[i] + dt * k3u_[i]; tv_[i] = v_[i] + dt * k3v_[i]; }
        rhs(tu_, tv_, k4u_, k4v_);
        for (int i = 0; i < n; ++i) {
            u_[i] += dt / 6.0 * (k1u_[i] + 2.0 * k2u_[i] + 2.0 * k3u_[i] + k4u_[i]);
            v_[i] += dt / 6.0 * (k1v_[i] + 2.0 * k2v_[i] + 2.0 * k3v_[i] + k4v_[i]);
        }
        accel(u_, a_);
    }
    ++steps_;
    t_ = steps_ * dt;
}

double Evolver::boundary_deviation() const
{
    double m = 0.0;
    const int w = std::min(opt_.guard_width, g_.n / 4);
    for (int i = 0; i < w; ++i) {
        m = std::max(m, std::abs(u_[i] - u0_[i]));
        m = std::max(m, std::abs(u_[g_.n - 1 - i] - u0_[g_.n - 1 - i]));
    }
    return m;
}

void Evolver::check_boundary() const
{
    if (!opt_.detect_boundary) return;
    double dev = boundary_deviation();
    if (dev > opt_.contact_tol * scale_)
        throw BoundaryContact("signal reached the grid boundary at t = " + std::to_string(t_) +
                              " (deviation " + std::to_string(dev) + ")");
}

void run_to(Evolver& ev, double T, const std::vector<StepObserver>& observers, int every)
{
    const long nsteps = static_cast<long>(std::ceil(T / ev.dt() - 1e-9));
    std::vector<double> u0, v0, a0;
    for (long k = ev.steps(); k < nsteps; ++k) {
        if (!observers.empty()) {
            u0 = ev.u();
            v0 = ev.v();
            a0 = ev.a();
        }
        double t0 = ev.time();
        ev.step();
        if (every > 0 && (ev.steps() % every == 0 || k + 1 == nsteps)) ev.check_boundary();
        if (!observers.empty()) {
            StepView sv{t0, ev.time(), u0, v0, a0, ev.u(), ev.v(), ev.a()};
            for (const auto& ob : observers) ob(sv);
        }
    }
}

}  // namespace axial
