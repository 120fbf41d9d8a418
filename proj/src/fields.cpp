#include "axial/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>

namespace axial {

namespace {

double sin_pow(double x, int p) { return std::pow(std::sqrt(std::max(0.0, 1.0 - x * x)), p); }

void check_shape(const std::vector<Samples>& q, size_t nr, int nt, const char* what)
{
    if (q.size() != nr) throw std::invalid_argument(std::string(what) + ": radial size mismatch");
    for (const auto& row : q)
        if (static_cast<int>(row.size()) != nt) throw std::invalid_argument(std::string(what) + ": angular size mismatch");
}

double interior_l2(const std::vector<double>& f, double h, int k)
{
    double s = 0.0;
    for (size_t i = k; i + k < f.size(); ++i) s += f[i] * f[i];
    return std::sqrt(s * h);
}

}  // namespace

AxialFields fields_from_Q(const Background& bg, const SphereGrid& sg, const ConnectionComponents& q)
{
    const int nt = sg.size();
    check_shape(q.Q02, q.r.size(), nt, "Q02");
    check_shape(q.Q03, q.r.size(), nt, "Q03");
    check_shape(q.Q23, q.r.size(), nt, "Q23");
    AxialFields f;
    f.r = q.r;
    for (size_t i = 0; i < q.r.size(); ++i) {
        const double r = q.r[i], D = bg.Delta(r);
        Samples a(nt), b(nt), c(nt);
        for (int j = 0; j < nt; ++j) {
            const double x = sg.x()[j];
            a[j] = D / (r * r) * sin_pow(x, 3) * q.Q23[i][j];
            b[j] = r * r * sin_pow(x, 2) * q.Q02[i][j];
            c[j] = sin_pow(x, 3) * q.Q03[i][j];
        }
        require_pole_regular(sg, 2, a);
        require_pole_regular(sg, 1, b);
        require_pole_regular(sg, 2, c);
        f.alpha.push_back(std::move(a));
        f.beta.push_back(std::move(b));
        f.gamma.push_back(std::move(c));
    }
    return f;
}

ConnectionComponents Q_from_fields(const Background& bg, const SphereGrid& sg, const AxialFields& f)
{
    const int nt = sg.size();
    check_shape(f.alpha, f.r.size(), nt, "alpha");
    check_shape(f.beta, f.r.size(), nt, "beta");
    check_shape(f.gamma, f.r.size(), nt, "gamma");
    ConnectionComponents q;
    q.r = f.r;
    for (size_t i = 0; i < f.r.size(); ++i) {
        const double r = f.r[i], D = bg.Delta(r);
        Samples a(nt), b(nt), c(nt);
        for (int j = 0; j < nt; ++j) {
            const double x = sg.x()[j];
            a[j] = f.alpha[i][j] * r * r / (D * sin_pow(x, 3));
            b[j] = f.beta[i][j] / (r * r * sin_pow(x, 2));
            c[j] = f.gamma[i][j] / sin_pow(x, 3);
        }
        q.Q23.push_back(std::move(a));
        q.Q02.push_back(std::move(b));
        q.Q03.push_back(std::move(c));
    }
    return q;
}

ConnectionComponents kerr_connection(const Background& bg, const SphereGrid& sg, const std::vector<double>& r,
                                     double a1)
{
    ConnectionComponents q;
    q.r = r;
    const int nt = sg.size();
    for (double ri : r) {
        q.Q02.push_back(Samples(nt, -6.0 * bg.M() * a1 / std::pow(ri, 4)));
        q.Q03.push_back(Samples(nt, 0.0));
        q.Q23.push_back(Samples(nt, 0.0));
    }
    return q;
}

double coupling_constant(int l) { return std::sqrt(2.0) * raise_constant(1, l); }

double ConstraintResiduals::max() const { return std::max({Rtphi, Rrphi, Rthetaphi, closed}); }

ConstraintResiduals constraint_residuals(const Grid& g, int l, const std::vector<double>& ua,
                                         const std::vector<double>& va, const std::vector<double>& ub,
                                         const std::vector<double>& vb, const std::vector<double>& gamma,
                                         const std::vector<double>& gamma_t)
{
    const double lam = l >= 2 ? coupling_constant(l) : 0.0;
    const int n = g.n;
    std::vector<double> r1(n), r2(n), r3(n), r4(n);
    for (int i = 0; i < n; ++i) {
        const double r = g.pts[i].r, A = g.pts[i].A;
        const double uax = fd1_at(ua, i, g.h, 8), ubx = fd1_at(ub, i, g.h, 8), gx = fd1_at(gamma, i, g.h, 8);
        r1[i] = (A * ub[i] + r * ubx) / (r * r) - lam * gamma[i];
        r2[i] = (vb[i] - lam * ua[i]) / r;
        r3[i] = (A * ua[i] + r * uax) / (r * r) - gamma_t[i];
        r4[i] = lam * A * ub[i] / (r * r * r) - gx + va[i] / r;
    }
    const int k = 4;
    return {interior_l2(r1, g.h, k), interior_l2(r2, g.h, k), interior_l2(r3, g.h, k), interior_l2(r4, g.h, k)};
}

ConsistentData consistent_initial_data(const Background& bg, const Grid& g, int l, const BumpParams& alpha,
                                       const BumpParams& beta)
{
    (void)bg;
    if (l < 2) throw std::invalid_argument("alpha and gamma carry no l < 2 content; coupled data needs l >= 2");
    ConsistentData d;
    d.l = l;
    d.alpha = gaussian_initial_data(g, alpha);
    d.beta = gaussian_initial_data(g, beta);
    const double lam = coupling_constant(l);
    const int n = g.n;

    std::vector<double> rub(n);
    for (int i = 0; i < n; ++i) rub[i] = g.pts[i].r * d.beta.u[i];
    d.gamma.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = g.pts[i].r;
        d.gamma[i] = fd1_at(rub, i, g.h, 8) / (r * r * lam);
    }
    for (int i = 0; i < n; ++i) {
        const double r = g.pts[i].r, A = g.pts[i].A;
        d.beta.v[i] = lam * d.alpha.u[i];
        d.alpha.v[i] = r * fd1_at(d.gamma, i, g.h, 8) - A * lam * d.beta.u[i] / (r * r);
    }

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto* p : {&alpha, &beta}) {
        if (p->amplitude == 0.0) continue;
        double a = p->center - bump_support_radius(*p), b = p->center + bump_support_radius(*p);
        lo = any ? std::min(lo, a) : a;
        hi = any ? std::max(hi, b) : b;
        any = true;
    }
    if (!any) lo = hi = alpha.center;
    d.alpha.support_lo = d.beta.support_lo = lo;
    d.alpha.support_hi = d.beta.support_hi = hi;
    return d;
}

GammaIntegrator::GammaIntegrator(const Grid& g, std::vector<double> gamma0) : g_(g), gamma_(std::move(gamma0))
{
    if (static_cast<int>(gamma_.size()) != g.n) throw std::invalid_argument("GammaIntegrator: size mismatch");
}

std::vector<double> GammaIntegrator::rate(const std::vector<double>& ua, const std::vector<double>&) const
{
    std::vector<double> G(g_.n);
    for (int i = 0; i < g_.n; ++i) {
        const double r = g_.pts[i].r, A = g_.pts[i].A;
        G[i] = fd1_at(ua, i, g_.h, 8) / r + A * ua[i] / (r * r);
    }
    return G;
}

StepObserver GammaIntegrator::observer()
{
    return [this](const StepView& sv) {
        const double dt = sv.t1 - sv.t0;
        if (std::abs(sv.t0 - t_) > 1e-9 * std::max(1.0, dt))
            throw std::logic_error("GammaIntegrator: missed a step (at t = " + std::to_string(t_) +
                                   ", step starts at " + std::to_string(sv.t0) + ")");
        auto G0 = rate(sv.u0, sv.v0), G1 = rate(sv.u1, sv.v1);
        auto D0 = rate(sv.v0, sv.a0), D1 = rate(sv.v1, sv.a1);
        for (int i = 0; i < g_.n; ++i)
            gamma_[i] += 0.5 * dt * (G0[i] + G1[i]) + dt * dt / 12.0 * (D0[i] - D1[i]);
        t_ = sv.t1;
    };
}

CoupledResult run_coupled(const Background& bg, const Grid& g, const ConsistentData& d, const CoupledOptions& opt)
{
    const int l = d.l;
    auto V = reduced_potential(bg, ModeIndex{FieldKind::Alpha, l}, g);
    Evolver ea(g, V, opt.evo), eb(g, V, opt.evo);
    ea.set_state(d.alpha.u, d.alpha.v);
    eb.set_state(d.beta.u, d.beta.v);
    GammaIntegrator gi(g, d.gamma);
    auto gobs = gi.observer();

    struct Level {
        long step;
        double t;
        std::vector<double> ua, va, ub, vb, gamma;
    };
    const int k = opt.evo.scheme / 2;
    const double dt = opt.evo.dt;
    const long every = std::max(1L, std::lround(opt.sample_every / dt));
    std::deque<Level> hist;
    CoupledResult res;

    auto emit = [&](const Level& lv, const std::vector<double>& gt) {
        res.rows.push_back({lv.t, l, constraint_residuals(g, l, lv.ua, lv.va, lv.ub, lv.vb, lv.gamma, gt)});
    };
    hist.push_back({0, 0.0, ea.u(), ea.v(), eb.u(), eb.v(), gi.gamma()});
    emit(hist.back(), gi.rate(ea.u(), ea.v()));

    const long nsteps = static_cast<long>(std::ceil(opt.T / dt - 1e-9));
    std::vector<double> u0, v0, a0;
    for (long s = 0; s < nsteps; ++s) {
        u0 = ea.u();
        v0 = ea.v();
        a0 = ea.a();
        const double t0 = ea.time();
        ea.step();
        eb.step();
        if ((s + 1) % 20 == 0 || s + 1 == nsteps) {
            ea.check_boundary();
            eb.check_boundary();
        }
        gobs(StepView{t0, ea.time(), u0, v0, a0, ea.u(), ea.v(), ea.a()});
        hist.push_back({ea.steps(), ea.time(), ea.u(), ea.v(), eb.u(), eb.v(), gi.gamma()});
        if (static_cast<int>(hist.size()) > 2 * k + 1) hist.pop_front();
        if (static_cast<int>(hist.size()) == 2 * k + 1) {
            const Level& mid = hist[k];
            if (mid.step > 0 && mid.step % every == 0) {
                std::vector<double> gt(g.n);
                for (int i = 0; i < g.n; ++i) {
                    if (k == 1)
                        gt[i] = (hist[2].gamma[i] - hist[0].gamma[i]) / (2.0 * dt);
                    else
                        gt[i] = (hist[0].gamma[i] - 8.0 * hist[1].gamma[i] + 8.0 * hist[3].gamma[i] -
                                 hist[4].gamma[i]) / (12.0 * dt);
                }
                emit(mid, gt);
            }
        }
    }
    res.ua = ea.u();
    res.va = ea.v();
    res.ub = eb.u();
    res.vb = eb.v();
    res.gamma = gi.gamma();
    res.t_final = ea.time();
    return res;
}

double beta1_basis_c1(double r) { return 1.0 / (r * r); }

double beta1_basis_c2(const Background& bg, const RadialPoint& p)
{
    const double M = bg.M(), r = p.r;
    return (12.0 * M * M * r + 3.0 * M * r * r + r * r * r + 24.0 * M * M * M * std::log(p.y)) / (3.0 * r * r);
}

KerrFit fit_kerr(const Background& bg, const std::vector<RadialPoint>& pts, const std::vector<double>& beta1)
{
    if (pts.size() != beta1.size() || pts.size() < 2) throw std::invalid_argument("fit_kerr: bad sample set");
    const int n = static_cast<int>(pts.size());
    Eigen::MatrixXd B(n, 2);
    Eigen::VectorXd y(n);
    double bmax = 0.0, s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        B(i, 0) = beta1_basis_c1(pts[i].r);
        B(i, 1) = beta1_basis_c2(bg, pts[i]);
        y(i) = beta1[i];
        bmax = std::max(bmax, std::abs(y(i)));
        s1 = std::max(s1, std::abs(B(i, 0)));
        s2 = std::max(s2, std::abs(B(i, 1)));
    }
    KerrFit fit;
    fit.tolerance = std::max(1e-6 * bmax, 1e-12);
    if (bmax == 0.0) return fit;
    B.col(0) /= s1;
    B.col(1) /= s2;
    Eigen::Vector2d c = B.colPivHouseholderQr().solve(y);
    fit.C1 = c(0) / s1;
    fit.C2 = c(1) / s2;
    fit.a1 = fit.C1 / (6.0 * bg.M());
    fit.c2_measure = std::abs(fit.C2) * s2;
    fit.flat = fit.c2_measure <= fit.tolerance;
    fit.residual = (y - B * c).cwiseAbs().maxCoeff();
    return fit;
}

KerrNormalization normalize_kerr(const Background& bg, const std::vector<RadialPoint>& pts,
                                 const std::vector<double>& beta1)
{
    KerrNormalization out;
    out.fit = fit_kerr(bg, pts, beta1);
    if (!out.fit.flat)
        throw NotAsymptoticallyFlat("beta_1 has a growing static component: |C2| max|b2| = " +
                                    std::to_string(out.fit.c2_measure) + " exceeds " +
                                    std::to_string(out.fit.tolerance));
    out.normalized.resize(beta1.size());
    for (size_t i = 0; i < beta1.size(); ++i) {
        // the Kerr coefficient is -6 M a1 / r^2
        out.normalized[i] = beta1[i] - 6.0 * bg.M() * out.fit.a1 * beta1_basis_c1(pts[i].r);
        out.post_norm = std::max(out.post_norm, std::abs(out.normalized[i]));
    }
    return out;
}

Beta1Static verify_beta1_static(const Background& bg, const Grid& g, const InitialData& d,
                                const EvolverOptions& opt, double T)
{
    auto V = reduced_potential(bg, ModeIndex{FieldKind::Beta, 1}, g);
    EvolverOptions o = opt;
    o.detect_boundary = !d.stationary && opt.detect_boundary;
    Evolver ev(g, V, o);
    ev.set_state(d.u, d.v);
    Beta1Static out;
    out.T = T;
    const double n0 = l2_norm(d.u, g.h);
    std::vector<double> ft(g.n), du(g.n);
    auto obs = [&](const StepView& sv) {
        for (int i = 0; i < g.n; ++i) {
            ft[i] = sv.v1[i] / g.pts[i].r;
            du[i] = sv.u1[i] - d.u[i];
        }
        out.max_ft = std::max(out.max_ft, l2_norm(ft, g.h));
        if (n0 > 0.0) out.max_drift = std::max(out.max_drift, l2_norm(du, g.h) / n0);
    };
    run_to(ev, T, {obs});
    return out;
}

Beta1OdeCheck beta1_ode_check(double M)
{
    Background bg(M);
    static const double c1[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    static const double c2[5] = {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
    auto residual = [&](const std::function<double(double)>& f) {
        double worst = 0.0;
        const int n = 400;
        for (int k = 0; k < n; ++k) {
            const double r = 2.05 * M * std::pow(200.0 / 2.05, k / (n - 1.0));
            const double h = 0.01 * (r - 2.0 * M);
            double d1 = 0.0, d2 = c2[0] * f(r);
            for (int j = 1; j <= 4; ++j) {
                d1 += c1[j - 1] * (f(r + j * h) - f(r - j * h));
                d2 += c2[j] * (f(r + j * h) + f(r - j * h));
            }
            d1 /= h;
            d2 /= h * h;
            const double t1 = bg.Delta(r) / (r * r) * d2, t2 = (2.0 * r - 2.0 * M) / (r * r) * d1;
            const double t3 = 2.0 / (r * r) * (1.0 - 4.0 * M / r) * f(r);
            const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
            if (scale > 0.0) worst = std::max(worst, std::abs(t1 + t2 - t3) / scale);
        }
        return worst;
    };
    auto b2 = [&](double r) { return beta1_basis_c2(bg, RadialPoint{r, r - 2.0 * M, 1.0 - 2.0 * M / r}); };
    Beta1OdeCheck out;
    out.c1_residual = residual([](double r) { return beta1_basis_c1(r); });
    out.c2_residual = residual(b2);
    out.sum_residual = residual([&](double r) { return beta1_basis_c1(r) + b2(r); });
    return out;
}

ReductionResidual reduction_residual_oracle(const Background& bg, const ModeIndex& m,
                                            const std::function<double(double)>& profile, double omega,
                                            double h, const std::vector<double>& radii)
{
    m.validate();
    const double M = bg.M();
    const int s = m.spin(), l = m.l;
    auto u_of_x = [&](double x) {
        const double r = bg.r_of(x);
        return r * profile(r);
    };
    ReductionResidual out;
    for (double r : radii) {
        const double A = bg.A(r), f = profile(r);
        const double fp1 = profile(r + h), fm1 = profile(r - h), fp2 = profile(r + 2 * h), fm2 = profile(r - 2 * h);
        const double fr = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
        const double frr = (-fp2 + 16 * fp1 - 30 * f + 16 * fm1 - fm2) / (12 * h * h);
        const double covariant = omega * omega / A * f + A * frr + (2 * r - 2 * M) / (r * r) * fr +
                             (s * s - l * (l + 1.0)) / (r * r) * f - field_potential(bg, m.field, r) * f;

        const double x = bg.rstar(r);
        const double u = r * f;
        const double uxx = (-u_of_x(x + 2 * h) + 16 * u_of_x(x + h) - 30 * u + 16 * u_of_x(x - h) -
                            u_of_x(x - 2 * h)) / (12 * h * h);
        const double V = reduced_potential_at(bg, l, bg.point(x));
        const double reduced = (uxx + omega * omega * u - V * u) / (r * A);

        out.covariant = std::max(out.covariant, std::abs(covariant));
        out.reduced = std::max(out.reduced, std::abs(reduced));
        out.mismatch = std::max(out.mismatch, std::abs(covariant - reduced));
    }
    return out;
}

}  // namespace axial
