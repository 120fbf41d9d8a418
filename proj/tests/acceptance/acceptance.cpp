// One PASS/FAIL line per acceptance criterion; exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "axial/config.hpp"
#include "axial/fields.hpp"
#include "axial/harmonics.hpp"
#include "axial/harness.hpp"
#include "axial/identities.hpp"
#include "axial/redshift.hpp"

using namespace axial;

namespace {

struct Line {
    bool pass = true;
    std::string detail;
    void require(bool ok, const char* fmt, double v)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, fmt, v);
        if (!detail.empty()) detail += "; ";
        detail += buf;
        if (!ok) {
            detail += " (!)";
            pass = false;
        }
    }
};

int failures = 0;

void report(const char* name, const std::function<Line()>& body)
{
    auto t0 = std::chrono::steady_clock::now();
    Line l;
    try {
        l = body();
    } catch (const std::exception& e) {
        l.pass = false;
        l.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!l.pass) ++failures;
    std::printf("%s  %-28s %s [%.1f s]\n", l.pass ? "PASS" : "FAIL", name, l.detail.c_str(), secs);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig config(const char* name, const std::string& study)
{
    return load_config(std::string(AXIAL_CONFIG_DIR) + "/" + name, study);
}

bool in_order_band(const std::vector<double>& orders)
{
    if (orders.empty()) return false;
    for (double o : orders)
        if (o < 1.8 || o > 2.2) return false;
    return true;
}

double worst_band_distance(const std::vector<double>& orders)
{
    double w = 0.0;
    for (double o : orders) w = std::max(w, std::abs(o - 2.0));
    return orders.empty() ? INFINITY : w;
}

const ConvergenceReport& convergence()
{
    static ConvergenceReport rep = [] {
        RunConfig c = config("converge.ini", "converge");
        return convergence_study(c, c.jobs);
    }();
    return rep;
}

struct DecayRuns {
    RunConfig cfg;
    std::vector<ModeStudy> modes;
};

const DecayRuns& decay_runs()
{
    static DecayRuns d = [] {
        DecayRuns r;
        r.cfg = config("decay.ini", "decay");
        StudyContext ctx(r.cfg);
        r.modes.resize(r.cfg.modes.size());
        parallel_for(static_cast<int>(r.modes.size()), r.cfg.jobs,
                     [&](int i) { r.modes[i] = run_mode_study(ctx, r.cfg.modes[i], r.cfg.T); });
        return r;
    }();
    return d;
}

Line identities()
{
    auto t0 = std::chrono::steady_clock::now();
    Line l;
    int failed = 0, n = 0;
    for (const auto& c : run_identity_suite()) {
        ++n;
        if (!c.pass) {
            ++failed;
            std::printf("      failing check: %s\n", c.name.c_str());
        }
    }
    l.require(failed == 0, "%.0f exact checks failed", failed);
    l.require(n >= 7, "%.0f checks run", n);
    l.require(kBaseQuintic == Quintic{-534, -244, 304, 118, -105, 16}, "base quintic stored %.0f", 1);
    l.require(kPostQuintic == Quintic{-534, -172, 400, 102, -137, 24}, "post quintic stored %.0f", 1);
    auto ode = beta1_ode_check(1.0);
    double worst = std::max({ode.c1_residual, ode.c2_residual, ode.sum_residual});
    l.require(worst <= 1e-8, "beta1 ODE residual %.2e", worst);
    double s = seconds_since(t0);
    l.require(s < 10.0, "%.2f s", s);
    return l;
}

Line spectral()
{
    auto t0 = std::chrono::steady_clock::now();
    Line l;
    SphereGrid g(48);
    double eig = 0.0, adj = 0.0, mins[3] = {0, INFINITY, INFINITY};
    for (int s : {1, 2})
        for (int ell = s; ell <= 8; ++ell) {
            auto y = eval_harmonic(g, s, ell);
            auto ly = angular_laplacian(g, s, y.values);
            for (int i = 0; i < g.size(); ++i)
                eig = std::max(eig, std::abs(ly[i] - (s * s - ell * (ell + 1.0)) * y.values[i]));
            if (ell >= 2)
                mins[s] = std::min(mins[s], dirichlet_integral(g, s, y.values) / (y.norm * y.norm));
            if (s == 1 && ell >= 2) {
                for (int k = 2; k <= 8; ++k) {
                    auto w = eval_harmonic(g, 2, k);
                    double a = bundle_inner(g, eth_raise(g, 1, y.values), w.values, 2);
                    double b = -bundle_inner(g, y.values, eth_lower(g, 2, w.values), 1);
                    adj = std::max(adj, std::abs(a - b));
                }
            }
        }
    double d110 = 0.0;
    for (double v : eth_raise(g, 1, eval_harmonic(g, 1, 1).values)) d110 = std::max(d110, std::abs(v));
    l.require(eig <= 1e-8, "eigenvalue law %.2e", eig);
    l.require(d110 <= 1e-10, "raised Y110 %.2e", d110);
    l.require(adj <= 1e-8, "adjointness %.2e", adj);
    l.require(std::abs(mins[2] - 2.0) <= 1e-8, "spin-2 minimum %.10f", mins[2]);
    l.require(std::abs(mins[1] - 5.0) <= 1e-8, "spin-1 minimum %.10f", mins[1]);
    double s = seconds_since(t0);
    l.require(s < 30.0, "%.2f s", s);
    return l;
}

Line conservation()
{
    auto t0 = std::chrono::steady_clock::now();
    Line l;
    const auto& rep = convergence();
    double drift = 0.0, sol = 0.0, res = 0.0, energy = 0.0, gam = 0.0;
    bool drift_ok = true, sol_ok = true, res_ok = true, gam_ok = true;
    for (const auto& e : rep.entries) {
        if (e.quantity == "E_T_drift") {
            drift = std::max(drift, e.value[1]);
            drift_ok = drift_ok && in_order_band(e.order);
            energy = std::max(energy, worst_band_distance(e.order));
        } else if (e.quantity == "solution") {
            sol_ok = sol_ok && in_order_band(e.order);
            sol = std::max(sol, worst_band_distance(e.order));
        } else if (e.quantity == "gamma_rstar_relation") {
            gam_ok = gam_ok && in_order_band(e.order);
            gam = std::max(gam, worst_band_distance(e.order));
        } else if (e.quantity.rfind("res_", 0) == 0) {
            res_ok = res_ok && in_order_band(e.order);
            res = std::max(res, worst_band_distance(e.order));
        }
    }
    l.require(drift <= 1e-3, "E_T drift at h = 0.1: %.2e", drift);
    l.require(drift_ok, "E_T drift orders within 2 +- %.3f", energy);
    l.require(sol_ok, "solution orders within 2 +- %.3f", sol);
    l.require(res_ok, "residual orders within 2 +- %.3f", res);
    l.require(gam_ok, "gamma relation orders within 2 +- %.3f", gam);
    double s = seconds_since(t0);
    l.require(s < 900.0, "%.0f s", s);
    return l;
}

Line boundedness()
{
    Line l;
    for (const auto& ms : decay_runs().modes) {
        double hi = max_over(ms.rows, 0.0, 200.0,
                             [](const EnergyRow& r) { return r.has_sigma ? r.E_N_sigma : -INFINITY; });
        double ratio = hi / ms.E_N_sigma0;
        std::string fmt = ms.mode.tag() + ":" + std::to_string(ms.mode.l) + " sup E_N ratio %.4f";
        l.require(ms.E_N_sigma0 > 0.0 && ratio <= 2.0, fmt.c_str(), ratio);
    }
    return l;
}

Line morawetz()
{
    Line l;
    for (const auto& ms : decay_runs().modes) {
        std::string tag = ms.mode.tag() + ":" + std::to_string(ms.mode.l);
        if (ms.windows.size() != 2) {
            l.require(false, (tag + " windows recorded %.0f").c_str(), ms.windows.size());
            continue;
        }
        double a = ms.windows[0].lhs / ms.E_T0, b = ms.windows[1].lhs / ms.E_T0;
        l.require((b - a) / a <= 0.05, (tag + " increase 200M->400M %.4f").c_str(), (b - a) / a);
        l.require(ms.min_integrand >= 0.0, (tag + " min integrand %.2e").c_str(), ms.min_integrand);
    }
    return l;
}

Line z_machinery()
{
    Line l;
    for (const auto& ms : decay_runs().modes) {
        std::string tag = ms.mode.tag() + ":" + std::to_string(ms.mode.l);
        double c = INFINITY, dec = 0.0;
        for (const auto& r : ms.rows) {
            c = std::min(c, r.E_Zw / r.E_Z);
            dec = std::max(dec, std::abs(r.E_Zdec - r.E_Zw) / std::abs(r.E_Zw));
        }
        l.require(c > 0.0, (tag + " min E_Zw/E_Z %.4f").c_str(), c);
        l.require(dec <= 1e-6, (tag + " decomposed vs weighted %.2e").c_str(), dec);
        double tr = z_transient(decay_runs().cfg.T);
        l.require(tr > 0.0 && z_weighted_nongrowing(ms.rows, tr, 1e-3),
                  (tag + " E_Zw non-growing after %.0f M").c_str(), tr);
    }
    return l;
}

Line decay()
{
    Line l;
    const auto& cfg = decay_runs().cfg;
    const double lo = cfg.decay_tau_min, hi = cfg.decay_tau_max;
    l.require(lo == 20.0 && hi == 200.0, "range ends at %.0f M", hi);
    for (const auto& ms : decay_runs().modes) {
        std::string tag = ms.mode.tag() + ":" + std::to_string(ms.mode.l);
        auto f1 = [](const EnergyRow& r) { return r.has_tilde ? r.tau2_EN : -INFINITY; };
        auto f2 = [](const EnergyRow& r) { return r.has_tilde ? r.tau_sup : -INFINITY; };
        int covered = 0;
        for (const auto& r : ms.rows) covered += r.has_tilde && r.tau >= lo - 1e-9 && r.tau <= hi + 1e-9;
        l.require(covered >= 10, (tag + " slices in range %.0f").c_str(), covered);
        l.require(later_half_not_above(ms.rows, lo, hi, f1), (tag + " tau^2 E_N/E1 max %.3e").c_str(),
                  max_over(ms.rows, lo, hi, f1));
        l.require(later_half_not_above(ms.rows, lo, hi, f2), (tag + " tau sup|f| max %.3e").c_str(),
                  max_over(ms.rows, lo, hi, f2));
    }
    return l;
}

Line kerr()
{
    Line l;
    RunConfig c = config("kerr.ini", "normalize-kerr");
    const double C1 = 3.0 * c.M * c.M * c.M;
    l.require(c.kerr_C1 == C1, "C1 = %.1f", c.kerr_C1);
    KerrStudy k = kerr_study(c);
    const double a1 = C1 / (6.0 * c.M);
    l.require(!k.rejected && std::abs(k.fit.a1 - a1) <= 1e-10 * a1, "a1 error %.2e", std::abs(k.fit.a1 - a1));
    l.require(!k.rejected && k.norm.post_norm <= 1e-10, "post norm %.2e", k.norm.post_norm);
    c.kerr_profile = "c2";
    c.kerr_C2 = 1e-3;
    l.require(kerr_study(c).rejected, "C2 branch rejected %.0f", 1);
    for (const auto& e : convergence().entries)
        if (e.quantity == "beta1_static_drift") {
            l.require(e.value.back() < e.value.front() && in_order_band(e.order), "static drift order %.3f",
                      e.order.empty() ? NAN : e.order.back());
        }
    return l;
}

Line redshift()
{
    Line l;
    Background bg(1.0);
    RedshiftParams p;
    p.r0 = 3.0;
    p.R0 = 10.0;
    RedshiftCert a = build_redshift(bg, p);
    RedshiftParams q = p;
    q.samples *= 2;
    RedshiftCert b = certify_redshift(bg, q, a.N.delta1, a.N.delta2);
    l.require(a.found && a.c > 0.0, "c = %.4e", a.c);
    const double change = std::abs(b.c - a.c) / a.c;
    l.require(b.found && change <= 0.10, "doubled density change %.4f", change);
    l.require(std::abs(a.kappa - 0.25) < 1e-8, "kappa %.10f", a.kappa);
    return l;
}

}  // namespace

int main()
{
    report("exact-identity suite", identities);
    report("spectral suite", spectral);
    report("conservation/convergence", conservation);
    report("boundedness", boundedness);
    report("morawetz", morawetz);
    report("z-machinery", z_machinery);
    report("decay", decay);
    report("kerr normalization", kerr);
    report("red-shift certification", redshift);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
