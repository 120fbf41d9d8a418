#include "axial/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "axial/harmonics.hpp"
#include "axial/identities.hpp"
#include "axial/slices.hpp"

namespace fs = std::filesystem;

namespace axial {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn)
{
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next++;
                if (i >= n) return;
                {
                    std::lock_guard<std::mutex> lk(mu);
                    if (err) return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

void write_file(const fs::path& p, const std::string& s)
{
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

std::string mode_dir(const ModeIndex& m) { return m.tag() + "_l" + std::to_string(m.l); }

std::pair<double, double> slice_t_range(const Grid& g, const Slicing& s, double tau)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < g.n; ++i) {
        double x = g.x(i);
        if (x < s.x_lo - 1e-9 || x > s.x_hi + 1e-9) continue;
        double t = tau + s.h(g.pts[i]);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return {lo, hi};
}

std::vector<double> tau_list(double every, double T)
{
    std::vector<double> t;
    for (long k = 0;; ++k) {
        double tau = k * every;
        if (tau > T + 1e-9) break;
        t.push_back(tau);
    }
    return t;
}

nlohmann::json base_manifest(const RunConfig& cfg)
{
    return {{"study", cfg.study},
            {"config_hash", config_hash(cfg)},
            {"M", cfg.M},
            {"scheme", cfg.scheme},
            {"grid", {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"h", cfg.h}}},
            {"dt", cfg.effective_dt()}};
}

std::string potential_tag(const ModeIndex& m) { return m.field == FieldKind::Alpha ? "V" : "W"; }

}  // namespace

StudyContext::StudyContext(const RunConfig& c)
    : cfg(c), bg(c.M), grid(make_grid(bg, c.x_min, c.x_max, c.h)), foliation(build_foliation(bg, c.foliation)),
      redshift(build_redshift(bg, c.redshift))
{
}

InitialData make_initial_data(const StudyContext& ctx, const ModeIndex& m)
{
    const auto& c = ctx.cfg;
    if (c.data_kind == "zero") return zero_initial_data(ctx.grid);
    if (c.data_kind == "static-beta1") {
        if (!(m.field == FieldKind::Beta && m.l == 1))
            throw ConfigError("static-beta1 data applies to the beta:1 mode only");
        return static_beta1_data(ctx.grid, c.C1);
    }
    return gaussian_initial_data(ctx.grid, c.bump);
}

ModeStudy run_mode_study(const StudyContext& ctx, const ModeIndex& m, double T)
{
    const auto& cfg = ctx.cfg;
    const auto& bg = ctx.bg;
    const auto& g = ctx.grid;
    m.validate();
    InitialData d = make_initial_data(ctx, m);
    check_causal_fit(g, d, T, cfg.margin);

    EvolverOptions eo;
    eo.scheme = cfg.scheme;
    eo.dt = cfg.effective_dt();
    eo.detect_boundary = !d.stationary;
    auto V = reduced_potential(bg, m, g);
    const ModePotential mp = mode_potential(m);

    ModeStudy out;
    out.mode = m;
    out.compact = !d.stationary;

    const auto taus = tau_list(cfg.snapshot_every, T);
    const Slicing sigma = star_slicing(bg, cfg.sigma_x_lo, cfg.sigma_x_hi);
    const Slicing tilde = ctx.foliation.slicing();
    std::vector<SliceRequest> req;
    struct Tag {
        size_t row;
        bool is_tilde;
    };
    std::vector<Tag> tags;
    for (size_t k = 0; k < taus.size(); ++k) {
        for (int which = 0; which < 2; ++which) {
            const Slicing& s = which ? tilde : sigma;
            auto [lo, hi] = slice_t_range(g, s, taus[k]);
            if (hi > T + 1e-9 || lo < -T - 1e-9) continue;
            req.push_back({s, taus[k]});
            tags.push_back({k, which == 1});
        }
    }
    SliceSampler sampler(g, req);

    if (sampler.needs_backward()) {
        Evolver eb(g, V, eo);
        std::vector<double> vneg(d.v);
        for (double& x : vneg) x = -x;
        eb.set_state(d.u, vneg);
        run_to(eb, -sampler.t_min(), {sampler.backward()});
    }

    Evolver ev(g, V, eo);
    ev.set_state(d.u, d.v);

    std::vector<double> checkpoints;
    for (double w : cfg.morawetz_windows)
        if (w <= T + 1e-9) checkpoints.push_back(w);
    MorawetzAccumulator mor(bg, g, m, checkpoints);
    mor.start(d.u, 0.0);

    out.rows.resize(taus.size());
    const double dt = eo.dt;
    auto flat = [&](size_t k, double t, const std::vector<double>& u, const std::vector<double>& v) {
        FieldSamples s = samples_from_state(g, u, v);
        EnergyRow& r = out.rows[k];
        r.tau = taus[k];
        r.l = m.l;
        r.E_T = t_energy(bg, mp, s);
        ZEnergies z = z_energies(bg, mp, s, t);
        r.E_Z = z.direct;
        r.E_Zw = z.weighted;
        r.E_Zdec = z.decomposed;
    };
    std::vector<double> traj_times{0.0};
    if (cfg.trajectory_every > 0.0)
        for (double t : tau_list(cfg.trajectory_every, T))
            if (t > 0.0) traj_times.push_back(t);
    if (traj_times.back() < T - 1e-9) traj_times.push_back(T);

    flat(0, 0.0, d.u, d.v);
    out.trajectory.push_back({0.0, d.u, d.v});
    size_t next_row = 1, next_traj = 1;
    auto snap = [&](const StepView& sv) {
        while (next_row < taus.size() && sv.t1 >= taus[next_row] - 0.5 * dt) flat(next_row++, sv.t1, sv.u1, sv.v1);
        while (next_traj < traj_times.size() && sv.t1 >= traj_times[next_traj] - 0.5 * dt) {
            out.trajectory.push_back({sv.t1, sv.u1, sv.v1});
            ++next_traj;
        }
    };
    run_to(ev, T, {sampler.forward(), mor.observer(), snap});
    out.t_final = ev.time();
    out.windows = mor.windows();
    out.min_integrand = mor.min_integrand();
    out.E_T0 = out.rows[0].E_T;

    sampler.require_complete();
    if (out.compact) {
        FieldSamples s0 = samples_from_state(g, d.u, d.v);
        out.E = initial_energies(bg, m, s0, ctx.redshift.N);
    }
    SphereGrid sg(48);
    const double ysup = harmonic_sup(sg, eval_harmonic(sg, m.spin(), m.l));
    for (size_t j = 0; j < req.size(); ++j) {
        const SliceData& sd = sampler.slices()[j];
        FieldSamples s = samples_from_slice(g, sd);
        double EN = flux_through_graph(bg, mp, s, multiplier_N(bg, s, ctx.redshift.N));
        EnergyRow& r = out.rows[tags[j].row];
        if (!tags[j].is_tilde) {
            r.has_sigma = true;
            r.E_N_sigma = EN;
            continue;
        }
        r.has_tilde = true;
        r.E_N_tilde = EN;
        double sup = 0.0;
        for (double f : s.f) sup = std::max(sup, std::abs(f));
        r.sup_abs_f = sup * ysup;
        r.tau2_EN = out.E.E1 > 0.0 ? r.tau * r.tau * EN / out.E.E1 : 0.0;
        r.tau_sup = out.E.E2 > 0.0 ? r.tau * r.sup_abs_f / std::sqrt(out.E.E2) : 0.0;
    }
    if (out.rows[0].has_sigma) out.E_N_sigma0 = out.rows[0].E_N_sigma;
    return out;
}

double max_over(const std::vector<EnergyRow>& rows, double lo, double hi,
                const std::function<double(const EnergyRow&)>& f)
{
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        if (r.tau >= lo - 1e-9 && r.tau <= hi + 1e-9) m = std::max(m, f(r));
    return m;
}

double z_transient(double T) { return T >= 200.0 ? 100.0 : 0.0; }

bool z_weighted_nongrowing(const std::vector<EnergyRow>& rows, double tau_transient, double tol)
{
    double ref = -1.0;
    for (const auto& r : rows) {
        if (r.tau < tau_transient - 1e-9) continue;
        if (ref < 0.0) ref = r.E_Zw;
        else if (r.E_Zw > ref * (1.0 + tol)) return false;
    }
    return ref >= 0.0;
}

bool later_half_not_above(const std::vector<EnergyRow>& rows, double lo, double hi,
                          const std::function<double(const EnergyRow&)>& f)
{
    const double mid = 0.5 * (lo + hi);
    return max_over(rows, mid, hi, f) <= max_over(rows, lo, mid, f);
}

std::string energies_csv(const std::vector<EnergyRow>& rows)
{
    std::string s = "tau,ell,E_T,E_N_sigma,E_N_tilde,E_Z,E_Zw,sup_abs_f,tau2_EN,tau_sup\n";
    for (const auto& r : rows) {
        s += num(r.tau) + "," + std::to_string(r.l) + "," + num(r.E_T) + ",";
        s += (r.has_sigma ? num(r.E_N_sigma) : "") + ",";
        s += (r.has_tilde ? num(r.E_N_tilde) : "") + ",";
        s += num(r.E_Z) + "," + num(r.E_Zw) + ",";
        if (r.has_tilde)
            s += num(r.sup_abs_f) + "," + num(r.tau2_EN) + "," + num(r.tau_sup);
        else
            s += ",,";
        s += "\n";
    }
    return s;
}

std::string bulk_csv(const std::vector<MorawetzWindow>& w, double E_T0)
{
    std::string s = "window,lhs_grad,lhs_zero,lhs_ang,lhs,K_int,ratio_to_ET0\n";
    for (const auto& x : w)
        s += num(x.t_end) + "," + num(x.lhs_grad) + "," + num(x.lhs_zero) + "," + num(x.lhs_ang) + "," +
             num(x.lhs) + "," + num(x.k_int) + "," + (E_T0 > 0.0 ? num(x.lhs / E_T0) : std::string("")) + "\n";
    return s;
}

std::string residuals_csv(const std::vector<ResidualRow>& rows)
{
    std::string s = "t,ell,res_Rtphi,res_Rrphi,res_Rthetaphi,res_closed\n";
    for (const auto& r : rows)
        s += num(r.t) + "," + std::to_string(r.l) + "," + num(r.r.Rtphi) + "," + num(r.r.Rrphi) + "," +
             num(r.r.Rthetaphi) + "," + num(r.r.closed) + "\n";
    return s;
}

std::string trajectory_csv(const Grid& g, const Snapshot& sn)
{
    std::string s = "r_star,r,re_f,im_f,re_f_t,im_f_t\n";
    for (int i = 0; i < g.n; ++i) {
        const double r = g.pts[i].r;
        s += num(g.x(i)) + "," + num(r) + "," + num(sn.u[i] / r) + ",0," + num(sn.v[i] / r) + ",0\n";
    }
    return s;
}

namespace {

nlohmann::json mode_summary(const RunConfig& cfg, const ModeStudy& ms)
{
    nlohmann::json j;
    j["mode"] = {{"field", ms.mode.tag()}, {"l", ms.mode.l}, {"spin", ms.mode.spin()}, {"Lambda", ms.mode.Lambda()}};
    j["potential"] = potential_tag(ms.mode);
    j["compact_data"] = ms.compact;
    j["E_T0"] = ms.E_T0;
    j["E0"] = ms.E.E0;
    j["E1"] = ms.E.E1;
    j["E2"] = ms.E.E2;
    const auto& last = ms.rows.back();
    j["E_T_drift"] = ms.E_T0 > 0.0 ? std::abs(last.E_T - ms.E_T0) / ms.E_T0 : 0.0;

    double zmin = std::numeric_limits<double>::infinity(), dec = 0.0;
    for (const auto& r : ms.rows) {
        if (r.E_Z > 0.0) zmin = std::min(zmin, r.E_Zw / r.E_Z);
        if (r.E_Zw != 0.0) dec = std::max(dec, std::abs(r.E_Zdec - r.E_Zw) / std::abs(r.E_Zw));
    }
    j["z_ratio_min"] = std::isfinite(zmin) ? nlohmann::json(zmin) : nlohmann::json("N/A");
    j["z_decomposed_max_rel_diff"] = dec;
    const double ttr = z_transient(ms.rows.back().tau);
    j["z_weighted_nongrowing"] = ttr > 0.0 ? nlohmann::json(z_weighted_nongrowing(ms.rows, ttr, 1e-3))
                                           : nlohmann::json("N/A");

    if (ms.E_N_sigma0 > 0.0) {
        double hi = 0.0;
        for (const auto& r : ms.rows)
            if (r.has_sigma) hi = std::max(hi, r.E_N_sigma / ms.E_N_sigma0);
        j["E_N_sigma_sup_ratio"] = hi;
    }
    nlohmann::json w = nlohmann::json::array();
    for (const auto& x : ms.windows)
        w.push_back({{"window", x.t_end}, {"lhs", x.lhs}, {"K_int", x.k_int},
                     {"ratio_to_ET0", ms.E_T0 > 0.0 ? x.lhs / ms.E_T0 : 0.0}});
    j["morawetz"] = w;
    j["morawetz_min_integrand"] = ms.min_integrand;

    if (!ms.compact || (ms.mode.field == FieldKind::Beta && ms.mode.l == 1)) {
        j["decay"] = "excluded: the l = 1 beta mode is removed by Kerr normalization, not by decay";
    } else {
        auto f1 = [](const EnergyRow& r) { return r.has_tilde ? r.tau2_EN : -1.0; };
        auto f2 = [](const EnergyRow& r) { return r.has_tilde ? r.tau_sup : -1.0; };
        const double lo = cfg.decay_tau_min, hi = cfg.decay_tau_max;
        bool covered = true;
        for (double t = lo; t <= hi + 1e-9; t += cfg.snapshot_every) {
            auto it = std::find_if(ms.rows.begin(), ms.rows.end(),
                                   [&](const EnergyRow& r) { return std::abs(r.tau - t) < 1e-9 && r.has_tilde; });
            if (it == ms.rows.end()) covered = false;
        }
        if (!covered) {
            j["decay"] = "N/A: the run does not cover the decay range";
        } else {
            j["decay"] = {{"tau2_EN_bounded", later_half_not_above(ms.rows, lo, hi, f1)},
                          {"tau_sup_bounded", later_half_not_above(ms.rows, lo, hi, f2)},
                          {"tau2_EN_max", max_over(ms.rows, lo, hi, f1)},
                          {"tau_sup_max", max_over(ms.rows, lo, hi, f2)},
                          {"range", {lo, hi}}};
        }
    }
    return j;
}

int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const BoundaryContact& e) {
        std::cerr << "boundary contact: " << e.what() << "\n";
        return kBoundary;
    }
}

int evolve_like(const RunConfig& cfg, const fs::path& out, double T)
{
    auto t0 = std::chrono::steady_clock::now();
    StudyContext ctx(cfg);
    const int nm = static_cast<int>(cfg.modes.size());
    std::vector<ModeStudy> studies(nm);

    std::vector<int> coupled_l;
    if (cfg.coupled) {
        std::set<int> ls;
        for (const auto& m : cfg.modes)
            if (m.l >= 2) ls.insert(m.l);
        coupled_l.assign(ls.begin(), ls.end());
    }
    const int nc = static_cast<int>(coupled_l.size());
    std::vector<CoupledResult> coupled(nc);

    parallel_for(nm + nc, cfg.jobs, [&](int i) {
        if (i < nm) {
            studies[i] = run_mode_study(ctx, cfg.modes[i], T);
            return;
        }
        const int l = coupled_l[i - nm];
        BumpParams a = cfg.bump, b = cfg.beta_bump;
        if (cfg.data_kind == "zero") a.amplitude = b.amplitude = 0.0;
        ConsistentData d = consistent_initial_data(ctx.bg, ctx.grid, l, a, b);
        check_causal_fit(ctx.grid, d.alpha, T, cfg.margin);
        CoupledOptions co;
        co.evo.scheme = cfg.scheme;
        co.evo.dt = cfg.effective_dt();
        co.T = T;
        co.sample_every = cfg.residual_every;
        coupled[i - nm] = run_coupled(ctx.bg, ctx.grid, d, co);
    });

    nlohmann::json manifest = base_manifest(cfg);
    manifest["T"] = T;
    manifest["foliation"] = {{"c0", ctx.foliation.c0}, {"c1", ctx.foliation.c1}, {"eps", ctx.foliation.eps},
                             {"tau_max", ctx.foliation.tau_max}};
    manifest["redshift"] = {{"delta1", ctx.redshift.N.delta1}, {"delta2", ctx.redshift.N.delta2},
                            {"c", ctx.redshift.c}, {"C", ctx.redshift.C}};
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& ms : studies) {
        const fs::path dir = out / mode_dir(ms.mode);
        std::vector<std::string> files{"energies.csv", "bulk.csv", "summary.json"};
        write_file(dir / "energies.csv", energies_csv(ms.rows));
        write_file(dir / "bulk.csv", bulk_csv(ms.windows, ms.E_T0));
        for (const auto& sn : ms.trajectory) {
            char name[64];
            std::snprintf(name, sizeof name, "traj_t%010.4f.csv", sn.t);
            write_file(dir / name, trajectory_csv(ctx.grid, sn));
            files.push_back(name);
        }
        nlohmann::json summ = mode_summary(cfg, ms);
        summ["config_hash"] = config_hash(cfg);
        write_file(dir / "summary.json", summ.dump(2) + "\n");
        nlohmann::json jm = base_manifest(cfg);
        jm["mode"] = summ["mode"];
        jm["potential"] = potential_tag(ms.mode);
        jm["files"] = files;
        write_file(dir / "manifest.json", jm.dump(2) + "\n");
        jobs.push_back({{"dir", mode_dir(ms.mode)}, {"mode", summ["mode"]}, {"files", files}});
    }
    manifest["jobs"] = jobs;
    if (nc > 0) {
        std::vector<ResidualRow> all;
        for (const auto& c : coupled) all.insert(all.end(), c.rows.begin(), c.rows.end());
        write_file(out / "residuals.csv", residuals_csv(all));
        manifest["residuals"] = "residuals.csv";
    }
    write_file(out / "config.ini", to_ini(cfg));
    write_file(out / "foliation.csv", ctx.foliation.csv(ctx.bg, 401));
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << cfg.study << ": " << nm << " mode(s), " << nc << " coupled run(s), T = " << T << ", "
              << secs << " s, output in " << out.string() << "\n";
    return kOk;
}

}  // namespace

int run_evolve(const RunConfig& cfg, const fs::path& out)
{
    return guarded([&] { return evolve_like(cfg, out, cfg.T); });
}

int run_decay(const RunConfig& cfg, const fs::path& out)
{
    return guarded([&] {
        if (cfg.T < 250.0 * cfg.M) throw ConfigError("decay study needs grid.T >= 250 M");
        int rc = evolve_like(cfg, out, cfg.T);
        bool ok = true;
        nlohmann::json v;
        for (const auto& m : cfg.modes) {
            std::ifstream f(out / mode_dir(m) / "summary.json");
            nlohmann::json s = nlohmann::json::parse(f);
            v[mode_dir(m)] = s["decay"];
            if (s["decay"].is_object())
                ok = ok && s["decay"]["tau2_EN_bounded"].get<bool>() && s["decay"]["tau_sup_bounded"].get<bool>();
        }
        v["config_hash"] = config_hash(cfg);
        v["pass"] = ok;
        write_file(out / "decay_verdicts.json", v.dump(2) + "\n");
        std::cout << "decay verdict: " << (ok ? "bounded" : "NOT bounded") << "\n";
        return rc == kOk && !ok ? kVerifyFail : rc;
    });
}

nlohmann::json ConvergenceReport::to_json() const
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json o = {{"quantity", e.quantity}, {"mode", e.mode}, {"h", e.h}, {"value", e.value}};
        o["order"] = e.order.empty() ? nlohmann::json("N/A") : nlohmann::json(e.order);
        a.push_back(o);
    }
    return a;
}

namespace {

std::vector<double> pair_orders(const std::vector<double>& v)
{
    std::vector<double> o;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (!(v[i] > 0.0 && v[i + 1] > 0.0)) return {};
        o.push_back(std::log2(v[i] / v[i + 1]));
    }
    return o;
}

struct Level {
    std::vector<double> u;
    double E0 = 0.0, E1 = 0.0;
};

}  // namespace

ConvergenceReport convergence_study(const RunConfig& cfg, int jobs)
{
    Background bg(cfg.M);
    const auto& hs = cfg.converge_h;
    const double T = cfg.converge_T;
    std::vector<Grid> grids;
    for (double h : hs) grids.push_back(make_grid(bg, cfg.x_min, cfg.x_max, h));
    for (size_t k = 1; k < grids.size(); ++k)
        if (grids[k].n != 2 * (grids[k - 1].n - 1) + 1)
            throw ConfigError("converge grids do not nest; choose grid.x_min, grid.x_max divisible by the coarse h");

    const int nm = static_cast<int>(cfg.modes.size()), nh = static_cast<int>(hs.size());
    std::vector<int> ls;
    for (const auto& m : cfg.modes)
        if (m.l >= 2 && std::find(ls.begin(), ls.end(), m.l) == ls.end()) ls.push_back(m.l);
    const int nl = static_cast<int>(ls.size());
    const bool zero = cfg.data_kind == "zero";

    std::vector<Level> levels(nm * nh);
    std::vector<ResidualRow> res(nl * nh);
    std::vector<Beta1Static> statics(nh);
    auto eopts = [&](int k) {
        EvolverOptions eo;
        eo.scheme = cfg.scheme;
        eo.dt = cfg.cfl * hs[k];
        return eo;
    };
    const int ntask = nm * nh + nl * nh + nh;
    parallel_for(ntask, jobs, [&](int i) {
        if (i < nm * nh) {
            const int mi = i / nh, k = i % nh;
            const ModeIndex& m = cfg.modes[mi];
            const Grid& g = grids[k];
            InitialData d = zero ? zero_initial_data(g) : gaussian_initial_data(g, cfg.bump);
            check_causal_fit(g, d, T, cfg.margin);
            Evolver ev(g, reduced_potential(bg, m, g), eopts(k));
            ev.set_state(d.u, d.v);
            ModePotential mp = mode_potential(m);
            Level& L = levels[i];
            L.E0 = t_energy(bg, mp, samples_from_state(g, d.u, d.v));
            run_to(ev, T, {});
            L.E1 = t_energy(bg, mp, samples_from_state(g, ev.u(), ev.v()));
            L.u = ev.u();
            return;
        }
        i -= nm * nh;
        if (i < nl * nh) {
            const int li = i / nh, k = i % nh;
            const Grid& g = grids[k];
            BumpParams a = cfg.bump, b = cfg.beta_bump;
            if (zero) a.amplitude = b.amplitude = 0.0;
            ConsistentData d = consistent_initial_data(bg, g, ls[li], a, b);
            check_causal_fit(g, d.alpha, cfg.converge_residual_time + 2 * g.h, cfg.margin);
            CoupledOptions co;
            co.evo = eopts(k);
            co.T = cfg.converge_residual_time + 4.0 * co.evo.dt;
            co.sample_every = cfg.converge_residual_time;
            auto r = run_coupled(bg, g, d, co);
            res[i] = r.rows.back();
            if (std::abs(res[i].t - cfg.converge_residual_time) > 1e-6)
                throw std::logic_error("residual sample missed the requested time");
            return;
        }
        i -= nl * nh;
        const Grid& g = grids[i];
        EvolverOptions eo = eopts(i);
        statics[i] = verify_beta1_static(bg, g, static_beta1_data(g, cfg.C1), eo, T);
    });

    ConvergenceReport rep;
    for (int mi = 0; mi < nm; ++mi) {
        const std::string tag = cfg.modes[mi].tag() + ":" + std::to_string(cfg.modes[mi].l);
        ConvergenceEntry drift{"E_T_drift", tag, hs, {}, {}};
        for (int k = 0; k < nh; ++k) {
            const Level& L = levels[mi * nh + k];
            drift.value.push_back(L.E0 > 0.0 ? std::abs(L.E1 - L.E0) / L.E0 : 0.0);
        }
        drift.order = pair_orders(drift.value);
        rep.entries.push_back(drift);

        ConvergenceEntry sol{"solution", tag, hs, {}, {}};
        const Grid& gc = grids[0];
        for (int k = 0; k + 1 < nh; ++k) {
            const auto& a = levels[mi * nh + k].u;
            const auto& b = levels[mi * nh + k + 1].u;
            const int sa = 1 << k, sb = 1 << (k + 1);
            double s = 0.0;
            for (int j = 0; j < gc.n; ++j) {
                double dlt = a[j * sa] - b[j * sb];
                s += dlt * dlt;
            }
            sol.value.push_back(std::sqrt(s * gc.h));
        }
        sol.h = {hs[0], hs[1]};
        if (sol.value[0] > 0.0 && sol.value[1] > 0.0) sol.order = {std::log2(sol.value[0] / sol.value[1])};
        rep.entries.push_back(sol);
    }
    for (int li = 0; li < nl; ++li) {
        const std::string tag = "l=" + std::to_string(ls[li]);
        const char* names[5] = {"res_Rtphi", "res_Rrphi", "res_Rthetaphi", "res_closed", "gamma_rstar_relation"};
        for (int q = 0; q < 5; ++q) {
            ConvergenceEntry e{names[q], tag, hs, {}, {}};
            for (int k = 0; k < nh; ++k) {
                const auto& r = res[li * nh + k].r;
                double v[5] = {r.Rtphi, r.Rrphi, r.Rthetaphi, r.closed, r.closed};
                e.value.push_back(v[q]);
            }
            e.order = pair_orders(e.value);
            rep.entries.push_back(e);
        }
    }
    ConvergenceEntry st{"beta1_static_drift", "beta:1", hs, {}, {}};
    for (int k = 0; k < nh; ++k) st.value.push_back(statics[k].max_drift);
    st.order = pair_orders(st.value);
    rep.entries.push_back(st);
    return rep;
}

int run_converge(const RunConfig& cfg, const fs::path& out)
{
    return guarded([&] {
        auto t0 = std::chrono::steady_clock::now();
        ConvergenceReport rep = convergence_study(cfg, cfg.jobs);
        std::string csv = "quantity,mode,h_coarse,h_fine,value_coarse,value_fine,order\n";
        for (const auto& e : rep.entries) {
            for (size_t k = 0; k + 1 < e.value.size(); ++k) {
                csv += e.quantity + "," + e.mode + "," + num(e.h[k]) + "," + num(e.h[k + 1]) + "," + num(e.value[k]) +
                       "," + num(e.value[k + 1]) + "," + (k < e.order.size() ? num(e.order[k]) : "N/A") + "\n";
            }
        }
        write_file(out / "convergence.csv", csv);
        nlohmann::json j = base_manifest(cfg);
        j["entries"] = rep.to_json();
        j["T"] = cfg.converge_T;
        j["residual_time"] = cfg.converge_residual_time;
        write_file(out / "convergence.json", j.dump(2) + "\n");
        nlohmann::json m = base_manifest(cfg);
        m["files"] = {"convergence.csv", "convergence.json"};
        write_file(out / "manifest.json", m.dump(2) + "\n");
        write_file(out / "config.ini", to_ini(cfg));
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& e : rep.entries) {
            std::cout << e.quantity << " [" << e.mode << "] orders:";
            if (e.order.empty()) std::cout << " N/A";
            for (double o : e.order) std::cout << " " << o;
            std::cout << "\n";
        }
        std::cout << "converge: " << secs << " s\n";
        return kOk;
    });
}

KerrStudy kerr_study(const RunConfig& cfg)
{
    Background bg(cfg.M);
    Grid g = make_grid(bg, cfg.x_min, cfg.x_max, cfg.h);
    std::vector<RadialPoint> pts;
    std::vector<double> beta1;
    for (const auto& p : g.pts) {
        if (p.r < cfg.kerr_r_min * cfg.M || p.r > cfg.kerr_r_max * cfg.M) continue;
        double b = 0.0;
        if (cfg.kerr_profile == "c1" || cfg.kerr_profile == "mixed") b += cfg.kerr_C1 * beta1_basis_c1(p.r);
        if (cfg.kerr_profile == "c2" || cfg.kerr_profile == "mixed") b += cfg.kerr_C2 * beta1_basis_c2(bg, p);
        pts.push_back(p);
        beta1.push_back(b);
    }
    if (pts.size() < 16) throw ConfigError("kerr radii select fewer than 16 grid nodes");

    KerrStudy ks;
    if (cfg.kerr_T > 0.0 && (cfg.kerr_profile == "c1" || cfg.kerr_profile == "mixed")) {
        EvolverOptions eo;
        eo.scheme = cfg.scheme;
        eo.dt = cfg.effective_dt();
        ks.statics = verify_beta1_static(bg, g, static_beta1_data(g, cfg.kerr_C1), eo, cfg.kerr_T);
    }
    ks.fit = fit_kerr(bg, pts, beta1);
    try {
        ks.norm = normalize_kerr(bg, pts, beta1);
        ks.idempotent_increment = normalize_kerr(bg, pts, ks.norm.normalized).fit.a1;
    } catch (const NotAsymptoticallyFlat& e) {
        ks.rejected = true;
        ks.message = e.what();
    }
    return ks;
}

int run_normalize_kerr(const RunConfig& cfg, const fs::path& out)
{
    return guarded([&] {
        KerrStudy ks = kerr_study(cfg);
        nlohmann::json j = {{"C1", ks.fit.C1},
                            {"C2", ks.fit.C2},
                            {"a1", ks.rejected ? nlohmann::json(nullptr) : nlohmann::json(ks.fit.a1)},
                            {"tolerance", ks.fit.tolerance},
                            {"c2_measure", ks.fit.c2_measure},
                            {"verdict", ks.rejected ? "rejected: not asymptotically flat" : "accepted"},
                            {"fit_residual", ks.fit.residual},
                            {"profile", cfg.kerr_profile},
                            {"config_hash", config_hash(cfg)}};
        if (!ks.rejected) {
            j["post_norm"] = ks.norm.post_norm;
            j["idempotent_increment"] = ks.idempotent_increment;
        }
        if (ks.statics.T > 0.0)
            j["static_check"] = {{"T", ks.statics.T}, {"max_ft", ks.statics.max_ft}, {"max_drift", ks.statics.max_drift}};
        write_file(out / "kerr_fit.json", j.dump(2) + "\n");
        nlohmann::json m = base_manifest(cfg);
        m["files"] = {"kerr_fit.json"};
        write_file(out / "manifest.json", m.dump(2) + "\n");
        if (ks.rejected) {
            std::cerr << ks.message << "\n";
            return kVerifyFail;
        }
        std::cout << "a1 = " << ks.fit.a1 << " (C1 = " << ks.fit.C1 << ", C2 = " << ks.fit.C2
                  << "), residual after normalization " << ks.norm.post_norm << "\n";
        return kOk;
    });
}

nlohmann::json verify_report(const RunConfig& cfg, bool& pass)
{
    Background bg(cfg.M);
    nlohmann::json checks = nlohmann::json::array();
    pass = true;
    for (const auto& c : run_identity_suite(identity_options(cfg))) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        pass = pass && c.pass;
    }
    ZcoefBracket zb = zcoef_sign_scan(bg);
    const bool zok = zb.positive_near_horizon && zb.positive_far;
    pass = pass && zok;
    checks.push_back({{"name", "z_coefficient_bracket"},
                      {"pass", zok},
                      {"detail", {{"r_inner", zb.r_inner}, {"r_outer", zb.r_outer}}}});
    nlohmann::json j;
    j["checks"] = checks;

    RedshiftCert rc = build_redshift(bg, cfg.redshift);
    RedshiftParams dbl = cfg.redshift;
    dbl.samples *= 2;
    RedshiftCert rd = certify_redshift(bg, dbl, rc.N.delta1, rc.N.delta2);
    const double stab = std::abs(rd.c - rc.c) / std::abs(rc.c);
    const double kappa_ref = 1.0 / (4.0 * cfg.M);
    nlohmann::json r = {{"delta1", rc.N.delta1},
                        {"delta2", rc.N.delta2},
                        {"c", rc.c},
                        {"C", rc.C},
                        {"c_at_r", rc.c_at_r},
                        {"equiv_lo", rc.equiv_lo},
                        {"equiv_hi", rc.equiv_hi},
                        {"timelike", rc.timelike},
                        {"kappa", rc.kappa},
                        {"kappa_expected", kappa_ref},
                        {"samples", rc.samples},
                        {"c_doubled", rd.c},
                        {"samples_doubled", rd.samples},
                        {"relative_change", stab},
                        {"r0", cfg.redshift.r0 * cfg.M},
                        {"R0", cfg.redshift.R0 * cfg.M},
                        {"lmax", cfg.redshift.lmax}};
    const bool rok = rc.found && rd.found && stab <= 0.1 && std::abs(rc.kappa - kappa_ref) < 1e-8;
    r["pass"] = rok;
    j["redshift"] = r;
    pass = pass && rok;
    j["pass"] = pass;
    j["config_hash"] = config_hash(cfg);
    return j;
}

int run_verify(const RunConfig& cfg, const fs::path& out)
{
    return guarded([&] {
        bool pass = false;
        nlohmann::json j = verify_report(cfg, pass);
        nlohmann::json ids = {{"checks", j["checks"]}, {"pass", pass}, {"config_hash", j["config_hash"]}};
        write_file(out / "identities.json", ids.dump(2) + "\n");
        nlohmann::json rs = j["redshift"];
        rs["config_hash"] = j["config_hash"];
        write_file(out / "redshift_cert.json", rs.dump(2) + "\n");
        nlohmann::json m = base_manifest(cfg);
        m["files"] = {"identities.json", "redshift_cert.json"};
        write_file(out / "manifest.json", m.dump(2) + "\n");
        for (const auto& c : j["checks"]) {
            std::cout << (c["pass"].get<bool>() ? "pass  " : "FAIL  ") << c["name"].get<std::string>() << "\n";
            if (!c["pass"].get<bool>()) std::cout << "      " << c["detail"].dump() << "\n";
        }
        std::cout << (rs["pass"].get<bool>() ? "pass  " : "FAIL  ") << "redshift c = " << rs["c"] << " at (delta1, delta2) = ("
                  << rs["delta1"] << ", " << rs["delta2"] << ")\n";
        return pass ? kOk : kVerifyFail;
    });
}

int run_study(const RunConfig& cfg, const fs::path& out)
{
    if (cfg.study == "evolve") return run_evolve(cfg, out);
    if (cfg.study == "verify") return run_verify(cfg, out);
    if (cfg.study == "decay") return run_decay(cfg, out);
    if (cfg.study == "converge") return run_converge(cfg, out);
    if (cfg.study == "normalize-kerr") return run_normalize_kerr(cfg, out);
    std::cerr << "config error: unknown study '" << cfg.study << "'\n";
    return kBadConfig;
}

}  // namespace axial
