#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "axial/harness.hpp"
#include "doctest.h"

using namespace axial;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("axial_unit_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

RunConfig zero_config(const std::string& study, double T)
{
    RunConfig c = parse_config("[grid]\nx_min = -60\nx_max = 120\nh = 0.2\nT = " + std::to_string(T) +
                                   "\n[data]\nkind = zero\n[modes]\nlist = alpha:2, beta:2\ncoupled = false\n"
                                   "[energy]\nsigma_x_hi = 100\nmorawetz_windows = 10, 20\n[output]\nsnapshot_every = 5\n"
                                   "trajectory_every = 10\n",
                               study);
    c.jobs = 2;
    return c;
}

EnergyRow row(double tau, double zw)
{
    EnergyRow r;
    r.tau = tau;
    r.E_Zw = zw;
    return r;
}

}  // namespace

TEST_CASE("parallel_for visits every index once and rethrows")
{
    for (int jobs : {1, 3, 16}) {
        std::vector<std::atomic<int>> hits(100);
        parallel_for(100, jobs, [&](int i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(50, 4, [](int i) {
                        if (i == 17) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    parallel_for(0, 4, [](int) { FAIL("called"); });
}

TEST_CASE("window verdict helpers")
{
    std::vector<EnergyRow> rows;
    for (int k = 0; k <= 20; ++k) rows.push_back(row(10.0 * k, 5.0 - 0.1 * k));
    auto zw = [](const EnergyRow& r) { return r.E_Zw; };
    CHECK(max_over(rows, 50, 100, zw) == doctest::Approx(4.5));
    CHECK(later_half_not_above(rows, 0, 200, zw));
    rows.back().E_Zw = 10.0;
    CHECK_FALSE(later_half_not_above(rows, 0, 200, zw));

    std::vector<EnergyRow> z{row(0, 9), row(50, 1), row(100, 2), row(150, 2.001), row(200, 1.5)};
    CHECK(z_weighted_nongrowing(z, 100, 1e-3));
    z[3].E_Zw = 2.01;
    CHECK_FALSE(z_weighted_nongrowing(z, 100, 1e-3));
    CHECK_FALSE(z_weighted_nongrowing(z, 500, 1e-3));
    CHECK(z_transient(100) == 0.0);
    CHECK(z_transient(470) == 100.0);
}

TEST_CASE("CSV headers")
{
    CHECK(first_line(energies_csv({})) == "tau,ell,E_T,E_N_sigma,E_N_tilde,E_Z,E_Zw,sup_abs_f,tau2_EN,tau_sup");
    CHECK(first_line(bulk_csv({}, 1.0)) == "window,lhs_grad,lhs_zero,lhs_ang,lhs,K_int,ratio_to_ET0");
    CHECK(first_line(residuals_csv({})) == "t,ell,res_Rtphi,res_Rrphi,res_Rthetaphi,res_closed");
    Background bg(1.0);
    Grid g = make_grid(bg, -10, 10, 0.5);
    Snapshot s{0.0, std::vector<double>(g.n, 0.0), std::vector<double>(g.n, 0.0)};
    std::string t = trajectory_csv(g, s);
    CHECK(first_line(t) == "r_star,r,re_f,im_f,re_f_t,im_f_t");
    CHECK(std::count(t.begin(), t.end(), '\n') == g.n + 1);
}

TEST_CASE("zero data: evolve writes exact zeros and exits cleanly")
{
    fs::path out = scratch("evolve");
    RunConfig c = zero_config("evolve", 20);
    REQUIRE(run_evolve(c, out) == kOk);
    for (const char* f : {"manifest.json", "config.ini", "foliation.csv", "alpha_l2/energies.csv",
                          "alpha_l2/bulk.csv", "alpha_l2/summary.json", "beta_l2/manifest.json"})
        CHECK(fs::exists(out / f));
    auto s = nlohmann::json::parse(slurp(out / "alpha_l2/summary.json"));
    CHECK(s["E_T0"] == 0.0);
    CHECK(s["E_T_drift"] == 0.0);
    CHECK(s["z_ratio_min"] == "N/A");
    CHECK(s["morawetz_min_integrand"] == 0.0);
    std::istringstream en(slurp(out / "alpha_l2/energies.csv"));
    std::string line;
    std::getline(en, line);
    int n = 0;
    while (std::getline(en, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        CHECK(std::stod(cell) == 0.0);
        ++n;
    }
    CHECK(n == 5);
    CHECK(parse_config(slurp(out / "config.ini")).study == "evolve");
    fs::remove_all(out);
}

TEST_CASE("outputs are byte-identical across runs and thread counts")
{
    RunConfig c = parse_config("[grid]\nx_min = -60\nx_max = 120\nh = 0.2\nT = 20\n[modes]\nlist = alpha:2, beta:3\n"
                               "coupled = true\n[energy]\nsigma_x_hi = 100\nmorawetz_windows = 10, 20\n",
                               "evolve");
    fs::path a = scratch("det_a"), b = scratch("det_b");
    c.jobs = 1;
    REQUIRE(run_evolve(c, a) == kOk);
    c.jobs = 4;
    REQUIRE(run_evolve(c, b) == kOk);
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        fs::path rel = fs::relative(e.path(), a);
        if (rel == "config.ini" || rel.filename() == "manifest.json" || rel.filename() == "summary.json") continue;
        INFO(rel.string());
        CHECK(slurp(e.path()) == slurp(b / rel));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("boundary contact exits with code 3")
{
    fs::path out = scratch("boundary");
    RunConfig c = parse_config("[grid]\nx_min = -30\nx_max = 30\nh = 0.2\nT = 50\n[modes]\nlist = alpha:2\n"
                               "coupled = false\n[energy]\nsigma_x_hi = 20\nmorawetz_windows = 10\n",
                               "evolve");
    CHECK(run_evolve(c, out) == kBoundary);
    fs::remove_all(out);
}

TEST_CASE("verify passes and a mutated coefficient fails")
{
    fs::path out = scratch("verify");
    RunConfig c = config_from_map({}, "verify");
    CHECK(run_verify(c, out) == kOk);
    auto ids = nlohmann::json::parse(slurp(out / "identities.json"));
    CHECK(ids["pass"] == true);
    c.mutate = "base:0:-533";
    CHECK(run_verify(c, out) == kVerifyFail);
    fs::remove_all(out);
}

TEST_CASE("zero-data converge reports undefined orders")
{
    RunConfig c = config_from_map({{"data.kind", "zero"}, {"converge.T", "10"}, {"converge.residual_time", "5"},
                                   {"grid.x_min", "-60"}, {"grid.x_max", "80"}, {"modes.list", "alpha:2"}},
                                  "converge");
    auto rep = convergence_study(c, 2);
    REQUIRE(!rep.entries.empty());
    for (const auto& e : rep.entries)
        if (e.quantity != "beta1_static_drift") {
            INFO(e.quantity);
            CHECK(e.order.empty());
        }
}

TEST_CASE("kerr study rejects a growing profile")
{
    RunConfig c = config_from_map(
        {{"grid.x_min", "-50"}, {"grid.x_max", "200"}, {"kerr.profile", "c2"}, {"kerr.C2", "1e-3"}}, "normalize-kerr");
    KerrStudy k = kerr_study(c);
    CHECK(k.rejected);
    c.kerr_profile = "c1";
    k = kerr_study(c);
    CHECK_FALSE(k.rejected);
    CHECK(k.fit.a1 == doctest::Approx(c.kerr_C1 / (6.0 * c.M)).epsilon(1e-10));
}
