#include <cmath>
#include <random>

#include "axial/energy.hpp"
#include "axial/redshift.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace axial;

namespace {

FieldSamples random_samples(const Background& bg, double x_lo, double x_hi, double h, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double a = U(rng), b = U(rng), c = U(rng), w = 0.3 + 0.2 * (U(rng) + 1.0);
    Grid g = make_grid(bg, x_lo, x_hi, h);
    std::vector<double> u(g.n), v(g.n);
    const double mid = 0.5 * (x_lo + x_hi), sig = 0.08 * (x_hi - x_lo);
    for (int i = 0; i < g.n; ++i) {
        double z = (g.x(i) - mid) / sig, env = std::exp(-z * z);
        u[i] = env * (a + b * std::sin(w * g.x(i)));
        v[i] = env * (c + a * std::cos(w * g.x(i)));
    }
    return samples_from_state(g, u, v);
}

}  // namespace

TEST_CASE("stress trace relations")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        double f = U(rng), ft = U(rng), fx = U(rng), A = 0.5 * (U(rng) + 2.0) / 2.0, Q = U(rng);
        Stress T = mode_stress(f, ft, fx, A, Q);
        CHECK(T.tt + T.xx == doctest::Approx(ft * ft + fx * fx));
        CHECK(T.tt - T.xx == doctest::Approx(A * Q * f * f));
        CHECK(T.tx == doctest::Approx(ft * fx));
    }
}

TEST_CASE("Morawetz weight closed forms")
{
    const double M = 1.0;
    Background bg(M);
    CHECK(x_f(M, 3.0) == 0.0);
    const double d = 1e-6;
    for (double r : {2.2, 3.0, 5.0, 40.0}) {
        double fd = (1.0 - 2.0 * M / r) * (x_f(M, r + d) - x_f(M, r - d)) / (2 * d);
        CHECK(x_fprime(M, r) == doctest::Approx(fd).epsilon(1e-7));
        CHECK(x_weight(M, r) == doctest::Approx(x_fprime(M, r) + 2 * x_f(M, r) * (1 - 2 * M / r) / r));
    }
    // the base quintic at r = 3M is 39/(4 3^8) = 13/8748
    CHECK(x_base_coefficient(bg, FieldKind::Alpha, 3.0) == doctest::Approx(13.0 / 8748.0).epsilon(1e-14));
    // W - V = -3/r^2, so beta differs by 3 M f / r^4 - 3 f A / r^3
    for (double r : {2.5, 3.0, 9.0}) {
        double F = x_f(M, r), A = 1.0 - 2.0 * M / r;
        CHECK(x_base_coefficient(bg, FieldKind::Beta, r) - x_base_coefficient(bg, FieldKind::Alpha, r) ==
              doctest::Approx(3 * M * F / std::pow(r, 4) - 3 * F * A / std::pow(r, 3)));
    }
}

TEST_CASE("T flux through a static slice is the T energy; N equals T beyond R0")
{
    Background bg(1.0);
    auto s = random_samples(bg, 20.0, 60.0, 0.05, 11);
    ModePotential mp = mode_potential(ModeIndex{FieldKind::Alpha, 3});
    Redshift N(bg, 10.0, 1.0, 0.5);
    double eT = t_energy(bg, mp, s);
    CHECK(eT > 0.0);
    CHECK(flux_through_graph(bg, mp, s, multiplier_N(bg, s, N)) == doctest::Approx(eT).epsilon(1e-14));
    s.hprime.assign(s.size(), 1.0);
    CHECK_THROWS_AS(flux_through_graph(bg, mp, s, multiplier_T(s)), std::domain_error);
}

TEST_CASE("N flux density is nonnegative on spacelike graphs")
{
    Background bg(1.0);
    Redshift N = build_redshift(bg, RedshiftParams{}).N;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int seed = 0; seed < 10; ++seed) {
        auto s = random_samples(bg, -12.0, 15.0, 0.05, 100 + seed);
        for (auto& hp : s.hprime) hp = 0.95 * U(rng);
        for (auto kind : {FieldKind::Alpha, FieldKind::Beta}) {
            auto d = flux_density(bg, mode_potential(ModeIndex{kind, 2}), s, multiplier_N(bg, s, N));
            double lo = *std::min_element(d.begin(), d.end());
            CHECK(lo >= -1e-14);
        }
    }
}

TEST_CASE("Stokes on a lens region: T flux through a curved slice equals the initial T energy")
{
    Background bg(1.0);
    ModeIndex m{FieldKind::Alpha, 2};
    ModePotential mp = mode_potential(m);
    double err[2];
    for (int k = 0; k < 2; ++k) {
        double h = 0.2 / (1 << k);
        Grid g = make_grid(bg, -120, 120, h);
        auto d = gaussian_initial_data(g, BumpParams{});
        Slicing s;
        s.name = "lens";
        s.x_lo = -60;
        s.x_hi = 70;
        s.h = [](const RadialPoint& p) { return 8.0 + 6.0 * std::tanh((p.r - 6.0) / 10.0); };
        s.h_prime = [](const RadialPoint& p) {
            double c = std::cosh((p.r - 6.0) / 10.0);
            return 0.6 / (c * c) * p.A;
        };
        SliceSampler sm(g, {{s, 0.0}});
        EvolverOptions o;
        o.dt = 0.5 * h;
        Evolver ev(g, reduced_potential(bg, m, g), o);
        ev.set_state(d.u, d.v);
        run_to(ev, sm.t_max() + o.dt, {sm.forward()});
        double e0 = t_energy(bg, mp, samples_from_state(g, d.u, d.v));
        double e1 = flux_through_graph(bg, mp, samples_from_slice(g, sm.slices()[0]),
                                       multiplier_T(samples_from_slice(g, sm.slices()[0])));
        err[k] = std::abs(e1 - e0) / e0;
    }
    CHECK(err[1] < 1e-3);
    CHECK(oracle::order(err[0], err[1]) > 1.7);
}

TEST_CASE("Z energies: decomposition equals the weighted flux")
{
    Background bg(1.0);
    for (auto kind : {FieldKind::Alpha, FieldKind::Beta})
        for (int seed = 0; seed < 6; ++seed) {
            auto s = random_samples(bg, -40.0 + 10 * seed, 60.0 + 40 * seed, 0.05, 200 + seed);
            auto mp = mode_potential(ModeIndex{kind, 2 + seed % 3});
            for (double t : {0.0, 35.0, 300.0}) {
                ZEnergies z = z_energies(bg, mp, s, t);
                CHECK(z.direct > 0.0);
                CHECK(z.decomposed == doctest::Approx(z.weighted).epsilon(1e-7));
            }
        }
}

TEST_CASE("Z coefficient sign pattern")
{
    const double M = 1.0;
    Background bg(M);
    auto factor = [&](double r) { return (2 * r - 8 * M) * std::log(r / M - 2) - 7 * r + 12 * M; };
    double r1 = oracle::bisect(factor, 2.1, 3.0), r2 = oracle::bisect(factor, 10.0, 100.0);
    ZcoefBracket b = zcoef_sign_scan(bg);
    CHECK(b.r_inner == doctest::Approx(r1).epsilon(1e-10));
    CHECK(b.r_outer == doctest::Approx(r2).epsilon(1e-10));
    CHECK(b.positive_near_horizon);
    CHECK(b.positive_far);
    CHECK(zcoef_factor(M, 4.0) == doctest::Approx(-16.0));
    CHECK(zcoef(M, 0.0, 5.0) == 0.0);
}

TEST_CASE("initial energies carry the Lambda powers and require decay at the window end")
{
    Background bg(1.0);
    Redshift N = build_redshift(bg, RedshiftParams{}).N;
    ModeIndex m{FieldKind::Beta, 2};
    Grid g = make_grid(bg, -60, 100, 0.05);
    auto d = gaussian_initial_data(g, BumpParams{});
    auto s = samples_from_state(g, d.u, d.v);
    InitialEnergies E = initial_energies(bg, m, s, N);
    auto dens = flux_density(bg, mode_potential(m), s, multiplier_N(bg, s, N));
    std::vector<double> dw(dens.size());
    for (size_t i = 0; i < dens.size(); ++i) dw[i] = (1 + s.x[i] * s.x[i]) * dens[i];
    const double L = 5.0, e = trapezoid(dens, g.h), ew = trapezoid(dw, g.h);
    CHECK(E.E0 == doctest::Approx((1 + L + L * L) * e));
    CHECK(E.E1 == doctest::Approx((1 + L + L * L + L * L * L) * ew));
    CHECK(E.E2 == doctest::Approx((std::pow(L, 7) - 1) / (L - 1) * ew));

    // a profile still large at the outer end of the window
    std::vector<double> u(g.n), v(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) u[i] = std::exp(-std::pow((g.x(i) - 95.0) / 5.0, 2));
    CHECK_THROWS_AS(initial_energies(bg, m, samples_from_state(g, u, v), N), std::domain_error);
}

TEST_CASE("Morawetz integrand is nonnegative and windows are recorded")
{
    Background bg(1.0);
    ModeIndex m{FieldKind::Alpha, 2};
    Grid g = make_grid(bg, -80, 80, 0.1);
    auto d = gaussian_initial_data(g, BumpParams{});
    MorawetzAccumulator acc(bg, g, m, {10.0, 20.0});
    acc.start(d.u, 0.0);
    EvolverOptions o;
    o.dt = 0.05;
    Evolver ev(g, reduced_potential(bg, m, g), o);
    ev.set_state(d.u, d.v);
    run_to(ev, 20.0, {acc.observer()});
    REQUIRE(acc.windows().size() == 2);
    CHECK(acc.min_integrand() >= 0.0);
    CHECK(acc.windows()[0].lhs > 0.0);
    CHECK(acc.windows()[1].lhs > acc.windows()[0].lhs);
    CHECK(acc.windows()[1].t_end == doctest::Approx(20.0));
    const auto& w = acc.windows()[1];
    CHECK(w.lhs == doctest::Approx(w.lhs_grad + w.lhs_zero + w.lhs_ang));
}
