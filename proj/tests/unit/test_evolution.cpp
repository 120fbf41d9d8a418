#include <cmath>

#include "axial/energy.hpp"
#include "axial/evolution.hpp"
#include "axial/grid.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace axial;

namespace {

double gauss(double x) { return std::exp(-0.5 * x * x / 4.0); }

// max error against d'Alembert's solution of u_tt = u_xx with time-symmetric Gaussian data
double flat_error(int scheme, double h, double T)
{
    Background bg(1.0);
    Grid g = make_grid(bg, -60.0, 60.0, h);
    std::vector<double> u(g.n), v(g.n, 0.0), V(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) u[i] = gauss(g.x(i));
    EvolverOptions o;
    o.scheme = scheme;
    o.dt = 0.5 * h;
    Evolver ev(g, V, o);
    ev.set_state(u, v);
    run_to(ev, T, {});
    double err = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double x = g.x(i), t = ev.time();
        err = std::max(err, std::abs(ev.u()[i] - 0.5 * (gauss(x - t) + gauss(x + t))));
    }
    return err;
}

}  // namespace

TEST_CASE("finite differences reach their nominal order")
{
    for (int order : {2, 4, 6, 8}) {
        double e[2];
        for (int k = 0; k < 2; ++k) {
            double h = 0.1 / (1 << k);
            int n = static_cast<int>(std::round(2.0 / h)) + 1;
            std::vector<double> u(n);
            for (int i = 0; i < n; ++i) u[i] = std::sin(-1.0 + i * h);
            int mid = n / 2;
            e[k] = std::abs(fd1_at(u, mid, h, order) - std::cos(-1.0 + mid * h));
        }
        CHECK(oracle::order(e[0], e[1]) == doctest::Approx(order).epsilon(0.08));
    }
    std::vector<double> q{1, 4, 9, 16, 25};
    CHECK(fd2_at(q, 2, 1.0, 2) == doctest::Approx(2.0));
    CHECK(trapezoid({1, 1, 1}, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("reduced potential closed form")
{
    Background bg(1.0);
    for (int l : {1, 2, 5}) {
        for (double x : {-20.0, 0.0, 3.0, 50.0}) {
            RadialPoint p = bg.point(x);
            CHECK(reduced_potential_at(bg, l, p) ==
                  doctest::Approx(p.A * (l * (l + 1.0) / (p.r * p.r) - 6.0 / std::pow(p.r, 3))));
        }
    }
    // the per-mode terms Lambda/r^2 + P agree for alpha and beta at equal l
    for (int l = 2; l <= 6; ++l)
        for (double r : {2.5, 3.0, 12.0}) {
            double qa = (l * (l + 1.0) - 4.0) / (r * r) + field_potential(bg, FieldKind::Alpha, r);
            double qb = (l * (l + 1.0) - 1.0) / (r * r) + field_potential(bg, FieldKind::Beta, r);
            CHECK(qa == doctest::Approx(qb));
            CHECK(qa == doctest::Approx(l * (l + 1.0) / (r * r) - 8.0 / (r * r * r)));
        }
    const double d = 1e-6;
    for (auto k : {FieldKind::Alpha, FieldKind::Beta})
        for (double r : {2.5, 7.0}) {
            double fd = (field_potential(bg, k, r + d) - field_potential(bg, k, r - d)) / (2 * d);
            CHECK(field_potential_dr(bg, k, r) == doctest::Approx(fd).epsilon(1e-7));
        }
}

TEST_CASE("mode index validation")
{
    CHECK_THROWS(ModeIndex{FieldKind::Alpha, 1}.validate());
    CHECK_NOTHROW(ModeIndex{FieldKind::Beta, 1}.validate());
    CHECK(ModeIndex{FieldKind::Alpha, 2}.Lambda() == 2);
    CHECK(ModeIndex{FieldKind::Beta, 2}.Lambda() == 5);
}

TEST_CASE("schemes converge to d'Alembert's solution at their order")
{
    double e2a = flat_error(2, 0.2, 20.0), e2b = flat_error(2, 0.1, 20.0);
    CHECK(oracle::order(e2a, e2b) == doctest::Approx(2.0).epsilon(0.1));
    double e4a = flat_error(4, 0.2, 20.0), e4b = flat_error(4, 0.1, 20.0);
    CHECK(oracle::order(e4a, e4b) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("bump data has compact support and the right velocity")
{
    BumpParams b{1.0, 5.0, 2.0, 1.0};
    CHECK(bump_profile(b, 5.0 + 8.01 * 2.0) == 0.0);
    CHECK(bump_profile(b, 5.0 - 8.01 * 2.0) == 0.0);
    CHECK(bump_profile(b, 5.0) == doctest::Approx(1.0));
    CHECK(bump_support_radius(b) <= 16.0 + 1e-12);
    const double d = 1e-6;
    for (double x : {1.0, 5.5, 17.0}) {
        double fd = (bump_profile(b, x + d) - bump_profile(b, x - d)) / (2 * d);
        CHECK(bump_profile_dx(b, x) == doctest::Approx(fd).epsilon(1e-6));
    }
    Background bg(1.0);
    Grid g = make_grid(bg, -50, 50, 0.1);
    auto dd = gaussian_initial_data(g, b);
    for (int i = 0; i < g.n; i += 37) CHECK(dd.v[i] == doctest::Approx(-bump_profile_dx(b, g.x(i))));
    CHECK_THROWS(gaussian_initial_data(g, BumpParams{1.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("energy is conserved to second order")
{
    Background bg(1.0);
    ModeIndex m{FieldKind::Alpha, 2};
    double drift[2];
    for (int k = 0; k < 2; ++k) {
        double h = 0.2 / (1 << k);
        Grid g = make_grid(bg, -150, 150, h);
        auto d = gaussian_initial_data(g, BumpParams{});
        EvolverOptions o;
        o.dt = 0.5 * h;
        Evolver ev(g, reduced_potential(bg, m, g), o);
        ev.set_state(d.u, d.v);
        auto mp = mode_potential(m);
        double e0 = t_energy(bg, mp, samples_from_state(g, d.u, d.v));
        run_to(ev, 60.0, {});
        double e1 = t_energy(bg, mp, samples_from_state(g, ev.u(), ev.v()));
        drift[k] = std::abs(e1 - e0) / e0;
    }
    CHECK(drift[1] < 1e-3);
    CHECK(oracle::order(drift[0], drift[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("boundary contact is detected")
{
    Background bg(1.0);
    Grid g = make_grid(bg, -30, 30, 0.1);
    auto d = gaussian_initial_data(g, BumpParams{});
    CHECK_THROWS_AS(check_causal_fit(g, d, 40.0, 10.0), BoundaryContact);
    CHECK_NOTHROW(check_causal_fit(g, d, 5.0, 1.0));
    EvolverOptions o;
    o.dt = 0.05;
    Evolver ev(g, reduced_potential(bg, ModeIndex{}, g), o);
    ev.set_state(d.u, d.v);
    CHECK_THROWS_AS(run_to(ev, 60.0, {}), BoundaryContact);
}

TEST_CASE("static beta_1 data stays put")
{
    Background bg(1.0);
    Grid g = make_grid(bg, -40, 200, 0.1);
    auto d = static_beta1_data(g, 3.0);
    CHECK(d.stationary);
    EvolverOptions o;
    o.dt = 0.05;
    o.detect_boundary = false;
    Evolver ev(g, reduced_potential(bg, ModeIndex{FieldKind::Beta, 1}, g), o);
    ev.set_state(d.u, d.v);
    run_to(ev, 10.0, {});
    // the interior away from the frozen ends
    double drift = 0.0;
    for (int i = 200; i < g.n - 200; ++i) drift = std::max(drift, std::abs(ev.u()[i] - d.u[i]) / d.u[i]);
    CHECK(drift < 1e-3);
}

TEST_CASE("zero data evolves to zero")
{
    Background bg(1.0);
    Grid g = make_grid(bg, -20, 20, 0.1);
    auto d = zero_initial_data(g);
    EvolverOptions o;
    o.dt = 0.05;
    Evolver ev(g, reduced_potential(bg, ModeIndex{}, g), o);
    ev.set_state(d.u, d.v);
    run_to(ev, 5.0, {});
    CHECK(oracle::max_abs(ev.u()) == 0.0);
    CHECK(oracle::max_abs(ev.v()) == 0.0);
}

TEST_CASE("CFL guard")
{
    CHECK_NOTHROW(check_cfl(0.1, 0.05));
    CHECK_THROWS(check_cfl(0.1, 0.2));
    CHECK(default_dt(0.1, 0.5) == doctest::Approx(0.05));
}
