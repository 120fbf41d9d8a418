#include <cmath>

#include "axial/slices.hpp"
#include "doctest.h"

using namespace axial;

namespace {

double g0(double x) { return std::exp(-x * x / 8.0); }
double g1(double x) { return -x / 4.0 * g0(x); }

Slicing wavy(double lo, double hi)
{
    Slicing s;
    s.name = "wavy";
    s.x_lo = lo;
    s.x_hi = hi;
    s.h = [](const RadialPoint& p) { return 3.0 * std::sin(p.r / 7.0); };
    s.h_prime = [](const RadialPoint& p) { return 3.0 / 7.0 * std::cos(p.r / 7.0) * p.A; };
    return s;
}

struct Err {
    double u = 0, ut = 0, ux = 0;
};

// samples of d'Alembert's solution on wavy slices, forward and backward in time
Err slice_error(double h)
{
    Background bg(1.0);
    Grid g = make_grid(bg, -80, 80, h);
    std::vector<double> u(g.n), v(g.n, 0.0), V(g.n, 0.0), vneg(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) u[i] = g0(g.x(i));
    std::vector<SliceRequest> req{{wavy(-20, 20), 4.0}, {wavy(-20, 20), -1.0}, {wavy(-30, 10), 9.5}};
    SliceSampler sm(g, req);
    REQUIRE(sm.needs_backward());
    EvolverOptions o;
    o.dt = 0.5 * h;
    {
        Evolver eb(g, V, o);
        eb.set_state(u, vneg);
        run_to(eb, -sm.t_min(), {sm.backward()});
    }
    Evolver ev(g, V, o);
    ev.set_state(u, v);
    run_to(ev, sm.t_max() + o.dt, {sm.forward()});
    sm.require_complete();
    Err e;
    for (const auto& s : sm.slices())
        for (size_t j = 0; j < s.size(); ++j) {
            double x = s.x[j], t = s.t[j];
            e.u = std::max(e.u, std::abs(s.u[j] - 0.5 * (g0(x - t) + g0(x + t))));
            e.ut = std::max(e.ut, std::abs(s.ut[j] - 0.5 * (-g1(x - t) + g1(x + t))));
            e.ux = std::max(e.ux, std::abs(s.ux[j] - 0.5 * (g1(x - t) + g1(x + t))));
        }
    return e;
}

}  // namespace

TEST_CASE("slice samples converge to the exact solution")
{
    Err a = slice_error(0.2), b = slice_error(0.1);
    CHECK(b.u < 1e-3);
    CHECK(std::log2(a.u / b.u) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(a.ut / b.ut) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(a.ux / b.ux) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("an unfinished run leaves the slice incomplete")
{
    Background bg(1.0);
    Grid g = make_grid(bg, -50, 50, 0.1);
    SliceSampler sm(g, {{wavy(-10, 10), 20.0}});
    std::vector<double> z(g.n, 0.0);
    EvolverOptions o;
    o.dt = 0.05;
    Evolver ev(g, z, o);
    ev.set_state(z, z);
    run_to(ev, 5.0, {sm.forward()});
    CHECK_FALSE(sm.slices()[0].complete());
    CHECK_THROWS_AS(sm.require_complete(), std::logic_error);
}

TEST_CASE("slice windows outside the grid are rejected")
{
    Background bg(1.0);
    Grid g = make_grid(bg, -50, 50, 0.1);
    CHECK_THROWS_AS(SliceSampler(g, {{wavy(100, 200), 0.0}}), std::invalid_argument);
}
