#include <random>

#include "axial/config.hpp"
#include "doctest.h"

using namespace axial;

namespace {

const char* kEvolve = R"(# comment line
[run]
study = evolve
M = 1
[grid]
x_min = -300
x_max = 300
h = 0.1
T = 100
[modes]
list = alpha:2, beta:3
coupled = true
)";

RunConfig random_config(std::mt19937& rng)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> I(0, 1000);
    RunConfig c;
    c.study = std::vector<std::string>{"evolve", "verify", "decay", "converge", "normalize-kerr"}[I(rng) % 5];
    c.M = 0.5 + U(rng);
    c.scheme = I(rng) % 2 ? 4 : 2;
    c.jobs = 1 + I(rng) % 8;
    c.x_min = -200.0 - 300.0 * U(rng);
    c.x_max = 200.0 + 300.0 * U(rng);
    c.h = 0.05 + 0.2 * U(rng);
    c.cfl = 0.1 + 0.8 * U(rng);
    c.T = 250.0 * c.M + 100.0 * U(rng);
    c.modes = {{FieldKind::Alpha, 2 + I(rng) % 4}, {FieldKind::Beta, 1 + I(rng) % 4}};
    c.coupled = I(rng) % 2;
    c.bump.center = 10.0 * U(rng);
    c.bump.velocity = U(rng) - 0.5;
    c.beta_bump.amplitude = U(rng);
    c.morawetz_windows = {100.0 * (1 + U(rng)), 400.0 * (1 + U(rng))};
    c.redshift.delta1_grid = {U(rng), 1 + U(rng)};
    c.kerr_profile = std::vector<std::string>{"c1", "c2", "mixed", "zero"}[I(rng) % 4];
    c.kerr_C2 = U(rng) * 1e-3;
    c.mutate = I(rng) % 3 == 0 ? "post:2:401" : "";
    c.identity_lmax = 2 + I(rng) % 8;
    return c;
}

}  // namespace

TEST_CASE("INI parsing with sections and comments")
{
    RunConfig c = parse_config(kEvolve);
    CHECK(c.study == "evolve");
    CHECK(c.h == 0.1);
    REQUIRE(c.modes.size() == 2);
    CHECK(c.modes[1].field == FieldKind::Beta);
    CHECK(c.modes[1].l == 3);
    CHECK(c.coupled);
    CHECK(c.effective_dt() == doctest::Approx(0.05));
}

TEST_CASE("defaults follow the baseline resolution")
{
    RunConfig c = config_from_map({}, "verify");
    CHECK(c.h == 0.1);
    CHECK(c.cfl == 0.5);
    CHECK(c.x_min == -300.0);
    CHECK(c.x_max == 300.0);
    CHECK(c.scheme == 2);
}

TEST_CASE("canonical form round-trips losslessly")
{
    std::mt19937 rng(1234);
    for (int k = 0; k < 200; ++k) {
        RunConfig c = random_config(rng);
        REQUIRE_NOTHROW(validate(c));
        std::string can = canonical(c);
        RunConfig back = parse_config(can);
        CHECK(canonical(back) == can);
        CHECK(config_hash(back) == config_hash(c));
        RunConfig back2 = parse_config(to_ini(c));
        CHECK(canonical(back2) == can);
    }
}

TEST_CASE("hash is sensitive to every field")
{
    RunConfig a = parse_config(kEvolve), b = a;
    b.h = std::nextafter(b.h, 1.0);
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("study override replaces run.study")
{
    RunConfig c = parse_config(kEvolve, "verify");
    CHECK(c.study == "verify");
}

TEST_CASE("validation errors")
{
    CHECK_THROWS_AS(parse_config("[grid]\nfoo = 1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nstudy = evolve\n[grid]\nx_min = -10\nx_max = 10\nT = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nM = -1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nscheme = 3\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nh = abc\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[modes]\nlist = alpha:1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[modes]\nlist = gamma:2\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\ncfl = 1.5\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[converge]\nh = 0.2, 0.1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[converge]\nh = 0.3, 0.1, 0.05\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[verify]\nmutate = base:9:1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[data]\nkind = static-beta1\n", "verify"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nstudy = launch\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
    // decay needs a long run
    CHECK_THROWS_AS(parse_config(kEvolve, "decay"), ConfigError);
}

TEST_CASE("mutation option parsing")
{
    RunConfig c = parse_config("[verify]\nmutate = post:1:-171\n", "verify");
    IdentityOptions o = identity_options(c);
    CHECK(o.post[1] == -171);
    CHECK(o.base == kBaseQuintic);
}

TEST_CASE("number formatting is exact")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}
