#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "axial/evolution.hpp"
#include "axial/geometry.hpp"
#include "axial/identities.hpp"
#include "axial/redshift.hpp"

namespace axial {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string study = "evolve";  // evolve | verify | decay | converge | normalize-kerr
    double M = 1.0;
    int scheme = 2;
    int jobs = 1;

    // grid
    double x_min = -300.0, x_max = 300.0, h = 0.1;
    double cfl = 0.5;
    double dt = 0.0;  // 0: cfl * h
    double T = 100.0;
    double margin = 10.0;

    std::vector<ModeIndex> modes{{FieldKind::Alpha, 2}};
    bool coupled = false;

    // initial data
    std::string data_kind = "gaussian";  // gaussian | static-beta1 | zero
    BumpParams bump;
    BumpParams beta_bump{0.0, 5.0, 2.0, 0.0};  // second free profile for the coupled system
    double C1 = 3.0;

    // outputs
    double snapshot_every = 5.0;
    double trajectory_every = 0.0;  // 0: initial and final only
    double sigma_x_lo = -10.0, sigma_x_hi = 250.0;
    std::vector<double> morawetz_windows{200.0, 400.0};
    double residual_every = 5.0;

    FoliationParams foliation;
    RedshiftParams redshift;

    double decay_tau_min = 20.0, decay_tau_max = 200.0;

    std::vector<double> converge_h{0.2, 0.1, 0.05};
    double converge_T = 100.0;
    double converge_residual_time = 50.0;

    std::string kerr_profile = "c1";  // c1 | c2 | mixed | zero
    double kerr_C1 = 3.0, kerr_C2 = 0.0;
    double kerr_r_min = 2.05, kerr_r_max = 200.0;
    double kerr_T = 50.0;

    int identity_lmax = 8;
    std::string mutate;  // "base:<index>:<value>" or "post:<index>:<value>"

    double effective_dt() const { return dt > 0.0 ? dt : cfl * h; }
};

// Parses an INI file; throws ConfigError on unknown keys, malformed values, or failed validation.
// A nonempty `study` overrides run.study before validation.
RunConfig load_config(const std::string& path, const std::string& study = "");
RunConfig parse_config(const std::string& text, const std::string& study = "");
// keys given as "section.key"
RunConfig config_from_map(std::map<std::string, std::string> kv, const std::string& study = "");
void validate(const RunConfig& c);

// sorted section.key = value lines; parse_config(canonical(c)) reproduces c exactly
std::string canonical(const RunConfig& c);
std::string to_ini(const RunConfig& c);
std::string config_hash(const RunConfig& c);  // FNV-1a 64 of the canonical form, hex

IdentityOptions identity_options(const RunConfig& c);

std::string format_double(double v);

}  // namespace axial
