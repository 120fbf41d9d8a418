#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "axial/config.hpp"
#include "axial/energy.hpp"
#include "axial/fields.hpp"
#include "axial/geometry.hpp"
#include "axial/grid.hpp"
#include "axial/redshift.hpp"
#include "json.hpp"

namespace axial {

enum ExitCode { kOk = 0, kVerifyFail = 1, kBadConfig = 2, kBoundary = 3 };

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown after all workers stop.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

struct EnergyRow {
    double tau = 0.0;
    int l = 0;
    double E_T = 0.0, E_Z = 0.0, E_Zw = 0.0, E_Zdec = 0.0;
    bool has_sigma = false, has_tilde = false;
    double E_N_sigma = 0.0, E_N_tilde = 0.0, sup_abs_f = 0.0, tau2_EN = 0.0, tau_sup = 0.0;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u, v;
};

struct ModeStudy {
    ModeIndex mode;
    std::vector<EnergyRow> rows;
    std::vector<MorawetzWindow> windows;
    double min_integrand = 0.0;
    bool compact = true;         // false for static data; decay claims do not apply
    InitialEnergies E;
    double E_T0 = 0.0;
    double E_N_sigma0 = 0.0;
    double t_final = 0.0;
    std::vector<Snapshot> trajectory;
};

// shared, immutable inputs of every mode job
struct StudyContext {
    RunConfig cfg;
    Background bg;
    Grid grid;
    Foliation foliation;
    RedshiftCert redshift;
    explicit StudyContext(const RunConfig& c);
};

InitialData make_initial_data(const StudyContext& ctx, const ModeIndex& m);
// Throws BoundaryContact if the data's causal range leaves the grid.
ModeStudy run_mode_study(const StudyContext& ctx, const ModeIndex& m, double T);

struct ConvergenceEntry {
    std::string quantity, mode;
    std::vector<double> h, value;
    std::vector<double> order;  // one per consecutive pair; empty when undefined
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    nlohmann::json to_json() const;
};

ConvergenceReport convergence_study(const RunConfig& cfg, int jobs);

struct KerrStudy {
    KerrNormalization norm;
    KerrFit fit;
    bool rejected = false;
    std::string message;
    double idempotent_increment = 0.0;
    Beta1Static statics;
};
KerrStudy kerr_study(const RunConfig& cfg);

nlohmann::json verify_report(const RunConfig& cfg, bool& pass);

// CLI entry points; each writes into `out` and returns an ExitCode
int run_evolve(const RunConfig& cfg, const std::filesystem::path& out);
int run_verify(const RunConfig& cfg, const std::filesystem::path& out);
int run_decay(const RunConfig& cfg, const std::filesystem::path& out);
int run_converge(const RunConfig& cfg, const std::filesystem::path& out);
int run_normalize_kerr(const RunConfig& cfg, const std::filesystem::path& out);
int run_study(const RunConfig& cfg, const std::filesystem::path& out);

// verdicts shared by the decay and boundedness checks
double max_over(const std::vector<EnergyRow>& rows, double lo, double hi,
                const std::function<double(const EnergyRow&)>& f);
bool later_half_not_above(const std::vector<EnergyRow>& rows, double lo, double hi,
                          const std::function<double(const EnergyRow&)>& f);

// E^{Z,w} after tau_transient never exceeds its value there by more than tol (relative)
bool z_weighted_nongrowing(const std::vector<EnergyRow>& rows, double tau_transient, double tol);
// transient length used for the verdict; 0 when the run is too short to judge
double z_transient(double T);

std::string energies_csv(const std::vector<EnergyRow>& rows);
std::string bulk_csv(const std::vector<MorawetzWindow>& w, double E_T0);
std::string residuals_csv(const std::vector<ResidualRow>& rows);
std::string trajectory_csv(const Grid& g, const Snapshot& s);

}  // namespace axial
