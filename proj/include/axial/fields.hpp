#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "axial/evolution.hpp"
#include "axial/geometry.hpp"
#include "axial/grid.hpp"
#include "axial/harmonics.hpp"

namespace axial {

// Axisymmetric connection components on an (r, theta) grid, indexed [radius][node].
struct ConnectionComponents {
    std::vector<double> r;
    std::vector<Samples> Q02, Q03, Q23;
};

// Coefficients of alpha (spin 2), beta (spin 1), gamma (spin 2) on the same grid.
struct AxialFields {
    std::vector<double> r;
    std::vector<Samples> alpha, beta, gamma;
};

// throws std::domain_error if a resulting coefficient is not regular at the poles
AxialFields fields_from_Q(const Background& bg, const SphereGrid& sg, const ConnectionComponents& q);
ConnectionComponents Q_from_fields(const Background& bg, const SphereGrid& sg, const AxialFields& f);
ConnectionComponents kerr_connection(const Background& bg, const SphereGrid& sg, const std::vector<double>& r,
                                     double a1);

// sqrt((l-1)(l+2)), the per-mode factor of the lowering operator in the first-order system
double coupling_constant(int l);

struct ConstraintResiduals {
    double Rtphi = 0.0, Rrphi = 0.0, Rthetaphi = 0.0, closed = 0.0;
    double max() const;
};

// L2 norms on the grid interior of the four first-order equations for one mode, each multiplied
// through by A; the two equations carrying an r^2 gamma term are divided by r^2.
// u = r f for alpha and beta; gamma is the coefficient itself.
ConstraintResiduals constraint_residuals(const Grid& g, int l, const std::vector<double>& ua,
                                         const std::vector<double>& va, const std::vector<double>& ub,
                                         const std::vector<double>& vb, const std::vector<double>& gamma,
                                         const std::vector<double>& gamma_t);

struct ConsistentData {
    int l = 2;
    InitialData alpha, beta;
    std::vector<double> gamma;
};

// alpha(0) and beta(0) free; beta_t, gamma(0), alpha_t from the first-order system.
// Throws std::invalid_argument for l < 2.
ConsistentData consistent_initial_data(const Background& bg, const Grid& g, int l, const BumpParams& alpha,
                                       const BumpParams& beta);

// Integrates gamma_t = alpha_r* + 2 A alpha / r along the alpha evolution, one step at a time,
// with the derivative-corrected trapezoid rule.
class GammaIntegrator {
public:
    GammaIntegrator(const Grid& g, std::vector<double> gamma0);
    StepObserver observer();
    const std::vector<double>& gamma() const { return gamma_; }
    double time() const { return t_; }

    // gamma_t from the alpha state, the right-hand side being integrated
    std::vector<double> rate(const std::vector<double>& ua, const std::vector<double>& va) const;

private:
    const Grid& g_;
    std::vector<double> gamma_;
    double t_ = 0.0;
};

struct ResidualRow {
    double t = 0.0;
    int l = 0;
    ConstraintResiduals r;
};

struct CoupledOptions {
    EvolverOptions evo;
    double T = 100.0;
    double sample_every = 5.0;  // residual output interval
};

struct CoupledResult {
    std::vector<ResidualRow> rows;
    std::vector<double> ua, va, ub, vb, gamma;  // final state
    double t_final = 0.0;
};

// Evolves alpha and beta of one mode, reconstructs gamma, and records the four residuals.
// Residuals at a level use gamma_t from centered differences of stored gamma levels, so the last
// half-stencil of levels is not reported.
CoupledResult run_coupled(const Background& bg, const Grid& g, const ConsistentData& d, const CoupledOptions& opt);

struct KerrFit {
    double C1 = 0.0, C2 = 0.0;
    double a1 = 0.0;
    double c2_measure = 0.0;    // |C2| max|b2|
    double tolerance = 0.0;     // 1e-6 max|beta1|
    bool flat = true;
    double residual = 0.0;      // max |beta1 - C1 b1 - C2 b2|
};

class NotAsymptoticallyFlat : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// least-squares fit of the beta_1 coefficient against the two static solutions
KerrFit fit_kerr(const Background& bg, const std::vector<RadialPoint>& pts, const std::vector<double>& beta1);

struct KerrNormalization {
    KerrFit fit;
    std::vector<double> normalized;
    double post_norm = 0.0;  // max |normalized|
};

// Adds the linearized Kerr solution cancelling the C1 part; throws NotAsymptoticallyFlat.
KerrNormalization normalize_kerr(const Background& bg, const std::vector<RadialPoint>& pts,
                                 const std::vector<double>& beta1);

double beta1_basis_c1(double r);
double beta1_basis_c2(const Background& bg, const RadialPoint& p);

struct Beta1Static {
    double max_ft = 0.0;       // max over the run of the L2 norm of beta_1,t
    double max_drift = 0.0;    // max over the run of |u(t) - u(0)|_2 / |u(0)|_2
    double T = 0.0;
};

Beta1Static verify_beta1_static(const Background& bg, const Grid& g, const InitialData& d,
                                const EvolverOptions& opt, double T);

struct Beta1OdeCheck {
    double c1_residual = 0.0, c2_residual = 0.0, sum_residual = 0.0;
};

// relative residuals of the static beta_1 equation on r in [2.05M, 200M]
Beta1OdeCheck beta1_ode_check(double M);

struct ReductionResidual {
    double covariant = 0.0; // max |covariant radial operator applied to f|
    double reduced = 0.0;   // max |(u_xx - u_tt - V_eff u) / (r A)|
    double mismatch = 0.0;  // max difference of the two
};

// f(t, r) = cos(omega t) profile(r), evaluated at the given radii with fourth-order differences of step h
ReductionResidual reduction_residual_oracle(const Background& bg, const ModeIndex& m,
                                            const std::function<double(double)>& profile, double omega,
                                            double h, const std::vector<double>& radii);

}  // namespace axial
