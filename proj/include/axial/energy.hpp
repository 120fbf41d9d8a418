#pragma once

#include <vector>

#include "axial/evolution.hpp"
#include "axial/geometry.hpp"
#include "axial/grid.hpp"
#include "axial/slices.hpp"

namespace axial {

class Redshift;

// f = u/r and its (t, r*) derivatives on a set of nodes
struct FieldSamples {
    std::vector<double> x, r, A, f, ft, fx, hprime;
    double h = 0.0;  // node spacing in r*
    size_t size() const { return x.size(); }
};

FieldSamples samples_from_state(const Grid& g, const std::vector<double>& u, const std::vector<double>& v,
                                int fd_order = 8);
FieldSamples samples_from_slice(const Grid& g, const SliceData& s);

struct Stress {
    double tt, tx, xx;
};

// sphere-integrated stress of one mode with potential term Q = Lambda/r^2 + P
Stress mode_stress(double f, double ft, double fx, double A, double Q);

struct ModePotential {
    FieldKind kind;
    int Lambda;
    double P(const Background& bg, double r) const { return field_potential(bg, kind, r); }
    double Q(const Background& bg, double r) const { return Lambda / (r * r) + P(bg, r); }
};
ModePotential mode_potential(const ModeIndex& m);

// multiplier components along d_t and d_r* at each node
struct Multiplier {
    std::vector<double> ct, cx;
};
Multiplier multiplier_T(const FieldSamples& s);
Multiplier multiplier_N(const Background& bg, const FieldSamples& s, const Redshift& N);

// integrand r^2 (J_t + h' J_x) of J = T(C, .) through t = tau + h(r*)
std::vector<double> flux_density(const Background& bg, const ModePotential& mp, const FieldSamples& s,
                                 const Multiplier& C);
// throws if any |h'| >= 1
double flux_through_graph(const Background& bg, const ModePotential& mp, const FieldSamples& s,
                          const Multiplier& C);
double t_energy(const Background& bg, const ModePotential& mp, const FieldSamples& s);

// X multiplier pieces
double x_f(double M, double r);
double x_fprime(double M, double r);  // d/dr*
double x_weight(double M, double r);  // f' + 2 f A / r
double x_base_coefficient(const Background& bg, FieldKind k, double r);

struct MorawetzWindow {
    double t_end = 0.0;
    double lhs = 0.0, k_int = 0.0;
    double lhs_grad = 0.0, lhs_zero = 0.0, lhs_ang = 0.0;
};

// time-integrated Morawetz quantities, accumulated every step with the trapezoid rule
class MorawetzAccumulator {
public:
    MorawetzAccumulator(const Background& bg, const Grid& g, const ModeIndex& m, std::vector<double> checkpoints);
    void start(const std::vector<double>& u, double t0);
    StepObserver observer();

    const std::vector<MorawetzWindow>& windows() const { return windows_; }
    double min_integrand() const { return min_integrand_; }
    MorawetzWindow current() const { return acc_; }

private:
    struct Pieces {
        double grad, zero, ang, k;
    };
    Pieces pieces(const std::vector<double>& u);

    const Background& bg_;
    const Grid& g_;
    ModeIndex m_;
    ModePotential mp_;
    std::vector<double> checkpoints_;
    size_t next_ = 0;
    Pieces last_{};
    MorawetzWindow acc_;
    std::vector<MorawetzWindow> windows_;
    double min_integrand_ = 0.0;
    std::vector<double> wgrad_, wzero_, wang_, kgrad_, kzero_;
};

struct ZEnergies {
    double direct = 0.0, weighted = 0.0, decomposed = 0.0;
};
ZEnergies z_energies(const Background& bg, const ModePotential& mp, const FieldSamples& s, double t);

struct InitialEnergies {
    double E0 = 0.0, E1 = 0.0, E2 = 0.0;
};
// throws std::domain_error if the weighted integrand does not die off at the window's outer end
InitialEnergies initial_energies(const Background& bg, const ModeIndex& m, const FieldSamples& s,
                                 const Redshift& N);

struct ZcoefBracket {
    double r_inner = 0.0, r_outer = 0.0;
    bool positive_near_horizon = false, positive_far = false;
};
double zcoef_factor(double M, double r);  // (2r - 8M) log((r-2M)/M) - 7r + 12M
double zcoef(double M, double t, double r);
ZcoefBracket zcoef_sign_scan(const Background& bg, double tol = 1e-12);

}  // namespace axial
