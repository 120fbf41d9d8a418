#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axial/geometry.hpp"
#include "axial/grid.hpp"

namespace axial {

enum class FieldKind { Alpha, Beta };

struct ModeIndex {
    FieldKind field = FieldKind::Alpha;
    int l = 2;

    int spin() const { return field == FieldKind::Alpha ? 2 : 1; }
    int Lambda() const { return l * (l + 1) - spin() * spin(); }
    std::string tag() const { return field == FieldKind::Alpha ? "alpha" : "beta"; }
    void validate() const;
};

// potential of the per-mode equation: 4A/r^2 for alpha, (1 - 8M/r)/r^2 for beta
double field_potential(const Background& bg, FieldKind k, double r);
double field_potential_dr(const Background& bg, FieldKind k, double r);

// A (l(l+1)/r^2 - 6M/r^3), the potential of u = r f in (t, r*)
double reduced_potential_at(const Background& bg, int l, const RadialPoint& p);
std::vector<double> reduced_potential(const Background& bg, const ModeIndex& m, const Grid& g);

class BoundaryContact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BumpParams {
    double amplitude = 1.0;
    double center = 5.0;   // r*, units of M
    double width = 2.0;    // sigma, units of M
    double velocity = 0.0; // 0 gives time-symmetric data; +1 outgoing, -1 ingoing
};

// smooth bump times a C-infinity cutoff that switches off between 6 and 8 sigma
double bump_profile(const BumpParams& b, double x);
double bump_profile_dx(const BumpParams& b, double x);
double bump_support_radius(const BumpParams& b);

struct InitialData {
    std::vector<double> u, v;  // u = r f and its time derivative
    bool stationary = false;
    double support_lo = 0.0, support_hi = 0.0;
};

InitialData gaussian_initial_data(const Grid& g, const BumpParams& b);
InitialData static_beta1_data(const Grid& g, double C1);
InitialData zero_initial_data(const Grid& g);
// Throws if the data cannot stay clear of the grid ends for time T.
void check_causal_fit(const Grid& g, const InitialData& d, double T, double margin);

struct EvolverOptions {
    int scheme = 2;           // 2: velocity Verlet + 3 point, 4: RK4 + 5 point
    double dt = 0.05;
    bool detect_boundary = true;
    int guard_width = 40;     // nodes at each end watched for contact
    double contact_tol = 1e-10;
};

class Evolver {
public:
    Evolver(const Grid& g, std::vector<double> Veff, const EvolverOptions& opt);

    void set_state(const std::vector<double>& u, const std::vector<double>& v);
    void step();

    double time() const { return t_; }
    long steps() const { return steps_; }
    double dt() const { return opt_.dt; }
    int half_width() const { return opt_.scheme / 2; }
    const Grid& grid() const { return g_; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& Veff() const { return V_; }

    void accel(const std::vector<double>& u, std::vector<double>& out) const;
    double boundary_deviation() const;
    void check_boundary() const;

private:
    const Grid& g_;
    std::vector<double> V_;
    EvolverOptions opt_;
    std::vector<double> u_, v_, a_, u0_;
    std::vector<double> k1u_, k1v_, k2u_, k2v_, k3u_, k3v_, k4u_, k4v_, tu_, tv_;
    double t_ = 0.0, scale_ = 0.0;
    long steps_ = 0;
};

// state before and after one step, handed to observers
struct StepView {
    double t0, t1;
    const std::vector<double>& u0;
    const std::vector<double>& v0;
    const std::vector<double>& a0;
    const std::vector<double>& u1;
    const std::vector<double>& v1;
    const std::vector<double>& a1;
};

using StepObserver = std::function<void(const StepView&)>;

// Advances to T, calling each observer after every step. Observers may throw.
void run_to(Evolver& ev, double T, const std::vector<StepObserver>& observers, int boundary_check_every = 20);

double default_dt(double h, double cfl);
void check_cfl(double h, double dt, double cfl_max = 0.9);

}  // namespace axial
