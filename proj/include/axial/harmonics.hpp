#pragma once

#include <Eigen/Dense>
#include <vector>

namespace axial {

using Samples = std::vector<double>;

// Gauss-Legendre nodes in x = cos(theta) with a barycentric differentiation matrix.
// Axisymmetric sections at spin s are stored as real coefficients relative to Psi^s.
class SphereGrid {
public:
    explicit SphereGrid(int n = 48);

    int size() const { return static_cast<int>(x_.size()); }
    const Samples& x() const { return x_; }
    const Samples& weights() const { return w_; }

    Samples derivative(const Samples& f) const;
    double interpolate(const Samples& f, double x) const;

private:
    Samples x_, w_, bary_;
    Eigen::MatrixXd D_;
};

double legendre(int l, double x);

// 2 pi sum w f g (1-x^2)^(-s); throws if a pole weight produces a non-finite value
double bundle_inner(const SphereGrid& g, const Samples& f, const Samples& h, int s);
double bundle_norm(const SphereGrid& g, const Samples& f, int s);

Samples eth_raise(const SphereGrid& g, int s, const Samples& f);
Samples eth_lower(const SphereGrid& g, int s, const Samples& f);
Samples angular_laplacian(const SphereGrid& g, int s, const Samples& f);

// int |grad Y|^2 over the unit sphere, with the bundle metric
double dirichlet_integral(const SphereGrid& g, int s, const Samples& f);

// exponent p in f ~ sin(theta)^p from the two nodes nearest each pole; returns the smaller
double pole_exponent(const SphereGrid& g, const Samples& f);
void require_pole_regular(const SphereGrid& g, int s, const Samples& f);

struct HarmonicTable {
    int s = 0, l = 0;
    Samples values;
    double norm = 1.0;
};

HarmonicTable eval_harmonic(const SphereGrid& g, int s, int l);

// closed forms for the ladder constants with the positive-raise convention
double raise_constant(int s, int l);  // eth_raise Y_{s l} = raise * Y_{s+1 l}
double lower_constant(int s, int l);  // eth_lower Y_{s l} = lower * Y_{s-1 l}
inline int angular_eigenvalue(int s, int l) { return l * (l + 1) - s * s; }

// sup over the sphere of |Y Psi^s| = |coefficient| / sin^s
double harmonic_sup(const SphereGrid& g, const HarmonicTable& y);

std::vector<double> project_modes(const SphereGrid& g, int s, const Samples& f, int lmax);
Samples reconstruct(const SphereGrid& g, int s, const std::vector<double>& coeffs);

}  // namespace axial
