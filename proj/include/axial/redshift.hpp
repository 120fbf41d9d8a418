#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "axial/geometry.hpp"

namespace axial {

struct RedshiftParams {
    double r0 = 3.0;   // units of M
    double R0 = 10.0;  // units of M
    double eps = 1e-6; // innermost sample is 2M + eps M
    int samples = 400; // radii per interval
    int lmax = 8;
    std::vector<double> delta1_grid{0.1, 0.2, 0.5, 1.0, 2.0};
    std::vector<double> delta2_frac{0.1, 0.25, 0.5, 0.75, 0.9};
};

// N = a(r) d_t* + b(r) d_r with a = 1 + delta1 ((r-2M)/M) q(r), b = -delta2 q(r),
// q = 1 - S((r-2M)/(R0-2M)) and S a C-infinity step. N = T for r >= R0.
class Redshift {
public:
    Redshift() = default;
    Redshift(const Background& bg, double R0, double delta1, double delta2);

    double a(double r) const;
    double b(double r) const;
    double a_r(double r) const;
    double b_r(double r) const;
    double q(double r) const;
    double q_r(double r) const;
    double norm2(double r) const;  // g(N, N)

    double M = 1.0, R0 = 10.0, delta1 = 0.0, delta2 = 0.0;
};

// quadratic forms in (f_t*, f_r, f) for one mode at radius r
struct RedshiftForms {
    Eigen::Matrix3d K, JN, JT;
};
RedshiftForms redshift_forms(const Background& bg, const Redshift& N, double r, double Lambda, double P,
                             double P_r);

struct RedshiftCert {
    Redshift N;
    double c = 0.0;          // min eig(K, J^N.N) on [2M + eps, r0]
    double C = 0.0;          // max |eig(K, J^T.T)| on [r0, R0]
    double equiv_lo = 0.0;   // J^N.N / J^T.T bounds on [r0, R0]
    double equiv_hi = 0.0;
    double c_at_r = 0.0;
    bool timelike = false;
    double kappa = 0.0;
    int samples = 0;
    bool found = false;
    std::string diagnostics;
};

RedshiftCert certify_redshift(const Background& bg, const RedshiftParams& p, double delta1, double delta2);
// searches (delta1, delta2); throws std::runtime_error if no pair certifies c > 0
RedshiftCert build_redshift(const Background& bg, const RedshiftParams& p);

double surface_gravity(const Background& bg);

}  // namespace axial
