#pragma once

#include <array>
#include <string>
#include <vector>

#include "axial/rational.hpp"
#include "json.hpp"

namespace axial {

// coefficients of M^5, M^4 r, ..., r^5 in a numerator over 4 r^8
using Quintic = std::array<long, 6>;
inline constexpr Quintic kBaseQuintic{-534, -244, 304, 118, -105, 16};
inline constexpr Quintic kPostQuintic{-534, -172, 400, 102, -137, 24};

struct CheckResult {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

// symbolic building blocks, all exact in (M, r, L)
RatFunc sym_A();
RatFunc sym_mu();
RatFunc sym_rstar();
RatFunc sym_Delta();
RatFunc sym_fX();
RatFunc sym_fX_prime_quoted();
RatFunc sym_V();
RatFunc sym_W();
RatFunc sym_box_quoted();  // the quoted d'Alembertian of the X weight
RatFunc sym_box_direct();  // static radial box of the same weight
RatFunc quintic_over_r8(const Quintic& q);

CheckResult check_f_identities();
CheckResult check_base_coefficient(const Quintic& q = kBaseQuintic);
CheckResult check_post_poincare(const Quintic& q = kPostQuintic);
CheckResult check_reduction_identity(int lmax = 8);
CheckResult check_poincare_constants(int lmax = 8);
CheckResult check_z_coefficient();

struct IdentityOptions {
    Quintic base = kBaseQuintic;
    Quintic post = kPostQuintic;
    int lmax = 8;
};

std::vector<CheckResult> run_identity_suite(const IdentityOptions& opt = {});

}  // namespace axial
