#include "axial/identities.hpp"

#include <cmath>
#include <optional>

#include "axial/fields.hpp"
#include "axial/harmonics.hpp"

namespace axial {

namespace {

const Poly kM = Poly::M();
const Poly kR = Poly::r();

RatFunc c(long n, long d = 1) { return RatFunc(Poly(Rational(n, d))); }
RatFunc Mr(int m, int r) { return RatFunc(Poly(1).shift(m, r)); }
RatFunc inv_r(int k) { return RatFunc(Poly(1), Poly(1).shift(0, k)); }

std::optional<Poly> as_polynomial(const RatFunc& f)
{
    const auto& d = f.den().terms();
    if (d.size() != 1 || d.begin()->first != Poly::Exp{0, 0, 0}) return std::nullopt;
    return f.num() * Poly(Rational(1) / d.begin()->second);
}

double to_d(const Rational& q) { return q.convert_to<double>(); }

nlohmann::json quintic_coeffs(const Poly& p)
{
    nlohmann::json j = nlohmann::json::array();
    for (int k = 0; k <= 5; ++k) j.push_back(p.coeff(5 - k, k).str());
    return j;
}

// compares assembled * 4 r^8 with the quoted numerator coefficient by coefficient
nlohmann::json coefficient_diff(const RatFunc& assembled, const Quintic& q)
{
    nlohmann::json out;
    auto p = as_polynomial(assembled * RatFunc(Poly(4).shift(0, 8)));
    if (!p) {
        out["assembled_numerator"] = assembled.num().str();
        out["assembled_denominator"] = assembled.den().str();
        return out;
    }
    out["assembled"] = quintic_coeffs(*p);
    nlohmann::json quoted = nlohmann::json::array(), diff = nlohmann::json::array();
    for (int k = 0; k <= 5; ++k) {
        quoted.push_back(q[k]);
        Rational d = p->coeff(5 - k, k) - q[k];
        if (d != 0) diff.push_back({{"term", "M^" + std::to_string(5 - k) + " r^" + std::to_string(k)},
                                    {"quoted", q[k]},
                                    {"assembled", p->coeff(5 - k, k).str()}});
    }
    out["quoted"] = quoted;
    out["mismatches"] = diff;
    return out;
}

RatFunc assemble_base(const RatFunc& P)
{
    RatFunc f = sym_fX();
    return -Mr(1, 0) * f * inv_r(2) * P - c(1, 2) * f * P.d_rstar() - c(1, 4) * sym_box_quoted();
}

RatFunc angular_coefficient()
{
    // (f/r)(1 - 3M/r)
    return sym_fX() * inv_r(1) * (c(1) - c(3) * Mr(1, 0) * inv_r(1));
}

}  // namespace

RatFunc sym_A() { return RatFunc(kR - Poly(2) * kM, kR); }
RatFunc sym_mu() { return RatFunc(Poly(2) * kM, kR); }
RatFunc sym_rstar() { return RatFunc(kR - Poly(3) * kM + Poly(2) * kM * Poly::L()); }
RatFunc sym_Delta() { return RatFunc(kR * kR - Poly(2) * kM * kR); }

RatFunc sym_fX()
{
    RatFunc a = c(1) + Mr(1, 0) * inv_r(1);
    return a * a * (c(1) - c(3) * Mr(1, 0) * inv_r(1));
}

RatFunc sym_fX_prime_quoted()
{
    RatFunc m_r = Mr(1, 0) * inv_r(1);
    return Mr(1, 0) * inv_r(2) * sym_A() * (c(1) + m_r) * (c(1) + c(9) * m_r);
}

RatFunc sym_V() { return c(4) * sym_A() * inv_r(2); }
RatFunc sym_W() { return (c(1) - c(8) * Mr(1, 0) * inv_r(1)) * inv_r(2); }

RatFunc sym_box_quoted()
{
    RatFunc A = sym_A(), f = sym_fX();
    RatFunc fp = f.d_rstar(), fpp = fp.d_rstar(), fppp = fpp.d_rstar();
    RatFunc mup = sym_mu().d_rstar(), mupp = mup.d_rstar();
    RatFunc rr = RatFunc(kR);
    return c(1, 2) / A * fppp + c(2) / rr * fpp - c(2) * mup / (rr * A) * fp +
           c(1) / (A * rr) * (mup * A / rr - mupp) * f;
}

RatFunc sym_box_direct()
{
    RatFunc A = sym_A(), f = sym_fX();
    RatFunc w = f.d_rstar() + c(2) * f * A * inv_r(1);
    RatFunc wp = w.d_rstar();
    return (wp.d_rstar() + c(2) * A * inv_r(1) * wp) / A;
}

RatFunc quintic_over_r8(const Quintic& q)
{
    Poly n;
    for (int k = 0; k <= 5; ++k) n += Poly(q[k]).shift(5 - k, k);
    return RatFunc(n, Poly(4).shift(0, 8));
}

CheckResult check_f_identities()
{
    CheckResult res;
    res.name = "f_identities";
    RatFunc f = sym_fX();
    RatFunc lhs = f.d_rstar(), rhs = sym_fX_prime_quoted();
    bool ident = lhs.equals(rhs);
    Rational f3 = f.eval(1, 3), fp3 = rhs.eval(1, 3);

    // independent floating-point check at 3M by central differences in r*
    auto fx = [](double r) { return std::pow(1 + 1 / r, 2) * (1 - 3 / r); };
    double h = 1e-4, r0 = 3.0;
    double d8 = (fx(r0 - 2 * h) - 8 * fx(r0 - h) + 8 * fx(r0 + h) - fx(r0 + 2 * h)) / (12 * h);
    double numeric = (1 - 2 / r0) * d8;

    // f and f' stay bounded on the exterior
    double supf = 0, supfp = 0;
    for (int i = 0; i <= 200000; ++i) {
        double r = 2.0 + 1e-3 * i;
        supf = std::max(supf, std::abs(fx(r)));
        supfp = std::max(supfp, std::abs((1 / (r * r)) * (1 - 2 / r) * (1 + 1 / r) * (1 + 9 / r)));
    }
    res.pass = ident && f3 == 0 && fp3 == Rational(16, 81) && std::abs(numeric - 16.0 / 81.0) < 1e-8 &&
               supf < 2.0 && supfp < 1.0;
    res.detail = {{"identical", ident},
                  {"f_at_3M", f3.str()},
                  {"fprime_at_3M", fp3.str()},
                  {"fprime_at_3M_numeric", numeric},
                  {"sup_abs_f", supf},
                  {"sup_abs_fprime", supfp}};
    return res;
}

CheckResult check_base_coefficient(const Quintic& q)
{
    CheckResult res;
    res.name = "base_coefficient";
    RatFunc base = assemble_base(sym_V());
    RatFunc quoted = quintic_over_r8(q);
    bool ident = base.equals(quoted);
    RatFunc gap = sym_box_direct() - sym_box_quoted();
    res.pass = ident;
    res.detail = coefficient_diff(base, q);
    res.detail["identical"] = ident;
    res.detail["value_at_M1_r3"] = quoted.eval(1, 3).str();
    res.detail["numerator_at_M1_r2"] = (quoted * RatFunc(Poly(4).shift(0, 8))).eval(1, 2).str();
    res.detail["box_direct_minus_quoted"] = gap.num().str() + " / (" + gap.den().str() + ")";
    return res;
}

CheckResult check_post_poincare(const Quintic& q)
{
    CheckResult res;
    res.name = "post_poincare";
    RatFunc quoted = quintic_over_r8(q);
    RatFunc alpha = assemble_base(sym_V()) + c(2) * inv_r(2) * angular_coefficient();
    RatFunc beta = assemble_base(sym_W()) + c(5) * inv_r(2) * angular_coefficient();
    bool ia = alpha.equals(quoted), ib = beta.equals(quoted);

    Poly num;
    for (int k = 0; k <= 5; ++k) num += Poly(q[k]).shift(0, k);
    PositivityCert cert = certify_positive(to_univariate_r(num), 2, Rational(1, 1000000));

    res.pass = ia && ib && cert.positive && cert.sturm_count == 0;
    res.detail = coefficient_diff(alpha, q);
    res.detail["identical_alpha"] = ia;
    res.detail["identical_beta"] = ib;
    res.detail["numerator_at_M1_r2"] = ueval(to_univariate_r(num), 2).str();
    res.detail["positivity"] = {{"certified", cert.positive},
                                {"interval_lo", cert.lo.str()},
                                {"tail_from", cert.split.str()},
                                {"boxes", cert.boxes},
                                {"min_lower_bound", cert.min_lower_bound},
                                {"sturm_roots", cert.sturm_count}};
    if (!cert.positive)
        res.detail["positivity"]["violation_bracket"] = {to_d(cert.fail_a), to_d(cert.fail_b)};
    return res;
}

CheckResult check_reduction_identity(int lmax)
{
    CheckResult res;
    res.name = "reduction_identity";
    RatFunc A = sym_A(), D = sym_Delta(), rr = RatFunc(kR);
    RatFunc Dr = D.d_r(), Ar = A.d_r();
    bool all = true;
    nlohmann::json cases = nlohmann::json::array();
    for (int pass = 0; pass < 2; ++pass) {
        int s = pass == 0 ? 2 : 1;
        RatFunc P = pass == 0 ? sym_V() : sym_W();
        for (int l = s == 2 ? 2 : 1; l <= lmax; ++l) {
            RatFunc ang = c(s * s - l * (l + 1)) * inv_r(2) - P;
            // per-mode operator on f = u / r, as coefficients of u_tt, u_rr, u_r, u
            RatFunc ptt = -(rr * rr / D) / rr;
            RatFunc prr = D * inv_r(2) / rr;
            RatFunc pr = D * inv_r(2) * c(-2) * inv_r(2) + Dr * inv_r(2) / rr;
            RatFunc p0 = D * inv_r(2) * c(2) * inv_r(3) - Dr * inv_r(2) * inv_r(2) + ang / rr;
            RatFunc veff = A * (c(l * (l + 1)) * inv_r(2) - c(6) * Mr(1, 0) * inv_r(3));
            RatFunc k = c(1) / (rr * A);
            bool ok = ptt.equals(-k) && prr.equals(k * A * A) && pr.equals(k * A * Ar) && p0.equals(-k * veff);
            all = all && ok;
            cases.push_back({{"field", s == 2 ? "alpha" : "beta"}, {"l", l}, {"identical", ok}});
        }
    }
    // static l = 1 beta operator against the quoted ODE
    RatFunc W = sym_W();
    RatFunc ode0 = -c(2) * inv_r(2) * (c(1) - c(4) * Mr(1, 0) * inv_r(1));
    RatFunc op0 = c(1 - 2) * inv_r(2) - W;
    RatFunc ode1 = (c(2) * rr - c(2) * Mr(1, 0)) * inv_r(2);
    bool ode_ok = op0.equals(ode0) && (Dr * inv_r(2)).equals(ode1);
    all = all && ode_ok;
    res.pass = all;
    res.detail = {{"cases", cases}, {"beta_l1_matches_static_ode", ode_ok}};
    return res;
}

CheckResult check_poincare_constants(int lmax)
{
    CheckResult res;
    res.name = "poincare_constants";
    SphereGrid g(48);
    nlohmann::json rows = nlohmann::json::array();
    double min2 = 1e300, min1 = 1e300, worst = 0;
    for (int s = 1; s <= 2; ++s) {
        for (int l = s; l <= lmax; ++l) {
            auto y = eval_harmonic(g, s, l);
            double q = dirichlet_integral(g, s, y.values) / bundle_inner(g, y.values, y.values, s);
            int lam = angular_eigenvalue(s, l);
            worst = std::max(worst, std::abs(q - lam) / lam);
            rows.push_back({{"s", s}, {"l", l}, {"quotient", q}, {"Lambda", lam}});
            if (l >= 2) (s == 2 ? min2 : min1) = std::min(s == 2 ? min2 : min1, q);
        }
    }
    res.pass = worst < 1e-10 && std::abs(min2 - 2.0) < 1e-10 && std::abs(min1 - 5.0) < 1e-10;
    res.detail = {{"rows", rows}, {"min_spin2", min2}, {"min_spin1", min1}, {"max_rel_error", worst}};
    return res;
}

CheckResult check_z_coefficient()
{
    CheckResult res;
    res.name = "z_coefficient";
    // everything divided by t: Z = (t^2 + r*^2)/2 d_t + t r* d_r*
    RatFunc A = sym_A(), V = sym_V(), x = sym_rstar(), rr = RatFunc(kR);
    RatFunc divZ = c(2) + x * (c(2) * rr - c(2) * Mr(1, 0)) * inv_r(2);
    RatFunc coef = x / rr * A * V - c(1, 2) * V * divZ - c(1, 2) * x * V.d_rstar();
    RatFunc quoted = c(4) * Mr(1, 0) * (rr - c(2) * Mr(1, 0)) * inv_r(5) *
                     ((c(2) * rr - c(8) * Mr(1, 0)) * RatFunc(Poly::L()) - c(7) * rr + c(12) * Mr(1, 0));
    bool ident = coef.equals(quoted);
    res.pass = ident;
    res.detail = {{"identical", ident}};
    return res;
}

std::vector<CheckResult> run_identity_suite(const IdentityOptions& opt)
{
    std::vector<CheckResult> out;
    out.push_back(check_f_identities());
    out.push_back(check_base_coefficient(opt.base));
    out.push_back(check_post_poincare(opt.post));
    out.push_back(check_reduction_identity(opt.lmax));
    out.push_back(check_poincare_constants(opt.lmax));
    out.push_back(check_z_coefficient());

    CheckResult ode;
    ode.name = "beta1_ode";
    auto b = beta1_ode_check(1.0);
    ode.pass = b.c1_residual <= 1e-8 && b.c2_residual <= 1e-8 && b.sum_residual <= 1e-8;
    ode.detail = {{"c1_branch", b.c1_residual}, {"c2_branch", b.c2_residual}, {"sum", b.sum_residual}};
    out.push_back(ode);
    return out;
}

}  // namespace axial
