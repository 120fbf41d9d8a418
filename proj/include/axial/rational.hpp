#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

namespace axial {

using Rational = boost::multiprecision::cpp_rational;

// Polynomial in (M, r, L) with exact rational coefficients, where L stands for
// log((r - 2M)/M) and is treated as an independent symbol with dL/dr = 1/(r - 2M).
class Poly {
public:
    using Exp = std::array<int, 3>;

    Poly() = default;
    Poly(const Rational& c);
    Poly(long c) : Poly(Rational(c)) {}
    static Poly M();
    static Poly r();
    static Poly L();

    const std::map<Exp, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rational coeff(int m, int r, int l = 0) const;
    int degree_r() const;
    int degree_L() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o);
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    Poly d_r() const;  // partial in r, L held fixed
    Poly d_L() const;
    Rational eval(const Rational& M, const Rational& r) const;  // requires no L
    Poly at_M1() const;

    // divides by r^k M^j if every term allows it
    Poly shift(int dm, int dr) const;
    // exact division by (r - 2M); returns false if not divisible
    bool divide_horizon(Poly& q) const;
    std::pair<int, int> min_powers() const;

    std::string str() const;

private:
    void add_term(const Exp& e, const Rational& c);
    std::map<Exp, Rational> terms_;
};

class RatFunc {
public:
    RatFunc() : num_(0), den_(1) {}
    RatFunc(const Poly& n) : num_(n), den_(1) {}
    RatFunc(const Poly& n, const Poly& d);
    RatFunc(long c) : num_(c), den_(1) {}

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator-() const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;

    RatFunc d_r() const;      // total r-derivative including the L chain rule
    RatFunc d_rstar() const;  // (1 - 2M/r) d/dr

    bool equals(const RatFunc& o) const;  // cross-multiplication
    bool is_zero() const { return num_.is_zero(); }
    Rational eval(const Rational& M, const Rational& r) const;

private:
    void reduce();
    Poly num_, den_;
};

// univariate helpers at M = 1, coefficients low to high
using UPoly = std::vector<Rational>;
UPoly to_univariate_r(const Poly& p);  // requires no L and M = 1 substituted
Rational ueval(const UPoly& p, const Rational& x);
UPoly utaylor(const UPoly& p, const Rational& a);  // coefficients of p(a + t)
int sturm_roots(const UPoly& p, const Rational& a, const Rational& b);  // in (a, b]

struct PositivityCert {
    bool positive = false;
    Rational lo, split;        // subdivision on [lo, split], tail bound beyond split
    long boxes = 0;
    double min_lower_bound = 0.0;
    Rational fail_a, fail_b;   // bracket of the first uncertified box
    int sturm_count = -1;      // real roots in [lo, infinity)
};

// p > 0 on [lo, infinity) by exact interval subdivision plus a leading-term tail
PositivityCert certify_positive(const UPoly& p, const Rational& lo, const Rational& min_width);

}  // namespace axial
