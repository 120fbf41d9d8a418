#include "axial/rational.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace axial {

Poly::Poly(const Rational& c)
{
    if (c != 0) terms_[{0, 0, 0}] = c;
}

Poly Poly::M() { Poly p; p.terms_[{1, 0, 0}] = 1; return p; }
Poly Poly::r() { Poly p; p.terms_[{0, 1, 0}] = 1; return p; }
Poly Poly::L() { Poly p; p.terms_[{0, 0, 1}] = 1; return p; }

void Poly::add_term(const Exp& e, const Rational& c)
{
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Rational Poly::coeff(int m, int r, int l) const
{
    auto it = terms_.find({m, r, l});
    return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::degree_r() const
{
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[1]);
    return d;
}

int Poly::degree_L() const
{
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[2]);
    return d;
}

Poly Poly::operator+(const Poly& o) const { Poly p = *this; p += o; return p; }

Poly& Poly::operator+=(const Poly& o)
{
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly Poly::operator-() const
{
    Poly p;
    for (const auto& [e, c] : terms_) p.terms_[e] = -c;
    return p;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const
{
    Poly p;
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_)
            p.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    return p;
}

Poly Poly::d_r() const
{
    Poly p;
    for (const auto& [e, c] : terms_)
        if (e[1] > 0) p.add_term({e[0], e[1] - 1, e[2]}, c * e[1]);
    return p;
}

Poly Poly::d_L() const
{
    Poly p;
    for (const auto& [e, c] : terms_)
        if (e[2] > 0) p.add_term({e[0], e[1], e[2] - 1}, c * e[2]);
    return p;
}

static Rational rpow(const Rational& x, int k)
{
    Rational out = 1;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

Rational Poly::eval(const Rational& M, const Rational& r) const
{
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
        if (e[2] != 0) throw std::domain_error("Poly::eval: expression still contains the log symbol");
        acc += c * rpow(M, e[0]) * rpow(r, e[1]);
    }
    return acc;
}

Poly Poly::at_M1() const
{
    Poly p;
    for (const auto& [e, c] : terms_) p.add_term({0, e[1], e[2]}, c);
    return p;
}

std::pair<int, int> Poly::min_powers() const
{
    if (terms_.empty()) return {0, 0};
    int m = 1 << 20, r = 1 << 20;
    for (const auto& [e, c] : terms_) {
        m = std::min(m, e[0]);
        r = std::min(r, e[1]);
    }
    return {m, r};
}

Poly Poly::shift(int dm, int dr) const
{
    Poly p;
    for (const auto& [e, c] : terms_) {
        if (e[0] + dm < 0 || e[1] + dr < 0) throw std::logic_error("Poly::shift: negative power");
        p.terms_[{e[0] + dm, e[1] + dr, e[2]}] = c;
    }
    return p;
}

// synthetic division in r by (r - 2M), treating M and L as parameters
bool Poly::divide_horizon(Poly& q) const
{
    if (terms_.empty()) { q = Poly(); return true; }
    // group by (total degree in M + r, L) so every slice is a homogeneous binary form
    std::map<std::pair<int, int>, std::vector<Rational>> groups;
    for (const auto& [e, c] : terms_) {
        int d = e[0] + e[1];
        auto& v = groups[{d, e[2]}];
        if (static_cast<int>(v.size()) < d + 1) v.resize(d + 1, 0);
        v[e[1]] += c;
    }
    Poly out;
    for (auto& [key, a] : groups) {
        int d = key.first;
        if (d == 0) return false;
        // a[k] is the coefficient of r^k M^(d-k); divide by (r - 2M)
        std::vector<Rational> b(d, 0);
        Rational carry = 0;
        for (int k = d; k >= 1; --k) {
            carry = a[k] + carry;
            b[k - 1] = carry;
            carry = carry * 2;  // next lower coefficient picks up 2M * b
        }
        if (a[0] + carry != 0) return false;
        for (int k = 0; k < d; ++k)
            if (b[k] != 0) out.add_term({d - 1 - k, k, key.second}, b[k]);
    }
    q = out;
    return true;
}

std::string Poly::str() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        Rational a = c < 0 ? Rational(-c) : c;
        std::vector<std::string> f;
        const char* names[3] = {"M", "r", "L"};
        for (int k = 0; k < 3; ++k) {
            if (e[k] == 0) continue;
            f.push_back(e[k] == 1 ? std::string(names[k]) : std::string(names[k]) + "^" + std::to_string(e[k]));
        }
        if (a != 1 || f.empty()) f.insert(f.begin(), a.str());
        for (size_t k = 0; k < f.size(); ++k) os << (k ? "*" : "") << f[k];
    }
    return os.str();
}

RatFunc::RatFunc(const Poly& n, const Poly& d) : num_(n), den_(d)
{
    if (d.is_zero()) throw std::domain_error("RatFunc: zero denominator");
    reduce();
}

void RatFunc::reduce()
{
    if (num_.is_zero()) {
        den_ = Poly(1);
        return;
    }
    auto [nm, nr] = num_.min_powers();
    auto [dm, dr] = den_.min_powers();
    int cm = std::min(nm, dm), cr = std::min(nr, dr);
    if (cm > 0 || cr > 0) {
        num_ = num_.shift(-cm, -cr);
        den_ = den_.shift(-cm, -cr);
    }
    Poly qn, qd;
    while (den_.divide_horizon(qd) && num_.divide_horizon(qn)) {
        num_ = qn;
        den_ = qd;
    }
}

RatFunc RatFunc::operator+(const RatFunc& o) const
{
    if (den_ == o.den_) return RatFunc(num_ + o.num_, den_);
    return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator-() const { return RatFunc(-num_, den_); }
RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }
RatFunc RatFunc::operator*(const RatFunc& o) const { return RatFunc(num_ * o.num_, den_ * o.den_); }

RatFunc RatFunc::operator/(const RatFunc& o) const
{
    if (o.num_.is_zero()) throw std::domain_error("RatFunc: division by zero");
    return RatFunc(num_ * o.den_, den_ * o.num_);
}

RatFunc RatFunc::d_r() const
{
    const Poly h = Poly::r() - Poly(2) * Poly::M();
    Poly dn = h * num_.d_r() + num_.d_L();
    Poly dd = h * den_.d_r() + den_.d_L();
    return RatFunc(dn * den_ - num_ * dd, h * den_ * den_);
}

RatFunc RatFunc::d_rstar() const
{
    RatFunc A(Poly::r() - Poly(2) * Poly::M(), Poly::r());
    return A * d_r();
}

bool RatFunc::equals(const RatFunc& o) const
{
    return (num_ * o.den_ - o.num_ * den_).is_zero();
}

Rational RatFunc::eval(const Rational& M, const Rational& r) const
{
    return num_.eval(M, r) / den_.eval(M, r);
}

UPoly to_univariate_r(const Poly& p)
{
    UPoly u(std::max(1, p.degree_r() + 1), 0);
    for (const auto& [e, c] : p.terms()) {
        if (e[0] != 0 || e[2] != 0) throw std::domain_error("to_univariate_r: M or L still present");
        u[e[1]] += c;
    }
    return u;
}

Rational ueval(const UPoly& p, const Rational& x)
{
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

UPoly utaylor(const UPoly& p, const Rational& a)
{
    UPoly c = p;
    const int n = static_cast<int>(c.size());
    for (int k = 0; k < n; ++k)
        for (int j = n - 2; j >= k; --j) c[j] += a * c[j + 1];
    return c;
}

static void trim(UPoly& p)
{
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

static UPoly uderiv(const UPoly& p)
{
    UPoly d(std::max<size_t>(1, p.size() - 1), 0);
    for (size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<long>(k);
    return d;
}

static UPoly urem(UPoly a, const UPoly& b)
{
    trim(a);
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
        Rational f = a.back() / b.back();
        size_t off = a.size() - b.size();
        for (size_t k = 0; k < b.size(); ++k) a[off + k] -= f * b[k];
        a.pop_back();
        trim(a);
        if (a.empty()) { a.push_back(0); break; }
    }
    return a;
}

static int sign_changes(const std::vector<Rational>& v)
{
    int n = 0, last = 0;
    for (const auto& x : v) {
        int s = x > 0 ? 1 : (x < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++n;
        last = s;
    }
    return n;
}

int sturm_roots(const UPoly& p0, const Rational& a, const Rational& b)
{
    std::vector<UPoly> seq;
    UPoly p = p0;
    trim(p);
    seq.push_back(p);
    seq.push_back(uderiv(p));
    trim(seq.back());
    while (!(seq.back().size() == 1 && seq.back()[0] == 0) && seq.back().size() > 1) {
        UPoly r = urem(seq[seq.size() - 2], seq.back());
        for (auto& c : r) c = -c;
        trim(r);
        seq.push_back(r);
    }
    if (seq.back().size() == 1 && seq.back()[0] == 0) seq.pop_back();
    std::vector<Rational> va, vb;
    for (const auto& q : seq) {
        va.push_back(ueval(q, a));
        vb.push_back(ueval(q, b));
    }
    return sign_changes(va) - sign_changes(vb);
}

PositivityCert certify_positive(const UPoly& p0, const Rational& lo, const Rational& min_width)
{
    UPoly p = p0;
    trim(p);
    PositivityCert cert;
    cert.lo = lo;
    const Rational lead = p.back();
    if (lead <= 0) return cert;
    Rational sum = 0;
    for (size_t k = 0; k + 1 < p.size(); ++k) sum += p[k] < 0 ? Rational(-p[k]) : p[k];
    // for r >= max(1, sum/lead): |lower terms| <= sum r^(n-1) < lead r^n
    Rational split = sum / lead;
    if (split < 1) split = 1;
    split = Rational(static_cast<long>(boost::multiprecision::numerator(split) /
                                       boost::multiprecision::denominator(split)) + 1);
    if (split < lo) split = lo;
    cert.split = split;

    double minlb = 1e300;
    std::vector<std::pair<Rational, Rational>> stack{{lo, split}};
    bool ok = true;
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        ++cert.boxes;
        UPoly c = utaylor(p, a);
        Rational w = b - a, lb = c[0], wk = 1;
        for (size_t k = 1; k < c.size(); ++k) {
            wk *= w;
            if (c[k] < 0) lb += c[k] * wk;
        }
        if (lb > 0) {
            minlb = std::min(minlb, static_cast<double>(lb));
            continue;
        }
        if (c[0] <= 0 || w <= min_width) {
            ok = false;
            cert.fail_a = a;
            cert.fail_b = b;
            break;
        }
        Rational mid = (a + b) / 2;
        stack.push_back({mid, b});
        stack.push_back({a, mid});
    }
    cert.positive = ok && ueval(p, lo) > 0;
    cert.min_lower_bound = minlb;
    // count roots in [lo, split] and confirm none beyond via the tail bound
    cert.sturm_count = sturm_roots(p, lo, split) + (ueval(p, lo) == 0 ? 1 : 0);
    return cert;
}

}  // namespace axial
