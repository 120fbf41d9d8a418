#include "axial/redshift.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "axial/evolution.hpp"

namespace axial {

namespace {

double step_S(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double p = std::exp(-1.0 / x), m = std::exp(-1.0 / (1.0 - x));
    return p / (p + m);
}

double step_S_d(double x)
{
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double p = std::exp(-1.0 / x), m = std::exp(-1.0 / (1.0 - x));
    double s = p + m;
    if (s == 0.0) return 0.0;
    return (p / s) * (m / s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)));
}

}  // namespace

Redshift::Redshift(const Background& bg, double R0_, double d1, double d2)
    : M(bg.M()), R0(R0_ * bg.M()), delta1(d1), delta2(d2)
{
}

double Redshift::q(double r) const { return 1.0 - step_S((r - 2.0 * M) / (R0 - 2.0 * M)); }
double Redshift::q_r(double r) const { return -step_S_d((r - 2.0 * M) / (R0 - 2.0 * M)) / (R0 - 2.0 * M); }
double Redshift::a(double r) const { return 1.0 + delta1 * (r - 2.0 * M) / M * q(r); }
double Redshift::b(double r) const { return -delta2 * q(r); }
double Redshift::a_r(double r) const { return delta1 * (q(r) + (r - 2.0 * M) * q_r(r)) / M; }
double Redshift::b_r(double r) const { return -delta2 * q_r(r); }

double Redshift::norm2(double r) const
{
    double mu = 2.0 * M / r, A = 1.0 - mu, av = a(r), bv = b(r);
    return -A * av * av + 2.0 * mu * av * bv + (1.0 + mu) * bv * bv;
}

RedshiftForms redshift_forms(const Background& bg, const Redshift& N, double r, double Lambda, double P,
                             double P_r)
{
    const double M = bg.M(), mu = 2.0 * M / r, A = 1.0 - mu, mu_r = -2.0 * M / (r * r);
    Eigen::Matrix2d G, Gi;
    G << -A, mu, mu, 1.0 + mu;
    Gi << -(1.0 + mu), mu, mu, A;
    const double a = N.a(r), b = N.b(r), ap = N.a_r(r), bp = N.b_r(r);
    Eigen::Vector2d Nv(a, b);

    // deformation tensor of N in (t*, r)
    Eigen::Matrix2d pi = 0.5 * b * mu_r * Eigen::Matrix2d::Ones();
    for (int j = 0; j < 2; ++j) {
        pi(1, j) += 0.5 * (G(0, j) * ap + G(1, j) * bp);
        pi(j, 1) += 0.5 * (G(j, 0) * ap + G(j, 1) * bp);
    }

    auto quad = [&](const Eigen::Vector3d& w, int which) {
        Eigen::Vector2d d(w(0), w(1));
        double f = w(2);
        double L = d.dot(Gi * d) + (Lambda / (r * r) + P) * f * f;
        Eigen::Matrix2d T = d * d.transpose() - 0.5 * G * L;
        if (which == 1) return Nv.dot(T * Nv);
        if (which == 2) return T(0, 0);
        Eigen::Matrix2d Tup = Gi * T * Gi;
        double trs = Lambda / (r * r) * f * f - L;
        return (Tup.cwiseProduct(pi)).sum() + (b / r) * trs - 0.5 * b * P_r * f * f;
    };
    auto polarize = [&](int which) {
        Eigen::Matrix3d m;
        Eigen::Matrix3d E = Eigen::Matrix3d::Identity();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m(i, j) = 0.5 * (quad(E.col(i) + E.col(j), which) - quad(E.col(i), which) - quad(E.col(j), which));
        return m;
    };
    return {polarize(0), polarize(1), polarize(2)};
}

namespace {

struct Sweep {
    double min_eig = std::numeric_limits<double>::infinity();
    double max_eig = -std::numeric_limits<double>::infinity();
    double at_r = 0.0;
    bool ok = true;
};

// generalized eigenvalues of (X, Y) with Y required positive definite
bool gen_eigs(const Eigen::Matrix3d& X, const Eigen::Matrix3d& Y, Eigen::Vector3d& ev)
{
    Eigen::LLT<Eigen::Matrix3d> llt(Y);
    if (llt.info() != Eigen::Success) return false;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(X, Y, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return false;
    ev = es.eigenvalues();
    return true;
}

}  // namespace

RedshiftCert certify_redshift(const Background& bg, const RedshiftParams& p, double d1, double d2)
{
    const double M = bg.M();
    RedshiftCert cert;
    cert.N = Redshift(bg, p.R0, d1, d2);
    cert.samples = p.samples;
    cert.kappa = surface_gravity(bg);

    struct ModeSet {
        double Lambda;
        FieldKind kind;
    };
    std::vector<ModeSet> modes;
    for (int l = 2; l <= p.lmax; ++l) {
        modes.push_back({l * (l + 1.0) - 4.0, FieldKind::Alpha});
        modes.push_back({l * (l + 1.0) - 1.0, FieldKind::Beta});
    }

    Sweep inner, outerK, outerE;
    bool timelike = true;
    std::ostringstream diag;
    const double rin = 2.0 * M + p.eps * M, r0 = p.r0 * M, R0 = p.R0 * M;
    for (int i = 0; i < p.samples; ++i) {
        double r = rin + (r0 - rin) * i / (p.samples - 1.0);
        if (!(cert.N.norm2(r) < 0.0)) timelike = false;
        for (const auto& ms : modes) {
            auto F = redshift_forms(bg, cert.N, r, ms.Lambda, field_potential(bg, ms.kind, r),
                                    field_potential_dr(bg, ms.kind, r));
            Eigen::Vector3d ev;
            if (!gen_eigs(F.K, F.JN, ev)) {
                inner.ok = false;
                diag << "J^N.N not positive at r=" << r << "; ";
                continue;
            }
            if (ev.minCoeff() < inner.min_eig) {
                inner.min_eig = ev.minCoeff();
                inner.at_r = r;
            }
        }
    }
    for (int i = 0; i < p.samples; ++i) {
        double r = r0 + (R0 - r0) * i / (p.samples - 1.0);
        if (r < R0 && !(cert.N.norm2(r) < 0.0)) timelike = false;
        for (const auto& ms : modes) {
            auto F = redshift_forms(bg, cert.N, r, ms.Lambda, field_potential(bg, ms.kind, r),
                                    field_potential_dr(bg, ms.kind, r));
            Eigen::Vector3d ek, ee;
            if (!gen_eigs(F.K, F.JT, ek) || !gen_eigs(F.JN, F.JT, ee)) {
                outerK.ok = false;
                diag << "J^T.T not positive at r=" << r << "; ";
                continue;
            }
            outerK.max_eig = std::max(outerK.max_eig, ek.cwiseAbs().maxCoeff());
            outerE.min_eig = std::min(outerE.min_eig, ee.minCoeff());
            outerE.max_eig = std::max(outerE.max_eig, ee.maxCoeff());
        }
    }
    cert.c = inner.ok ? inner.min_eig : -std::numeric_limits<double>::infinity();
    cert.c_at_r = inner.at_r;
    cert.C = outerK.max_eig;
    cert.equiv_lo = outerE.min_eig;
    cert.equiv_hi = outerE.max_eig;
    cert.timelike = timelike;
    cert.found = inner.ok && outerK.ok && timelike && cert.c > 0.0 && cert.equiv_lo > 0.0;
    if (!timelike) diag << "N fails to be timelike; ";
    cert.diagnostics = diag.str();
    return cert;
}

RedshiftCert build_redshift(const Background& bg, const RedshiftParams& p)
{
    if (!(p.r0 > 2.0 && p.R0 > p.r0)) throw std::invalid_argument("build_redshift: need 2M < r0 < R0");
    RedshiftCert best;
    best.c = -std::numeric_limits<double>::infinity();
    std::ostringstream tried;
    // coarse sweep first, then certify the winner at full density
    RedshiftParams coarse = p;
    coarse.samples = std::max(40, p.samples / 10);
    double bd1 = 0, bd2 = 0;
    for (double d1 : p.delta1_grid) {
        for (double fr : p.delta2_frac) {
            double d2 = d1 * fr;
            auto c = certify_redshift(bg, coarse, d1, d2);
            tried << "(" << d1 << "," << d2 << ")->" << c.c << " ";
            if (c.found && c.c > best.c) {
                best = c;
                bd1 = d1;
                bd2 = d2;
            }
        }
    }
    if (!best.found)
        throw std::runtime_error("build_redshift: no (delta1, delta2) certified c > 0; tried " + tried.str());
    auto full = certify_redshift(bg, p, bd1, bd2);
    if (!full.found)
        throw std::runtime_error("build_redshift: certification failed at full density: " + full.diagnostics);
    return full;
}

double surface_gravity(const Background& bg)
{
    // half the r-derivative of A at the horizon
    const double M = bg.M(), h = 1e-5 * M, r = 2.0 * M;
    auto A = [&](double x) { return 1.0 - 2.0 * M / x; };
    double d = (A(r - 2 * h) - 8 * A(r - h) + 8 * A(r + h) - A(r + 2 * h)) / (12 * h);
    return 0.5 * d;
}

}  // namespace axial
