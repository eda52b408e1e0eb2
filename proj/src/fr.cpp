#include "hinf/fr.hpp"

#include <algorithm>
#include <cmath>

namespace hinf {

namespace {

// Stack the lower triangles of F_1..F_m as rows (off-diagonal entries doubled
// once via sqrt(2) so the Euclidean structure matches the trace inner product).
Matrix vectorized(const std::vector<SymMatrix>& f) {
    const Index m = static_cast<Index>(f.size()) - 1;
    const Index n = f.empty() ? 0 : f[0].dim();
    Matrix v(m, n * (n + 1) / 2);
    const double rt2 = std::sqrt(2.0);
    for (Index j = 1; j <= m; ++j) {
        Index k = 0;
        for (Index i = 0; i < n; ++i)
            for (Index l = 0; l <= i; ++l, ++k) v(j - 1, k) = f[j](i, l) * (i == l ? 1.0 : rt2);
    }
    return v;
}

}  // namespace

void StdLmi::validate(bool check_independence) const {
    if (F.empty()) throw DimensionMismatch("StdLmi needs at least the constant term");
    const Index n = F[0].dim();
    for (const auto& f : F)
        if (f.dim() != n) throw DimensionMismatch("all F matrices must share one dimension");
    if (c.size() != num_vars())
        throw DimensionMismatch("objective length must match the number of variables");
    if (check_independence && num_vars() > 0) {
        const Matrix v = vectorized(F);
        if (numerical_rank(v) < num_vars())
            throw RankDeficient("F_1..F_m are linearly dependent");
    }
}

Matrix StdLmi::eval_slack(const Vector& x) const {
    if (x.size() != num_vars()) throw DimensionMismatch("variable vector has wrong length");
    Matrix s = -F[0].mat();
    for (Index j = 0; j < num_vars(); ++j) s += x(j) * F[j + 1].mat();
    return s;
}

CertCheck verify_certificate(const StdLmi& lmi, const FrCertificate& cert, double tol) {
    lmi.validate(false);
    CertCheck out;
    const Index n = lmi.dim();
    const double scale =
        1.0 + std::max_element(lmi.F.begin(), lmi.F.end(), [](const auto& a, const auto& b) {
                  return a.mat().norm() < b.mat().norm();
              })->mat().norm();

    if (cert.side == CertSide::Primal) {
        const Matrix& y = cert.Yhat.mat();
        if (y.rows() != n) {
            out.why = "certificate dimension mismatch";
            return out;
        }
        if (y.norm() <= tol * scale) {
            out.why = "certificate is zero";
            return out;
        }
        double res = std::max(0.0, -min_eig_sym(y));
        for (Index j = 1; j <= lmi.num_vars(); ++j)
            res = std::max(res, std::abs(inner(lmi.F[j].mat(), y)));
        const double sign_term = inner(lmi.F[0].mat(), y);
        res = std::max(res, std::max(0.0, -sign_term));
        out.residual = res;
        if (res > tol * scale * (1.0 + y.norm())) {
            out.why = "defining equations violated";
            return out;
        }
        out.valid = true;
        out.strict_sign = sign_term > tol * scale * (1.0 + y.norm());
    } else {
        if (cert.xhat.size() != lmi.num_vars()) {
            out.why = "certificate length mismatch";
            return out;
        }
        Matrix xm = Matrix::Zero(n, n);
        for (Index j = 0; j < lmi.num_vars(); ++j) xm += cert.xhat(j) * lmi.F[j + 1].mat();
        if (cert.xhat.norm() + xm.norm() <= tol * scale) {
            out.why = "certificate is zero";
            return out;
        }
        double res = std::max(0.0, -min_eig_sym(xm));
        if (cert.Xhat.dim() == n) res = std::max(res, (xm - cert.Xhat.mat()).cwiseAbs().maxCoeff());
        const double sign_term = lmi.c.dot(cert.xhat);
        res = std::max(res, std::max(0.0, sign_term));
        out.residual = res;
        if (res > tol * scale * (1.0 + cert.xhat.norm())) {
            out.why = "defining equations violated";
            return out;
        }
        out.valid = true;
        out.strict_sign = sign_term < -tol * scale * (1.0 + cert.xhat.norm());
    }
    return out;
}

StdLmi restrict_face(const StdLmi& lmi, const FrCertificate& cert, FaceInfo* info) {
    lmi.validate(false);
    const CertCheck chk = verify_certificate(lmi, cert);
    if (!chk.valid) throw InvalidCertificate("restrict_face needs a valid certificate: " + chk.why);
    if (chk.strict_sign)
        throw InvalidCertificate("strict-sign certificate proves infeasibility; no face to take");

    // Null space of the certificate matrix: eigenvectors whose eigenvalue is
    // below eps_rank times the largest one.
    const Matrix& cm = cert.face_matrix();
    EigSymResult eg = eig_sym(cm);
    const double lmax = eg.values.size() > 0 ? std::max(eg.values.maxCoeff(), 0.0) : 0.0;
    std::vector<Index> null_idx;
    for (Index i = 0; i < eg.values.size(); ++i)
        if (std::abs(eg.values(i)) <= eps_rank * std::max(lmax, 1e-300)) null_idx.push_back(i);
    const Index np = static_cast<Index>(null_idx.size());
    if (np == lmi.dim())
        throw InvalidCertificate("certificate matrix is numerically zero");
    Matrix q(lmi.dim(), np);
    for (Index k = 0; k < np; ++k) q.col(k) = eg.vectors.col(null_idx[k]);

    // Conjugate all terms.
    std::vector<SymMatrix> fr;
    fr.reserve(lmi.F.size());
    for (const auto& f : lmi.F) fr.emplace_back(Matrix(q.transpose() * f.mat() * q));

    // Prune conjugated F_j that are linearly dependent on the kept ones, and
    // insist that the dependency carries over to the objective coefficients.
    std::vector<Index> kept, pruned;
    const Index tri = np * (np + 1) / 2;
    Matrix basis(tri, lmi.num_vars());
    const double rt2 = std::sqrt(2.0);
    auto vec_of = [&](const Matrix& s) {
        Vector v(tri);
        Index k = 0;
        for (Index i = 0; i < np; ++i)
            for (Index l = 0; l <= i; ++l, ++k) v(k) = s(i, l) * (i == l ? 1.0 : rt2);
        return v;
    };
    Index nkept = 0;
    const double fscale = 1.0 + vectorized(lmi.F).norm();
    for (Index j = 1; j <= lmi.num_vars(); ++j) {
        Vector vj = vec_of(fr[j].mat());
        bool dependent;
        Vector coeff;
        if (nkept == 0) {
            dependent = vj.norm() <= 1e-10 * fscale;
            coeff = Vector(0);
        } else {
            const auto block = basis.leftCols(nkept);
            coeff = block.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(vj);
            dependent = (block * coeff - vj).norm() <= 1e-10 * fscale * (1.0 + coeff.norm());
        }
        if (dependent) {
            double c_pred = 0.0;
            for (Index k = 0; k < nkept; ++k) c_pred += coeff(k) * lmi.c(kept[k] - 1);
            if (std::abs(lmi.c(j - 1) - c_pred) >
                1e-8 * (1.0 + lmi.c.cwiseAbs().maxCoeff()) * (1.0 + coeff.norm()))
                throw InconsistentPruning(
                    "dependent reduced constraint disagrees with the objective; "
                    "original problem is infeasible");
            pruned.push_back(j);
        } else {
            basis.col(nkept++) = vj;
            kept.push_back(j);
        }
    }

    StdLmi out;
    out.F.reserve(1 + kept.size());
    out.F.push_back(fr[0]);
    Vector cr(static_cast<Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.F.push_back(fr[kept[k]]);
        cr(static_cast<Index>(k)) = lmi.c(kept[k] - 1);
    }
    out.c = cr;
    out.validate();

    if (info) {
        info->Q = q;
        info->kept_vars = kept;
        info->pruned_vars = pruned;
    }
    return out;
}

}  // namespace hinf
