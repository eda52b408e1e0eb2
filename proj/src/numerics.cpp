#include "hinf/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hinf {

SvdResult svd(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dec.info() != Eigen::Success)
        throw NumericalFailure("svd did not converge");
    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    // Pad the singular value vector to min(rows, cols); Jacobi already does,
    // but guard against surprises so the contract (sigma non-increasing, size
    // min(m, n)) holds unconditionally.
    const Index k = std::min(m.rows(), m.cols());
    if (out.sigma.size() != k)
        throw NumericalFailure("svd returned unexpected number of singular values");
    return out;
}

Index numerical_rank(const Vector& sigma) {
    if (sigma.size() == 0) return 0;
    const double cutoff = eps_rank * sigma(0);
    Index r = 0;
    for (Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff && sigma(i) > 0.0) ++r;
    return r;
}

Index numerical_rank(const Matrix& m) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> dec(m);
    return numerical_rank(Vector(dec.singularValues()));
}

std::vector<GenEig> generalized_eigs(const Matrix& m, const Matrix& n) {
    if (m.rows() != m.cols() || n.rows() != n.cols() || m.rows() != n.rows())
        throw DimensionMismatch("generalized_eigs requires square pencils of equal size");
    const Index sz = m.rows();
    std::vector<GenEig> out;
    if (sz == 0) return out;

    Eigen::GeneralizedEigenSolver<Matrix> dec;
    dec.setMaxIterations(200 * static_cast<int>(sz));
    dec.compute(m, n, /*computeEigenvectors=*/false);
    if (dec.info() != Eigen::Success)
        throw NumericalFailure("QZ iteration did not converge");

    const double m_norm = m.norm();
    const double n_norm = n.norm();
    const double scale = std::max(1.0, std::max(m_norm, n_norm));

    for (Index i = 0; i < sz; ++i) {
        const std::complex<double> alpha = dec.alphas()(i);
        const double beta = dec.betas()(i);
        GenEig ge;
        // beta ~ 0 relative to the pencil scale marks an infinite eigenvalue.
        ge.finite = std::abs(beta) > 1e-12 * (std::abs(alpha) + scale);
        if (ge.finite) {
            ge.lambda = alpha / beta;
            // Null vector of (M - lambda N) from the smallest right singular
            // vector; this choice is also what multiplicity handling relies on.
            CMatrix pencil = m.cast<std::complex<double>>() - ge.lambda * n.cast<std::complex<double>>();
            Eigen::JacobiSVD<CMatrix> ps(pencil, Eigen::ComputeFullV);
            ge.v = ps.matrixV().col(sz - 1);
            const double res = (pencil * ge.v).norm();
            const double bound = 1e-8 * (m_norm + std::abs(ge.lambda) * n_norm + 1.0) * ge.v.norm();
            if (res > bound)
                throw NumericalFailure("generalized eigenpair residual exceeds tolerance");
        } else {
            ge.lambda = std::complex<double>(std::numeric_limits<double>::infinity(), 0.0);
            Eigen::JacobiSVD<Matrix> ns(n, Eigen::ComputeFullV);
            ge.v = ns.matrixV().col(sz - 1).cast<std::complex<double>>();
        }
        out.push_back(std::move(ge));
    }
    return out;
}

EigSymResult eig_sym(const Matrix& m) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("eig_sym requires a square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> dec(sym_part(m));
    if (dec.info() != Eigen::Success)
        throw NumericalFailure("symmetric eigendecomposition failed");
    return {dec.eigenvalues(), dec.eigenvectors()};
}

double min_eig_sym(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return eig_sym(m).values(0);
}

Matrix orth_complement(const Matrix& h) {
    const Index n = h.rows();
    const Index r = h.cols();
    if (r == 0) return Matrix::Identity(n, n);
    if (r > n) throw DimensionMismatch("orth_complement: more columns than rows");

    SvdResult hs = svd(h);
    if (numerical_rank(hs.sigma) < r)
        throw RankDeficient("orth_complement requires full column rank");

    // Projector onto the complement depends only on span(H); column-pivoted QR
    // of the projector then gives a basis that is stable across different
    // column bases of the same span.
    Matrix u1 = hs.U.leftCols(r);
    Matrix proj = Matrix::Identity(n, n) - u1 * u1.transpose();
    Eigen::ColPivHouseholderQR<Matrix> qr(proj);
    Matrix q = qr.householderQ();
    Matrix j = q.leftCols(n - r);

    // The QR basis of a rank-(n-r) projector can pick up components along
    // range(H) only at roundoff level; scrub them and re-orthonormalize.
    j = proj * j;
    Eigen::HouseholderQR<Matrix> tidy(j);
    Matrix jq = tidy.householderQ();
    j = jq.leftCols(n - r);

    if (max_abs(j.transpose() * h) > 1e-12 * std::max(1.0, max_abs(h)))
        throw NumericalFailure("orth_complement basis not orthogonal to input");
    return j;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols())
        throw DimensionMismatch("solve_linear requires a square matrix");
    if (a.rows() != b.rows())
        throw DimensionMismatch("solve_linear: right-hand side row count mismatch");
    if (a.rows() == 0) return Matrix(0, b.cols());

    Eigen::JacobiSVD<Matrix> dec(a);
    const Vector& s = dec.singularValues();
    if (s(0) <= 0.0 || s(s.size() - 1) <= eps_rank * s(0))
        throw SingularMatrix("solve_linear: matrix singular at working precision");

    Matrix x = Eigen::FullPivLU<Matrix>(a).solve(b);
    const double scale = a.norm() * x.norm() + b.norm();
    if ((a * x - b).norm() > 1e-8 * std::max(1.0, scale))
        throw NumericalFailure("solve_linear residual check failed");
    return x;
}

}  // namespace hinf
