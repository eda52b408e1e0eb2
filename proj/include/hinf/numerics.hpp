#pragma once

// Dense linear-algebra primitives shared by the whole library: contract-checked
// wrappers around Eigen decompositions plus a structurally symmetric matrix
// type. Everything here is deterministic for fixed input.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "hinf/errors.hpp"

namespace hinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Relative cutoff for numerical rank: sigma_i counts while sigma_i > eps_rank * sigma_max.
inline constexpr double eps_rank = 1e-8;

// Half-width of the band around the imaginary axis inside which an eigenvalue
// or zero is treated as sitting on the axis. Deliberately conservative.
inline constexpr double eps_imag = 1e-9;

// He(M) = M + M^T.
inline Matrix he(const Matrix& m) { return m + m.transpose(); }

// Symmetric part (M + M^T) / 2.
inline Matrix sym_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Trace inner product A . B = Trace(A B^T).
inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// Largest absolute entry; 0 for an empty matrix.
inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Symmetric matrix value type. The lower triangle of the input is
// authoritative; the mirrored copy is materialized on construction so that
// downstream code never sees asymmetry drift.
class SymMatrix {
  public:
    SymMatrix() = default;

    explicit SymMatrix(const Matrix& m) {
        if (m.rows() != m.cols())
            throw DimensionMismatch("SymMatrix requires a square matrix");
        m_ = m.selfadjointView<Eigen::Lower>();
    }

    const Matrix& mat() const { return m_; }
    Index dim() const { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }

  private:
    Matrix m_;
};

// Full SVD M = U * diag(sigma) * V^T with sigma non-increasing; U, V orthogonal.
struct SvdResult {
    Matrix U;
    Vector sigma;
    Matrix V;
};

SvdResult svd(const Matrix& m);

// Number of singular values above eps_rank * sigma_max (0 for an all-zero sigma).
Index numerical_rank(const Vector& sigma);
Index numerical_rank(const Matrix& m);

// One eigenvalue of the pencil (M, N): M v = lambda N v. Infinite eigenvalues
// (beta ~ 0 in the QZ sense) carry finite = false and an indicative vector.
struct GenEig {
    std::complex<double> lambda;
    CVector v;
    bool finite = true;
};

// Eigenvalues of the square pencil (M, N) via QZ; for each finite pair the
// returned v satisfies ||(M - lambda N) v|| <= 1e-8 (||M|| + |lambda| ||N||) ||v||.
std::vector<GenEig> generalized_eigs(const Matrix& m, const Matrix& n);

// Symmetric eigendecomposition; values non-decreasing, vectors orthonormal.
struct EigSymResult {
    Vector values;
    Matrix vectors;
};

EigSymResult eig_sym(const Matrix& m);

// Orthonormal basis J (n x (n-r)) of the orthogonal complement of range(H),
// H being n x r with full column rank. The result depends only on span(H):
// it is read off a column-pivoted QR of the projector I - H (H^T H)^{-1} H^T,
// so two bases of the same span produce the same J up to roundoff. r = 0
// returns the identity.
Matrix orth_complement(const Matrix& h);

// Solve A X = B for square A; raises SingularMatrix when the condition
// estimate exceeds 1/eps_rank and NumericalFailure when the residual check
// fails afterwards.
Matrix solve_linear(const Matrix& a, const Matrix& b);

// Smallest eigenvalue of a symmetric matrix (helper used by cone checks).
double min_eig_sym(const Matrix& m);

}  // namespace hinf
