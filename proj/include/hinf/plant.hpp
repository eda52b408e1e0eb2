#pragma once

// Generalized plant and closed-loop state-space containers together with the
// operations the synthesis pipeline needs: loop closure, stability and
// H-infinity norm evaluation, similarity transforms, and the differentiator
// augmentation used when the control feedthrough loses column rank.

#include <complex>
#include <vector>

#include "hinf/numerics.hpp"

namespace hinf {

// x' = A x + B1 w + B2 u,  z = C1 x + D11 w + D12 u.
struct Plant {
    Matrix A;    // n x n
    Matrix B1;   // n x m1
    Matrix B2;   // n x m2
    Matrix C1;   // p1 x n
    Matrix D11;  // p1 x m1
    Matrix D12;  // p1 x m2

    Index n() const { return A.rows(); }
    Index m1() const { return B1.cols(); }
    Index m2() const { return B2.cols(); }
    Index p1() const { return C1.rows(); }

    // Raises DimensionMismatch unless every block conforms.
    void validate() const;
};

// w -> z realization of a closed loop (or any stable LTI system).
struct ClosedLoop {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;

    void validate() const;
};

// Closed loop under u = K x: (A + B2 K, B1, C1 + D12 K, D11).
ClosedLoop close_loop(const Plant& p, const Matrix& k);

// True when every eigenvalue satisfies Re(lambda) < -band. The conservative
// default band treats near-axis eigenvalues as unstable.
bool is_hurwitz(const Matrix& a, double band = eps_imag);

// H-infinity norm of a stable system by gamma bisection on the Hamiltonian
// imaginary-axis test; rel_tol is the relative width of the final bracket.
// Raises UnstablePlant when A is not Hurwitz. n = 0 returns sigma_max(D).
double hinf_norm(const ClosedLoop& cl, double rel_tol = 1e-6);

// Similarity transform: (T^{-1} A T, T^{-1} B, C T, D).
ClosedLoop transform(const ClosedLoop& cl, const Matrix& t);

// Full-order gain (Rhat | Ktilde) T^{-1} from a reduced gain and the state
// transformation T = (Hhat | J).
Matrix recover_gain(const Matrix& rhat, const Matrix& ktilde, const Matrix& t);

// For a plant whose D12 is already in the normalized form (0 | Dhat12) with r
// leading zero columns: replace the first r input channels by their
// derivatives filtered through (s + alpha), giving
//   B2 -> ((A + alpha I) B21 | B22),  D12 -> (C1 B21 | Dhat12).
// The augmented plant gains r invariant zeros at -alpha and its reduced
// synthesis data is independent of alpha. r = 0 returns the plant unchanged.
Plant augment_differentiator(const Plant& p, double alpha);

// Number of leading columns of D12 that are zero at working precision.
Index leading_zero_columns(const Matrix& d12);

}  // namespace hinf
