#pragma once

// Assembly of the state-feedback synthesis LMI in standard form, its dual
// block view, and the two structured reductions (stable-zero certificate /
// rank-deficient feedthrough) that produce an equivalent well-posed problem.

#include <iosfwd>

#include "hinf/fr.hpp"
#include "hinf/plant.hpp"
#include "hinf/zeros.hpp"

namespace hinf {

// Variable layout for the synthesis LMI: gamma first, then the lower triangle
// of X in row-major order, then the rows of Y.
struct VarMap {
    Index n = 0;
    Index m2 = 0;

    Index num_vars() const { return 1 + n * (n + 1) / 2 + m2 * n; }
    Index gamma_index() const { return 0; }
    // i >= j (lower triangle, row-major).
    Index x_index(Index i, Index j) const { return 1 + i * (i + 1) / 2 + j; }
    Index y_index(Index k, Index l) const { return 1 + n * (n + 1) / 2 + k * n + l; }

    Vector pack(double gamma, const Matrix& x, const Matrix& y) const;

    struct Unpacked {
        double gamma = 0.0;
        Matrix X;
        Matrix Y;
    };
    Unpacked unpack(const Vector& v) const;
};

// Synthesis LMI over (gamma, X, Y) in standard form:
//   - constraint block of size N0 = n + p1 + m1 encoding
//       -[ He(A X + B2 Y)   (C1 X + D12 Y)^T   B1
//          C1 X + D12 Y     -gamma I           D11
//          B1^T             D11^T              -gamma I ]  PSD
//   - appended n x n diagonal block encoding X PSD,
// so N = N0 + n and m = 1 + n(n+1)/2 + m2 n.
struct SynthLmi {
    StdLmi lmi;
    VarMap map;
    Index n = 0, p1 = 0, m1 = 0, m2 = 0;

    Index N0() const { return n + p1 + m1; }
};

SynthLmi assemble_synth(const Plant& p);

// Block view of the dual of the synthesis LMI. The dual variable of the
// standard pair is an (N0 + n) square matrix; splitting its leading N0 block
//   Z = [ Z11  Z21^T  Z31^T
//         Z21  Z22    Z32^T
//         Z31  Z32    Z33  ]
// gives the dual problem
//   sup 2 (B1^T . Z31 + D11^T . Z32)
//   s.t. trace(Z22) + trace(Z33) = 1,
//        B2^T Z11 + D12^T Z21 = 0,
//        He(A^T Z11 + C1^T Z21) PSD,   Z PSD,
// where the appended block of the standard dual variable must equal
// He(A^T Z11 + C1^T Z21).
struct DualBlocks {
    Matrix Z11, Z21, Z22, Z31, Z32, Z33;
    Matrix W;  // appended block
};

struct DualResiduals {
    double trace_eq = 0.0;       // |trace(Z22) + trace(Z33) - 1|
    double lin_eq = 0.0;         // max |B2^T Z11 + D12^T Z21|
    double w_consistency = 0.0;  // max |W - He(A^T Z11 + C1^T Z21)|
    double z_min_eig = 0.0;      // min eig of the leading N0 block
    double w_min_eig = 0.0;      // min eig of W
};

class DualView {
  public:
    explicit DualView(Plant p);

    DualBlocks split(const Matrix& y_std) const;
    Matrix embed(const DualBlocks& b) const;  // zero cross terms with the appended block
    double objective(const DualBlocks& b) const;
    DualResiduals residuals(const DualBlocks& b) const;
    const Plant& plant() const { return p_; }

  private:
    Plant p_;
};

DualView assemble_dual(const Plant& p);

enum class ReductionMode { Identity, FullRank, RankDeficientD12 };

// Row/column blocks of the transformed data: A-tilde = T^{-1} A T partitioned
// at row/column r, B-tilde = T^{-1} (B1, B2) partitioned at row r, and
// C-tilde = C1 T partitioned at column r.
struct TildeBlocks {
    Matrix A11, A12, A21, A22;
    Matrix B11, B12;  // rows of T^{-1} B1
    Matrix B21, B22;  // rows of T^{-1} B2
    Matrix C11, C12;  // columns of C1 T
};

struct ReductionResult {
    ReductionMode mode = ReductionMode::Identity;
    Index r = 0;
    Matrix T;     // (Hhat | J) in full-rank mode, (B21 | L) in feedthrough mode
    Matrix U1;    // top r rows of T^{-1}
    Matrix U2;    // bottom n-r rows of T^{-1}
    TildeBlocks tilde;
    Plant reduced_plant;  // B2/D12 slots carry E1/E2 in feedthrough mode
    SynthLmi reduced_lmi;
    ZeroCertificate cert;  // populated in full-rank mode
    Matrix Rhat_gain;      // left block of (Rhat_gain | Ktilde) T^{-1} for gain recovery
    Matrix V;              // input basis change (identity outside feedthrough mode)
    SymMatrix What{Matrix::Zero(0, 0)};  // face matrix for the dual-side restriction
    Matrix Xhat;           // dual certificate (gamma=0, Xhat, Yhat)
    Matrix Yhat;
    std::vector<double> cancelled_modes;  // real parts of the eliminated dynamics

    Matrix Tinv() const;
};

// Reduction driven by a stable-zero certificate (full-column-rank D12 path).
// Checks the redundancy identities A~21 = -B~22 Rhat and C~11 = -D12 Rhat.
// An empty certificate yields the identity reduction.
ReductionResult reduce_full_rank(const Plant& p, const ZeroCertificate& cert);

// Orthogonal input-basis change u = V u' with D12 V = (0 | Dhat12).
struct NormalizedD12 {
    Plant p;  // the plant expressed in the new input basis
    Matrix V;
    Index r = 0;  // number of zero columns = m2 - rank(D12)
};

NormalizedD12 normalize_d12(const Plant& p);

// Reduction for rank-deficient D12 on an already-normalized plant:
// T = (B21 | L), What = B21 B21^T, reduced data
//   (A~22, B~12, E1 = (A~21 | B~222), C~12, D11, E2 = (C~11 | Dhat12)).
// The recovered full-order gain ((-I_r; 0) | Ktilde) T^{-1} drives the
// differentiator-augmented system; see augment_differentiator.
ReductionResult reduce_rank_deficient(const NormalizedD12& nd);

// Gain K = Y X^{-1} from a synthesis solution. X is inverted through its
// eigendecomposition with the eigenvalues floored at machine epsilon times
// the largest one: at a boundary optimum X is often numerically singular and
// the intended controller is the resulting high-gain feedback, so a
// condition-number gate would reject exactly the interesting solutions.
// Throws SingularMatrix when X has no positive eigenvalue at all.
Matrix gain_from_solution(const Matrix& x, const Matrix& y);

// Text serialization: header "N m", then F0..Fm as whitespace-separated lower
// triangles, then c.
void write_stdlmi(std::ostream& os, const StdLmi& lmi);
StdLmi read_stdlmi(std::istream& is);

}  // namespace hinf
