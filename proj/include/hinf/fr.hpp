#pragma once

// Standard-form LMI pair and one step of facial reduction over it.
//
// Primal:  inf  c^T x   s.t.  X = sum_j x_j F_j - F0  PSD
// Dual:    sup  F0 . Y  s.t.  F_j . Y = c_j,  Y  PSD
//
// A degeneracy certificate for one side restricts the other side's cone to a
// face; conjugating every F by an orthonormal basis of the certificate's null
// space produces the equivalent smaller problem.

#include <optional>
#include <string>
#include <vector>

#include "hinf/numerics.hpp"

namespace hinf {

struct StdLmi {
    // F[0] is the constant term F0; F[1..m] multiply the variables.
    std::vector<SymMatrix> F;
    Vector c;

    Index dim() const { return F.empty() ? 0 : F[0].dim(); }
    Index num_vars() const { return static_cast<Index>(F.size()) - 1; }

    // Shape conformity plus, optionally, linear independence of F_1..F_m via
    // an SVD of the stacked vectorizations.
    void validate(bool check_independence = true) const;

    Matrix eval_slack(const Vector& x) const;  // sum x_j F_j - F0
    double objective(const Vector& x) const { return c.dot(x); }
    double dual_objective(const Matrix& y) const { return inner(F[0].mat(), y); }
};

enum class CertSide {
    Primal,  // Yhat PSD, F_j . Yhat = 0 for all j, F0 . Yhat >= 0
    Dual,    // Xhat = sum_j xhat_j F_j PSD, c^T xhat <= 0, (xhat, Xhat) != 0
};

struct FrCertificate {
    CertSide side = CertSide::Primal;
    SymMatrix Yhat;  // primal side
    Vector xhat;     // dual side
    SymMatrix Xhat;  // dual side (redundant with xhat; kept for inspection)

    // The matrix whose null space defines the face.
    const Matrix& face_matrix() const {
        return side == CertSide::Primal ? Yhat.mat() : Xhat.mat();
    }
};

struct CertCheck {
    bool valid = false;
    // Strict sign term (primal: F0 . Yhat > 0; dual: c^T xhat < 0) certifies
    // infeasibility of the opposite problem instead of a face.
    bool strict_sign = false;
    double residual = 0.0;
    std::string why;
};

CertCheck verify_certificate(const StdLmi& lmi, const FrCertificate& cert, double tol = 1e-8);

struct FaceInfo {
    Matrix Q;                        // null-space basis used for conjugation
    std::vector<Index> kept_vars;    // 1-based indices of surviving F_j
    std::vector<Index> pruned_vars;  // 1-based indices removed as dependent
};

// One facial-reduction step: conjugate every F by the orthonormal null basis
// Q of the certificate matrix, giving an N' x N' problem with
// N' = N - rank(certificate). Conjugated F_j that become linearly dependent
// are pruned after checking that their objective coefficients are consistent
// with the dependency (a conflict means the original problem is infeasible
// and raises InconsistentPruning). Requires a valid zero-sign certificate.
StdLmi restrict_face(const StdLmi& lmi, const FrCertificate& cert, FaceInfo* info = nullptr);

}  // namespace hinf
