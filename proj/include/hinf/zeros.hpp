#pragma once

// Structural diagnostics for the synthesis LMI pair: stabilizability of
// (A, B2), invariant zeros of the (A, B2, C1, D12) subsystem, and the
// degeneracy certificates built from them.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "hinf/plant.hpp"

namespace hinf {

// Certificate scale for residual checks on plant data.
inline double certificate_scale(const Plant& p) {
    return 1e-8 * (1.0 + p.A.norm() + p.B2.norm() + p.C1.norm() + p.D12.norm());
}

struct StabilizabilityResult {
    bool stabilizable = true;
    // Present when stabilizable is false: an eigenvalue with Re >= -eps_imag
    // at which (A - lambda I | B2) loses row rank, plus a left eigenvector
    // certifying it (A^T eta = lambda eta, B2^T eta = 0).
    std::complex<double> offending_lambda{0.0, 0.0};
    CVector offending_eta;
};

// Eigenvalue (PBH) test over the closed right half plane; the band around the
// axis counts as "right" so marginal modes must be controllable too.
StabilizabilityResult is_stabilizable(const Matrix& a, const Matrix& b2);

struct InvariantZero {
    std::complex<double> lambda;
    CVector eta;  // state part of the pencil null vector (n)
    CVector xi;   // input part (m2)
};

// Invariant zeros of (A, B2, C1, D12): the lambda at which the Rosenbrock
// pencil [[A - lambda I, B2], [C1, D12]] loses column rank, with null vectors
// taken from the smallest right singular vectors (a zero of geometric
// multiplicity k contributes k entries sharing the same lambda). Square
// pencils (p1 == m2) go through the QZ eigenvalues; otherwise candidates come
// from seeded random row compressions to a square pencil and every candidate
// is verified by a rank test of the full pencil. Ambiguous non-square sweeps
// raise NonSquarePencilUnsupported rather than guessing.
std::vector<InvariantZero> invariant_zeros(const Plant& p);

// Real certificate data built from the strictly stable invariant zeros:
//   A Hhat + B2 Rhat = Hhat Lambda,  C1 Hhat + D12 Rhat = 0,
// where a complex pair lambda = a +/- b i occupies two columns (Re, Im) and a
// 2x2 block [[a, b], [-b, a]] in Lambda. r may be zero (no stable zeros).
struct ZeroCertificate {
    Matrix Hhat;    // n x r, full column rank
    Matrix Rhat;    // m2 x r
    Matrix Lambda;  // r x r block diagonal
    std::vector<std::complex<double>> lambdas;  // one entry per zero column-block
    std::vector<std::string> notes;             // e.g. multiplicity basis choices

    Index r() const { return Hhat.cols(); }
};

// Collects strictly stable zeros (Re < -eps_imag) into a certificate.
// Raises ImaginaryAxisZero when a zero sits inside the axis band and
// DependentNullVectors when the collected Hhat loses column rank.
ZeroCertificate stable_zero_certificate(const Plant& p);

// What = -He(A Xhat + B2 Yhat) with Xhat = Hhat Hhat^T, Yhat = Rhat Hhat^T.
// Verified against the closed form -2 Hhat sym(Lambda) Hhat^T, PSD of rank r.
SymMatrix derived_w(const Plant& p, const ZeroCertificate& cert);

// Degeneracy certificate for the primal synthesis LMI from an uncontrollable
// mode: Z11 = eta conj(eta)^T + conj(eta) eta^T, which satisfies
// He(A^T Z11) = 2 Re(lambda) Z11 >= 0 and B2^T Z11 = 0. Requires
// A^T eta = lambda eta, B2^T eta = 0, Re(lambda) >= -eps_imag.
SymMatrix primal_fr_certificate(const Plant& p, const std::complex<double>& lambda,
                                const CVector& eta);

// Degeneracy certificate for the dual synthesis LMI: (gamma, X, Y) =
// (0, Hhat Hhat^T, Rhat Hhat^T) satisfying C1 X + D12 Y = 0 and
// -He(A X + B2 Y) PSD with X PSD.
struct DualFrCertificate {
    double gamma = 0.0;
    SymMatrix Xhat;
    Matrix Yhat;  // m2 x n
};

DualFrCertificate dual_fr_certificate(const Plant& p, const ZeroCertificate& cert);

// Same certificate family for a plant already in the normalized form
// D12 = (0 | Dhat12): X = 0, Y = (-B21^T / 2; 0), making
// -He(A X + B2 Y) = B21 B21^T.
DualFrCertificate dual_fr_certificate_d12(const Plant& p_normalized);

// Largest violation of the defining equations of a dual certificate:
// max(||C1 X + D12 Y||_max, negative part of min eig of -He(A X + B2 Y),
//     negative part of min eig of X).
double dual_certificate_residual(const Plant& p, const DualFrCertificate& cert);

struct FeasibilityReport {
    StabilizabilityResult stab;
    bool d12_full_column_rank = true;
    Index d12_rank = 0;
    std::vector<InvariantZero> zeros;  // all invariant zeros of the subsystem
    bool has_imaginary_axis_zero = false;
    // Strong feasibility of the primal synthesis LMI <=> stabilizability;
    // strong feasibility of its dual <=> full-column-rank D12 and no
    // invariant zeros in the closed left half plane.
    bool primal_strongly_feasible = true;
    bool dual_strongly_feasible = true;
    std::vector<std::string> notes;
};

FeasibilityReport feasibility_report(const Plant& p);

}  // namespace hinf
