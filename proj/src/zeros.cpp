#include "hinf/zeros.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace hinf {

namespace {

CMatrix rosenbrock_pencil(const Plant& p, const std::complex<double>& lambda) {
    const Index n = p.n(), m2 = p.m2(), p1 = p.p1();
    CMatrix out(n + p1, n + m2);
    out.topLeftCorner(n, n) =
        p.A.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n);
    out.topRightCorner(n, m2) = p.B2.cast<std::complex<double>>();
    out.bottomLeftCorner(p1, n) = p.C1.cast<std::complex<double>>();
    out.bottomRightCorner(p1, m2) = p.D12.cast<std::complex<double>>();
    return out;
}

double data_scale(const Plant& p) {
    return 1.0 + p.A.norm() + p.B2.norm() + p.C1.norm() + p.D12.norm();
}

// Orthonormal row compression R^{p1} -> R^{m2} drawn from a fixed seed, so
// the candidate search is deterministic.
Matrix row_compression(Index m2, Index p1, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(p1, m2);
    for (Index j = 0; j < m2; ++j)
        for (Index i = 0; i < p1; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    return q.leftCols(m2).transpose();
}

// Finite spectrum of [[A - lambda I, B2], [S C1, S D12]] for a square
// compression S (identity when p1 == m2). Returns false when the compressed
// pencil is singular (QZ produced indeterminate alpha/beta pairs), in which
// case callers must discard the candidate list.
bool compressed_candidates(const Plant& p, const Matrix& s,
                           std::vector<std::complex<double>>* out) {
    const Index n = p.n(), m2 = p.m2();
    Matrix m(n + m2, n + m2);
    m.topLeftCorner(n, n) = p.A;
    m.topRightCorner(n, m2) = p.B2;
    m.bottomLeftCorner(m2, n) = s * p.C1;
    m.bottomRightCorner(m2, m2) = s * p.D12;
    Matrix nn = Matrix::Zero(n + m2, n + m2);
    nn.topLeftCorner(n, n).setIdentity();

    Eigen::GeneralizedEigenSolver<Matrix> dec;
    dec.setMaxIterations(200 * static_cast<int>(n + m2));
    dec.compute(m, nn, /*computeEigenvectors=*/false);
    if (dec.info() != Eigen::Success) return false;

    const double scale = std::max(1.0, m.norm());
    for (Index i = 0; i < dec.alphas().size(); ++i) {
        const std::complex<double> alpha = dec.alphas()(i);
        const double beta = dec.betas()(i);
        if (std::abs(beta) > 1e-10 * scale) {
            out->push_back(alpha / beta);
        } else if (std::abs(alpha) < 1e-10 * scale) {
            // alpha ~ beta ~ 0: the compressed pencil is singular and its
            // spectrum meaningless.
            return false;
        }
    }
    return true;
}

}  // namespace

StabilizabilityResult is_stabilizable(const Matrix& a, const Matrix& b2) {
    if (a.rows() != a.cols()) throw DimensionMismatch("A must be square");
    if (b2.rows() != a.rows()) throw DimensionMismatch("B2 row count must match A");
    const Index n = a.rows();
    StabilizabilityResult out;
    if (n == 0) return out;

    Eigen::EigenSolver<Matrix> dec(a, /*computeEigenvectors=*/false);
    if (dec.info() != Eigen::Success) throw NumericalFailure("eigenvalues of A failed");
    const double scale = std::max(1.0, a.norm() + b2.norm());

    for (Index i = 0; i < n; ++i) {
        const std::complex<double> lambda = dec.eigenvalues()(i);
        if (lambda.real() < -eps_imag) continue;
        if (lambda.imag() < 0.0) continue;  // conjugate pairs: test once
        CMatrix pbh(n, n + b2.cols());
        pbh.leftCols(n) = a.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n);
        pbh.rightCols(b2.cols()) = b2.cast<std::complex<double>>();
        Eigen::JacobiSVD<CMatrix> sv(pbh, Eigen::ComputeFullU);
        const Vector sig = sv.singularValues();
        if (sig(n - 1) <= eps_rank * std::max(sig(0), scale * 1e-300)) {
            out.stabilizable = false;
            // Left null vector u: u^H (A - lambda I | B2) = 0, hence
            // A^T u = conj(lambda) u and B2^T u = 0.
            out.offending_eta = sv.matrixU().col(n - 1);
            out.offending_lambda = std::conj(lambda);
            return out;
        }
    }
    return out;
}

std::vector<InvariantZero> invariant_zeros(const Plant& p) {
    p.validate();
    const Index n = p.n(), m2 = p.m2(), p1 = p.p1();
    std::vector<std::complex<double>> candidates;

    if (p1 == m2) {
        if (!compressed_candidates(p, Matrix::Identity(p1, p1), &candidates))
            throw NumericalFailure("zero pencil is singular; invariant zeros undefined");
    } else if (p1 > m2) {
        // Any pencil null vector survives every row compression, so true zeros
        // always appear among the compressed spectra; spurious candidates are
        // removed by the rank test below.
        int usable = 0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            std::vector<std::complex<double>> cand;
            if (compressed_candidates(p, row_compression(m2, p1, 0xC0FFEEULL + k), &cand)) {
                ++usable;
                candidates.insert(candidates.end(), cand.begin(), cand.end());
            }
        }
        if (usable < 2)
            throw NonSquarePencilUnsupported(
                "rank sweep candidates unavailable: compressed pencils singular");
    } else {
        // Fewer outputs than inputs: the pencil has more columns than rows and
        // never has full column rank; the zero notion is ill-posed here.
        throw NonSquarePencilUnsupported("pencil with p1 < m2 has no column-rank zeros");
    }

    // Cluster candidates, then verify each representative by a rank test of
    // the full pencil; multiplicity = number of negligible singular values.
    std::vector<std::complex<double>> reps;
    for (const auto& c : candidates) {
        bool dup = false;
        for (const auto& r : reps)
            if (std::abs(c - r) <= 1e-6 * (1.0 + std::abs(r))) { dup = true; break; }
        if (!dup) reps.push_back(c);
    }
    std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    const double scale = data_scale(p);
    std::vector<InvariantZero> zeros;
    for (const auto& lambda : reps) {
        const bool real_lambda = std::abs(lambda.imag()) <= 1e-9 * (1.0 + std::abs(lambda));
        const std::complex<double> lam =
            real_lambda ? std::complex<double>(lambda.real(), 0.0) : lambda;
        // Real zeros of a real pencil get a real SVD so that a zero of
        // multiplicity k yields a real orthonormal null basis.
        CMatrix vbasis;
        Vector sig;
        if (real_lambda) {
            Matrix pen = rosenbrock_pencil(p, lam).real();
            Eigen::JacobiSVD<Matrix> sv(pen, Eigen::ComputeFullV);
            sig = sv.singularValues();
            vbasis = sv.matrixV().cast<std::complex<double>>();
        } else {
            CMatrix pen = rosenbrock_pencil(p, lam);
            Eigen::JacobiSVD<CMatrix> sv(pen, Eigen::ComputeFullV);
            sig = sv.singularValues();
            vbasis = sv.matrixV();
        }
        const double cutoff = eps_rank * std::max(sig(0), 1e-300);
        Index mult = 0;
        for (Index i = 0; i < sig.size(); ++i)
            if (sig(i) <= cutoff) ++mult;
        if (mult == 0) continue;  // compression artifact
        const CMatrix pen = rosenbrock_pencil(p, lam);
        for (Index k = 0; k < mult; ++k) {
            InvariantZero z;
            z.lambda = lam;
            CVector v = vbasis.col(n + m2 - 1 - k);
            z.eta = v.head(n);
            z.xi = v.tail(m2);
            if ((pen * v).norm() > 1e-7 * scale)
                throw NumericalFailure("zero null vector residual too large");
            zeros.push_back(std::move(z));
        }
    }
    return zeros;
}

ZeroCertificate stable_zero_certificate(const Plant& p) {
    const std::vector<InvariantZero> zs = invariant_zeros(p);
    const Index n = p.n(), m2 = p.m2();

    for (const auto& z : zs)
        if (std::abs(z.lambda.real()) <= eps_imag)
            throw ImaginaryAxisZero("invariant zero on the imaginary axis");

    ZeroCertificate cert;
    std::vector<Matrix> hcols, rcols;
    std::vector<Matrix> blocks;

    std::size_t mult_count = 0;
    for (const auto& z : zs) {
        if (z.lambda.real() >= 0.0) continue;  // only strictly stable zeros
        if (z.lambda.imag() < 0.0) continue;   // conjugates realified once
        if (std::abs(z.lambda.imag()) <= eps_imag) {
            // Real zero: normalize the (real up to phase) null vector.
            CVector v(n + m2);
            v << z.eta, z.xi;
            // Rotate the phase so the largest entry is real, then take Re.
            Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            v *= std::abs(v(imax)) / v(imax);
            Vector vr = v.real();
            vr.normalize();
            hcols.push_back(vr.head(n));
            rcols.push_back(vr.tail(m2));
            blocks.push_back((Matrix(1, 1) << z.lambda.real()).finished());
            cert.lambdas.push_back(std::complex<double>(z.lambda.real(), 0.0));
        } else {
            // Complex pair: two real columns (Re v, Im v), 2x2 rotation block.
            CVector v(n + m2);
            v << z.eta, z.xi;
            const double a = z.lambda.real(), b = z.lambda.imag();
            Vector vre(n + m2), vim(n + m2);
            vre << v.real();
            vim << v.imag();
            const double s = std::max(vre.norm(), vim.norm());
            vre /= s;
            vim /= s;
            hcols.push_back(vre.head(n));
            rcols.push_back(vre.tail(m2));
            hcols.push_back(vim.head(n));
            rcols.push_back(vim.tail(m2));
            blocks.push_back((Matrix(2, 2) << a, b, -b, a).finished());
            cert.lambdas.push_back(z.lambda);
        }
    }
    // Count repeated lambdas for the note about multiplicity basis choice.
    for (std::size_t i = 1; i < cert.lambdas.size(); ++i)
        if (std::abs(cert.lambdas[i] - cert.lambdas[i - 1]) <= 1e-9) ++mult_count;
    if (mult_count > 0)
        cert.notes.push_back(
            "zero with geometric multiplicity > 1: null basis taken from smallest singular vectors");

    const Index r = static_cast<Index>(hcols.size());
    cert.Hhat.resize(n, r);
    cert.Rhat.resize(m2, r);
    cert.Lambda = Matrix::Zero(r, r);
    Index col = 0;
    std::size_t c = 0;
    for (const Matrix& blk : blocks) {
        const Index w = blk.rows();
        cert.Lambda.block(col, col, w, w) = blk;
        for (Index k = 0; k < w; ++k, ++c) {
            cert.Hhat.col(col + k) = hcols[c];
            cert.Rhat.col(col + k) = rcols[c];
        }
        col += w;
    }

    if (r > 0 && numerical_rank(cert.Hhat) < r)
        throw DependentNullVectors("state parts of the zero null vectors are dependent");

    const double tol = certificate_scale(p);
    if (r > 0) {
        const double res1 = (p.A * cert.Hhat + p.B2 * cert.Rhat - cert.Hhat * cert.Lambda)
                                .cwiseAbs()
                                .maxCoeff();
        const double res2 = (p.C1 * cert.Hhat + p.D12 * cert.Rhat).cwiseAbs().maxCoeff();
        if (res1 > tol || res2 > tol)
            throw InvalidCertificate("zero certificate residuals exceed tolerance");
    }
    return cert;
}

SymMatrix derived_w(const Plant& p, const ZeroCertificate& cert) {
    const Matrix xhat = cert.Hhat * cert.Hhat.transpose();
    const Matrix yhat = cert.Rhat * cert.Hhat.transpose();
    const Matrix w = -he(p.A * xhat + p.B2 * yhat);
    const Matrix closed = -2.0 * cert.Hhat * sym_part(cert.Lambda) * cert.Hhat.transpose();
    const double tol = 10.0 * certificate_scale(p) * (1.0 + xhat.norm());
    if ((w - closed).cwiseAbs().maxCoeff() > tol)
        throw InvalidCertificate("derived W disagrees with its closed form");
    if (cert.r() > 0 && min_eig_sym(w) < -tol)
        throw InvalidCertificate("derived W is not positive semidefinite");
    if (numerical_rank(w) != cert.r())
        throw InvalidCertificate("derived W rank differs from the zero count");
    return SymMatrix(w);
}

SymMatrix primal_fr_certificate(const Plant& p, const std::complex<double>& lambda,
                                const CVector& eta) {
    p.validate();
    if (eta.size() != p.n()) throw DimensionMismatch("eta must have length n");
    const double tol = certificate_scale(p) * std::max(1.0, eta.norm());
    if (lambda.real() < -eps_imag)
        throw InvalidCertificate("mode must lie in the closed right half plane");
    if ((p.A.transpose().cast<std::complex<double>>() * eta - lambda * eta).norm() > tol)
        throw InvalidCertificate("eta is not a left eigenvector at lambda");
    if ((p.B2.transpose().cast<std::complex<double>>() * eta).norm() > tol)
        throw InvalidCertificate("eta is not orthogonal to the input directions");

    const Matrix z11 = (eta * eta.adjoint() + eta.conjugate() * eta.transpose()).real();
    // He(A^T Z11) = (lambda + conj(lambda)) Z11, PSD since Re(lambda) >= 0.
    const Matrix lhs = he(p.A.transpose() * z11);
    const Matrix rhs = 2.0 * lambda.real() * z11;
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 10.0 * tol * (1.0 + z11.norm()))
        throw InvalidCertificate("primal certificate identity failed");
    return SymMatrix(z11);
}

DualFrCertificate dual_fr_certificate(const Plant& p, const ZeroCertificate& cert) {
    DualFrCertificate out;
    out.gamma = 0.0;
    out.Xhat = SymMatrix(Matrix(cert.Hhat * cert.Hhat.transpose()));
    out.Yhat = cert.Rhat * cert.Hhat.transpose();
    const double res = dual_certificate_residual(p, out);
    if (cert.r() > 0 && res > 10.0 * certificate_scale(p) * (1.0 + out.Xhat.mat().norm()))
        throw InvalidCertificate("dual certificate residual exceeds tolerance");
    return out;
}

DualFrCertificate dual_fr_certificate_d12(const Plant& p) {
    p.validate();
    const Index r = leading_zero_columns(p.D12);
    if (r == 0) throw InvalidCertificate("D12 has no zero columns; no degeneracy to certify");
    DualFrCertificate out;
    out.gamma = 0.0;
    out.Xhat = SymMatrix(Matrix(Matrix::Zero(p.n(), p.n())));
    out.Yhat = Matrix::Zero(p.m2(), p.n());
    out.Yhat.topRows(r) = -0.5 * p.B2.leftCols(r).transpose();
    return out;
}

double dual_certificate_residual(const Plant& p, const DualFrCertificate& cert) {
    const Matrix& x = cert.Xhat.mat();
    const Matrix lin = p.C1 * x + p.D12 * cert.Yhat;
    const Matrix w = -he(p.A * x + p.B2 * cert.Yhat);
    double res = lin.size() > 0 ? lin.cwiseAbs().maxCoeff() : 0.0;
    res = std::max(res, std::max(0.0, -min_eig_sym(w)));
    res = std::max(res, std::max(0.0, -min_eig_sym(x)));
    return res;
}

FeasibilityReport feasibility_report(const Plant& p) {
    p.validate();
    FeasibilityReport rep;
    rep.stab = is_stabilizable(p.A, p.B2);
    rep.d12_rank = numerical_rank(p.D12);
    rep.d12_full_column_rank = rep.d12_rank == p.m2();
    rep.primal_strongly_feasible = rep.stab.stabilizable;

    try {
        rep.zeros = invariant_zeros(p);
    } catch (const NonSquarePencilUnsupported& e) {
        rep.notes.push_back(std::string("invariant zeros unavailable: ") + e.what());
    }
    bool stable_or_axis = false;
    for (const auto& z : rep.zeros) {
        if (std::abs(z.lambda.real()) <= eps_imag) rep.has_imaginary_axis_zero = true;
        if (z.lambda.real() <= eps_imag) stable_or_axis = true;
    }
    rep.dual_strongly_feasible = rep.d12_full_column_rank && !stable_or_axis;
    return rep;
}

}  // namespace hinf
