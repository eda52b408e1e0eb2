#include "hinf/lmi.hpp"

#include <Eigen/Eigenvalues>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hinf/errors.hpp"

namespace hinf {

Vector VarMap::pack(double gamma, const Matrix& x, const Matrix& y) const {
    if (x.rows() != n || x.cols() != n || y.rows() != m2 || y.cols() != n)
        throw DimensionMismatch("pack: variable blocks do not match the layout");
    Vector v = Vector::Zero(num_vars());
    v(0) = gamma;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) v(x_index(i, j)) = 0.5 * (x(i, j) + x(j, i));
    for (Index k = 0; k < m2; ++k)
        for (Index l = 0; l < n; ++l) v(y_index(k, l)) = y(k, l);
    return v;
}

VarMap::Unpacked VarMap::unpack(const Vector& v) const {
    if (v.size() != num_vars()) throw DimensionMismatch("unpack: wrong vector length");
    Unpacked u;
    u.gamma = v(0);
    u.X = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) {
            u.X(i, j) = v(x_index(i, j));
            u.X(j, i) = u.X(i, j);
        }
    u.Y = Matrix::Zero(m2, n);
    for (Index k = 0; k < m2; ++k)
        for (Index l = 0; l < n; ++l) u.Y(k, l) = v(y_index(k, l));
    return u;
}

SynthLmi assemble_synth(const Plant& p) {
    p.validate();
    const Index n = p.n(), m1 = p.m1(), m2 = p.m2(), p1 = p.p1();
    const Index N0 = n + p1 + m1;
    const Index N = N0 + n;
    VarMap map{n, m2};

    std::vector<SymMatrix> F;
    F.reserve(static_cast<std::size_t>(map.num_vars()) + 1);

    // Constant part, sign-flipped into F0: the (B1, D11) border.
    Matrix F0 = Matrix::Zero(N, N);
    F0.block(0, n + p1, n, m1) = p.B1;
    F0.block(n, n + p1, p1, m1) = p.D11;
    F0.block(n + p1, 0, m1, n) = p.B1.transpose();
    F0.block(n + p1, n, m1, p1) = p.D11.transpose();
    F.emplace_back(F0);

    // gamma multiplies the identity on the (p1 + m1) performance block.
    Matrix Fg = Matrix::Zero(N, N);
    Fg.block(n, n, p1 + m1, p1 + m1).setIdentity();
    F.emplace_back(Fg);

    // X coefficients over the symmetric basis E_ij = e_i e_j^T + e_j e_i^T.
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            Matrix E = Matrix::Zero(n, n);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            Matrix Fx = Matrix::Zero(N, N);
            const Matrix AE = p.A * E;
            Fx.topLeftCorner(n, n) = -(AE + AE.transpose());
            const Matrix CE = p.C1 * E;
            Fx.block(n, 0, p1, n) = -CE;
            Fx.block(0, n, n, p1) = -CE.transpose();
            Fx.block(N0, N0, n, n) = E;
            F.emplace_back(Fx);
        }
    }

    // Y coefficients over e_k e_l^T.
    for (Index k = 0; k < m2; ++k) {
        for (Index l = 0; l < n; ++l) {
            Matrix Fy = Matrix::Zero(N, N);
            Fy.topLeftCorner(n, n).col(l) -= p.B2.col(k);
            Fy.topLeftCorner(n, n).row(l) -= p.B2.col(k).transpose();
            Fy.block(n, 0, p1, n).col(l) -= p.D12.col(k);
            Fy.block(0, n, n, p1).row(l) -= p.D12.col(k).transpose();
            F.emplace_back(Fy);
        }
    }

    Vector c = Vector::Zero(map.num_vars());
    c(0) = 1.0;

    SynthLmi out;
    out.lmi.F = std::move(F);
    out.lmi.c = std::move(c);
    out.map = map;
    out.n = n;
    out.p1 = p1;
    out.m1 = m1;
    out.m2 = m2;
    out.lmi.validate();
    return out;
}

DualView::DualView(Plant p) : p_(std::move(p)) { p_.validate(); }

DualBlocks DualView::split(const Matrix& y_std) const {
    const Index n = p_.n(), p1 = p_.p1(), m1 = p_.m1();
    const Index N0 = n + p1 + m1;
    if (y_std.rows() != N0 + n || y_std.cols() != N0 + n)
        throw DimensionMismatch("split: dual matrix has wrong size");
    DualBlocks b;
    b.Z11 = y_std.block(0, 0, n, n);
    b.Z21 = y_std.block(n, 0, p1, n);
    b.Z22 = y_std.block(n, n, p1, p1);
    b.Z31 = y_std.block(n + p1, 0, m1, n);
    b.Z32 = y_std.block(n + p1, n, m1, p1);
    b.Z33 = y_std.block(n + p1, n + p1, m1, m1);
    b.W = y_std.block(N0, N0, n, n);
    return b;
}

Matrix DualView::embed(const DualBlocks& b) const {
    const Index n = p_.n(), p1 = p_.p1(), m1 = p_.m1();
    const Index N0 = n + p1 + m1;
    Matrix Y = Matrix::Zero(N0 + n, N0 + n);
    Y.block(0, 0, n, n) = sym_part(b.Z11);
    Y.block(n, 0, p1, n) = b.Z21;
    Y.block(0, n, n, p1) = b.Z21.transpose();
    Y.block(n, n, p1, p1) = sym_part(b.Z22);
    Y.block(n + p1, 0, m1, n) = b.Z31;
    Y.block(0, n + p1, n, m1) = b.Z31.transpose();
    Y.block(n + p1, n, m1, p1) = b.Z32;
    Y.block(n, n + p1, p1, m1) = b.Z32.transpose();
    Y.block(n + p1, n + p1, m1, m1) = sym_part(b.Z33);
    Y.block(N0, N0, n, n) = sym_part(b.W);
    return Y;
}

double DualView::objective(const DualBlocks& b) const {
    return 2.0 * (inner(p_.B1.transpose(), b.Z31) + inner(p_.D11.transpose(), b.Z32));
}

DualResiduals DualView::residuals(const DualBlocks& b) const {
    const Index n = p_.n(), p1 = p_.p1(), m1 = p_.m1();
    DualResiduals r;
    r.trace_eq = std::abs(b.Z22.trace() + b.Z33.trace() - 1.0);
    const Matrix lin = p_.B2.transpose() * b.Z11 + p_.D12.transpose() * b.Z21;
    r.lin_eq = lin.size() ? lin.cwiseAbs().maxCoeff() : 0.0;
    const Matrix w_ref = he(p_.A.transpose() * b.Z11 + p_.C1.transpose() * b.Z21);
    const Matrix wdiff = b.W - w_ref;
    r.w_consistency = wdiff.size() ? wdiff.cwiseAbs().maxCoeff() : 0.0;
    Matrix Z = Matrix::Zero(n + p1 + m1, n + p1 + m1);
    Z.block(0, 0, n, n) = b.Z11;
    Z.block(n, 0, p1, n) = b.Z21;
    Z.block(0, n, n, p1) = b.Z21.transpose();
    Z.block(n, n, p1, p1) = b.Z22;
    Z.block(n + p1, 0, m1, n) = b.Z31;
    Z.block(0, n + p1, n, m1) = b.Z31.transpose();
    Z.block(n + p1, n, m1, p1) = b.Z32;
    Z.block(n, n + p1, p1, m1) = b.Z32.transpose();
    Z.block(n + p1, n + p1, m1, m1) = b.Z33;
    r.z_min_eig = min_eig_sym(Z);
    r.w_min_eig = b.W.size() ? min_eig_sym(sym_part(b.W)) : 0.0;
    return r;
}

DualView assemble_dual(const Plant& p) { return DualView(p); }

Matrix ReductionResult::Tinv() const {
    Matrix out(U1.rows() + U2.rows(), T.rows());
    out.topRows(U1.rows()) = U1;
    out.bottomRows(U2.rows()) = U2;
    return out;
}

namespace {

TildeBlocks make_tilde(const Plant& p, const Matrix& T, const Matrix& Tinv, Index r) {
    const Index n = p.n();
    TildeBlocks t;
    const Matrix At = Tinv * p.A * T;
    t.A11 = At.topLeftCorner(r, r);
    t.A12 = At.topRightCorner(r, n - r);
    t.A21 = At.bottomLeftCorner(n - r, r);
    t.A22 = At.bottomRightCorner(n - r, n - r);
    const Matrix B1t = Tinv * p.B1;
    t.B11 = B1t.topRows(r);
    t.B12 = B1t.bottomRows(n - r);
    const Matrix B2t = Tinv * p.B2;
    t.B21 = B2t.topRows(r);
    t.B22 = B2t.bottomRows(n - r);
    const Matrix C1t = p.C1 * T;
    t.C11 = C1t.leftCols(r);
    t.C12 = C1t.rightCols(n - r);
    return t;
}

ReductionResult identity_reduction(const Plant& p) {
    const Index n = p.n(), m2 = p.m2();
    ReductionResult res;
    res.mode = ReductionMode::Identity;
    res.r = 0;
    res.T = Matrix::Identity(n, n);
    res.U1 = Matrix::Zero(0, n);
    res.U2 = Matrix::Identity(n, n);
    res.tilde = make_tilde(p, res.T, res.T, 0);
    res.reduced_plant = p;
    res.reduced_lmi = assemble_synth(p);
    res.Rhat_gain = Matrix::Zero(m2, 0);
    res.V = Matrix::Identity(m2, m2);
    res.Xhat = Matrix::Zero(n, n);
    res.Yhat = Matrix::Zero(m2, n);
    return res;
}

}  // namespace

ReductionResult reduce_full_rank(const Plant& p, const ZeroCertificate& cert) {
    p.validate();
    if (cert.r() == 0) return identity_reduction(p);
    const Index n = p.n(), m2 = p.m2();
    const Index r = cert.r();
    if (numerical_rank(p.D12) != m2)
        throw RankDeficient("reduce_full_rank: feedthrough is not full column rank");
    if (cert.Hhat.rows() != n || cert.Rhat.rows() != m2 || cert.Rhat.cols() != r ||
        cert.Lambda.rows() != r || cert.Lambda.cols() != r)
        throw DimensionMismatch("reduce_full_rank: certificate blocks have wrong shape");
    if (r > n) throw DimensionMismatch("reduce_full_rank: more directions than states");

    const double tol = certificate_scale(p) * (1.0 + max_abs(cert.Hhat));
    const Matrix res_dyn = p.A * cert.Hhat + p.B2 * cert.Rhat - cert.Hhat * cert.Lambda;
    const Matrix res_out = p.C1 * cert.Hhat + p.D12 * cert.Rhat;
    if (max_abs(res_dyn) > tol || max_abs(res_out) > tol)
        throw InvalidCertificate("reduce_full_rank: certificate equations violated");
    if (numerical_rank(cert.Hhat) != r)
        throw InvalidCertificate("reduce_full_rank: certificate directions are dependent");

    const Matrix J = orth_complement(cert.Hhat);
    Matrix T(n, n);
    T.leftCols(r) = cert.Hhat;
    T.rightCols(n - r) = J;
    const Matrix Tinv = solve_linear(T, Matrix::Identity(n, n));

    ReductionResult result;
    result.mode = ReductionMode::FullRank;
    result.r = r;
    result.T = T;
    result.U1 = Tinv.topRows(r);
    result.U2 = Tinv.bottomRows(n - r);
    result.tilde = make_tilde(p, T, Tinv, r);
    result.cert = cert;
    result.Rhat_gain = cert.Rhat;
    result.V = Matrix::Identity(m2, m2);

    // Redundancy identities of the eliminated rows/columns.
    const Matrix a21_ref = -result.tilde.B22 * cert.Rhat;
    const Matrix c11_ref = -p.D12 * cert.Rhat;
    const double scale_a = 1.0 + max_abs(a21_ref) + max_abs(result.tilde.A21);
    const double scale_c = 1.0 + max_abs(c11_ref) + max_abs(result.tilde.C11);
    if (max_abs(result.tilde.A21 - a21_ref) > 1e-8 * scale_a ||
        max_abs(result.tilde.C11 - c11_ref) > 1e-8 * scale_c)
        throw NumericalFailure("reduce_full_rank: redundancy identities violated");

    result.reduced_plant =
        Plant{result.tilde.A22, result.tilde.B12, result.tilde.B22, result.tilde.C12, p.D11, p.D12};
    result.reduced_plant.validate();
    result.reduced_lmi = assemble_synth(result.reduced_plant);

    result.Xhat = cert.Hhat * cert.Hhat.transpose();
    result.Yhat = cert.Rhat * cert.Hhat.transpose();
    result.What = SymMatrix(-he(p.A * result.Xhat + p.B2 * result.Yhat));

    Eigen::EigenSolver<Matrix> es(cert.Lambda);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("reduce_full_rank: eigenvalue iteration failed");
    for (Index i = 0; i < r; ++i) result.cancelled_modes.push_back(es.eigenvalues()(i).real());
    return result;
}

NormalizedD12 normalize_d12(const Plant& p) {
    p.validate();
    const Index m2 = p.m2();
    NormalizedD12 out;
    const SvdResult s = svd(p.D12);
    const Index q = numerical_rank(s.sigma);
    if (q == m2) {
        out.p = p;
        out.V = Matrix::Identity(m2, m2);
        out.r = 0;
        return out;
    }
    out.r = m2 - q;
    Matrix V(m2, m2);
    V.leftCols(out.r) = s.V.rightCols(out.r);
    V.rightCols(q) = s.V.leftCols(q);
    out.V = V;
    out.p = p;
    out.p.B2 = p.B2 * V;
    out.p.D12 = p.D12 * V;
    out.p.D12.leftCols(out.r).setZero();  // exact zeros in the null-direction columns
    return out;
}

ReductionResult reduce_rank_deficient(const NormalizedD12& nd) {
    const Plant& p = nd.p;
    p.validate();
    const Index n = p.n(), m2 = p.m2(), p1 = p.p1();
    const Index r = nd.r;
    if (r < 1) throw DimensionMismatch("reduce_rank_deficient: no zero feedthrough columns");
    if (r > n) throw DimensionMismatch("reduce_rank_deficient: more zero columns than states");
    if (leading_zero_columns(p.D12) < r)
        throw DimensionMismatch("reduce_rank_deficient: plant is not in normalized form");
    const Matrix B21 = p.B2.leftCols(r);
    if (numerical_rank(B21) != r)
        throw RankDeficient("reduce_rank_deficient: leading input columns are dependent");

    const Matrix L = orth_complement(B21);
    Matrix T(n, n);
    T.leftCols(r) = B21;
    T.rightCols(n - r) = L;
    const Matrix Tinv = solve_linear(T, Matrix::Identity(n, n));

    ReductionResult result;
    result.mode = ReductionMode::RankDeficientD12;
    result.r = r;
    result.T = T;
    result.U1 = Tinv.topRows(r);
    result.U2 = Tinv.bottomRows(n - r);
    result.tilde = make_tilde(p, T, Tinv, r);

    // T^{-1} B21 = (I_r; 0) by construction.
    Matrix lead = Matrix::Zero(n, r);
    lead.topRows(r).setIdentity();
    const Matrix B2t = Tinv * p.B2;
    if (max_abs(B2t.leftCols(r) - lead) > 1e-8 * (1.0 + max_abs(B2t)))
        throw NumericalFailure("reduce_rank_deficient: transformed input block is not canonical");

    Matrix E1(n - r, m2);
    E1.leftCols(r) = result.tilde.A21;
    E1.rightCols(m2 - r) = result.tilde.B22.rightCols(m2 - r);
    Matrix E2(p1, m2);
    E2.leftCols(r) = result.tilde.C11;
    E2.rightCols(m2 - r) = p.D12.rightCols(m2 - r);

    result.reduced_plant = Plant{result.tilde.A22, result.tilde.B12, E1, result.tilde.C12, p.D11, E2};
    result.reduced_plant.validate();
    result.reduced_lmi = assemble_synth(result.reduced_plant);

    Matrix rg = Matrix::Zero(m2, r);
    rg.topRows(r) = -Matrix::Identity(r, r);
    result.Rhat_gain = rg;
    result.V = nd.V;
    result.Xhat = Matrix::Zero(n, n);
    Matrix yhat = Matrix::Zero(m2, n);
    yhat.topRows(r) = -0.5 * B21.transpose();
    result.Yhat = yhat;
    result.What = SymMatrix(B21 * B21.transpose());
    return result;
}

Matrix gain_from_solution(const Matrix& x, const Matrix& y) {
    if (x.rows() != x.cols()) throw DimensionMismatch("gain_from_solution requires square X");
    if (y.cols() != x.rows())
        throw DimensionMismatch("gain_from_solution requires Y columns to match X");
    const Index n = x.rows();
    if (n == 0) return Matrix::Zero(y.rows(), 0);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.transpose()));
    if (es.info() != Eigen::Success)
        throw NumericalFailure("gain_from_solution eigendecomposition failed");
    const double lmax = es.eigenvalues()(n - 1);
    if (!(lmax > 0.0)) throw SingularMatrix("gain_from_solution requires X with a positive part");
    const double floor = std::numeric_limits<double>::epsilon() * lmax;
    const Vector inv = es.eigenvalues().cwiseMax(floor).cwiseInverse();
    return y * (es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
}

void write_stdlmi(std::ostream& os, const StdLmi& lmi) {
    const Index N = lmi.dim();
    const Index m = lmi.num_vars();
    os << N << ' ' << m << '\n';
    os << std::setprecision(17);
    for (const SymMatrix& f : lmi.F) {
        const Matrix& M = f.mat();
        for (Index i = 0; i < N; ++i) {
            for (Index j = 0; j <= i; ++j) {
                os << M(i, j);
                os << (j == i ? '\n' : ' ');
            }
        }
    }
    for (Index j = 0; j < m; ++j) os << lmi.c(j) << (j + 1 == m ? '\n' : ' ');
}

StdLmi read_stdlmi(std::istream& is) {
    Index N = 0, m = 0;
    if (!(is >> N >> m) || N < 1 || m < 0) throw ParseError("stdlmi: bad header");
    StdLmi lmi;
    lmi.F.reserve(static_cast<std::size_t>(m) + 1);
    for (Index k = 0; k <= m; ++k) {
        Matrix M = Matrix::Zero(N, N);
        for (Index i = 0; i < N; ++i)
            for (Index j = 0; j <= i; ++j) {
                double v = 0.0;
                if (!(is >> v)) throw ParseError("stdlmi: truncated matrix data");
                M(i, j) = v;
                M(j, i) = v;
            }
        lmi.F.emplace_back(M);
    }
    lmi.c = Vector::Zero(m);
    for (Index j = 0; j < m; ++j)
        if (!(is >> lmi.c(j))) throw ParseError("stdlmi: truncated objective");
    lmi.validate(false);
    return lmi;
}

}  // namespace hinf
