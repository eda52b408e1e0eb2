#include <algorithm>
#include <complex>

#include "doctest.h"
#include "hinf/bench.hpp"
#include "hinf/zeros.hpp"

using namespace hinf;

namespace {

// n = 2 double-integrator family: A = [[0,1],[0,0]], B2 = e2; the zero pencil
// determinant is d lambda^2 + c2 lambda + c1 for C1 = (c1, c2), D12 = (d).
Plant two_state(double c1, double c2, double d) {
    Plant p;
    p.A = Matrix::Zero(2, 2);
    p.A(0, 1) = 1.0;
    p.B1 = Matrix::Zero(2, 1);
    p.B2 = Matrix::Zero(2, 1);
    p.B2(1, 0) = 1.0;
    p.C1 = Matrix(1, 2);
    p.C1 << c1, c2;
    p.D11 = Matrix::Zero(1, 1);
    p.D12 = Matrix::Constant(1, 1, d);
    return p;
}

std::vector<double> sorted_real_zeros(const Plant& p) {
    std::vector<double> out;
    for (const auto& z : invariant_zeros(p)) {
        CHECK(std::abs(z.lambda.imag()) <= 1e-8);
        out.push_back(z.lambda.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

double pencil_residual(const Plant& p, const InvariantZero& z) {
    const Index n = p.n();
    CMatrix pencil(n + p.p1(), n + p.m2());
    pencil << p.A.cast<std::complex<double>>() - z.lambda * CMatrix::Identity(n, n),
        p.B2.cast<std::complex<double>>(), p.C1.cast<std::complex<double>>(),
        p.D12.cast<std::complex<double>>();
    CVector v(n + p.m2());
    v << z.eta, z.xi;
    return (pencil * v).norm() / v.norm();
}

}  // namespace

TEST_CASE("is_stabilizable accepts Hurwitz dynamics regardless of the input map") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    CHECK(is_stabilizable(a, Matrix::Zero(2, 1)).stabilizable);
    CHECK(is_stabilizable(a, Matrix::Zero(2, 0)).stabilizable);
}

TEST_CASE("is_stabilizable detects which unstable modes the input reaches") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    Matrix reaches(2, 1), misses(2, 1);
    reaches << 1.0, 0.0;
    misses << 0.0, 1.0;
    CHECK(is_stabilizable(a, reaches).stabilizable);

    const StabilizabilityResult bad = is_stabilizable(a, misses);
    REQUIRE_FALSE(bad.stabilizable);
    CHECK(bad.offending_lambda.real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(bad.offending_lambda.imag()) <= 1e-10);
    // The witness is a left eigenvector orthogonal to the input columns.
    const CVector eta = bad.offending_eta;
    CHECK((a.transpose().cast<std::complex<double>>() * eta - bad.offending_lambda * eta)
              .norm() <= 1e-10);
    CHECK((misses.transpose().cast<std::complex<double>>() * eta).norm() <= 1e-10);
}

TEST_CASE("is_stabilizable treats the axis band as unstable") {
    // Integrator with no input: the marginal mode at 0 must be reachable.
    CHECK_FALSE(is_stabilizable(Matrix::Zero(1, 1), Matrix::Zero(1, 1)).stabilizable);
    CHECK(is_stabilizable(Matrix::Zero(1, 1), Matrix::Constant(1, 1, 1.0)).stabilizable);
}

TEST_CASE("invariant_zeros of the worked two-state plants") {
    // det = lambda^2 + 3 lambda + 2 -> {-1, -2}
    const std::vector<double> z1 = sorted_real_zeros(two_state(2.0, 3.0, 1.0));
    REQUIRE(z1.size() == 2);
    CHECK(z1[0] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(z1[1] == doctest::Approx(-1.0).epsilon(1e-9));

    // det = lambda^2 + lambda -> {-1, 0}: the marginal zero is reported too.
    const std::vector<double> z2 = sorted_real_zeros(two_state(0.0, 1.0, 1.0));
    REQUIRE(z2.size() == 2);
    CHECK(z2[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(z2[1]) <= 1e-9);

    // D12 = 0, C1 = (1, 0): the pencil determinant is constant -> no zeros.
    CHECK(invariant_zeros(two_state(1.0, 0.0, 0.0)).empty());
}

TEST_CASE("invariant_zeros returns verified pencil null vectors") {
    const Plant p = two_state(2.0, 3.0, 1.0);
    for (const auto& z : invariant_zeros(p)) CHECK(pencil_residual(p, z) <= 1e-10);
}

TEST_CASE("invariant_zeros finds the complex pair of lambda^2 + lambda + 1") {
    const auto zs = invariant_zeros(two_state(1.0, 1.0, 1.0));
    REQUIRE(zs.size() == 2);
    for (const auto& z : zs) {
        CHECK(z.lambda.real() == doctest::Approx(-0.5).epsilon(1e-9));
        CHECK(std::abs(z.lambda.imag()) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
    }
    CHECK(zs[0].lambda.imag() == doctest::Approx(-zs[1].lambda.imag()).epsilon(1e-9));
}

TEST_CASE("a double zero of geometric multiplicity one yields a single entry") {
    // det = (lambda + 1)^2 but the pencil null space at -1 is one-dimensional.
    const auto zs = invariant_zeros(two_state(1.0, 2.0, 1.0));
    REQUIRE(zs.size() == 1);
    CHECK(zs[0].lambda.real() == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(pencil_residual(two_state(1.0, 2.0, 1.0), zs[0]) <= 1e-8);
}

TEST_CASE("a pencil that drops rank at every lambda is rejected") {
    // Three planted zeros whose state directions span only two dimensions
    // force a singular pencil, so no finite zero list exists.
    Plant p;
    p.A = Matrix(4, 4);
    p.A << -1, 0, 0, 0, -1, -2, 0, 0, -1, 0, -7, 0, 0, 0, 0, -9;
    p.B1 = Matrix::Zero(4, 2);
    p.B2 = Matrix(4, 2);
    p.B2 << -2, 0, -1, 1, 0, 1, 0, 0;
    p.C1 = Matrix(2, 4);
    p.C1 << -1, 0, 1, 2, -2, 0, 1, 0;
    p.D11 = Matrix::Zero(2, 2);
    p.D12 = Matrix(2, 2);
    p.D12 << 0, 1, 0, 2;
    CHECK_THROWS_AS(invariant_zeros(p), NumericalFailure);
}

TEST_CASE("wide pencils are refused rather than guessed at") {
    Plant p = two_state(1.0, 0.0, 0.0);  // p1 = 1
    p.B2 = Matrix::Identity(2, 2);       // m2 = 2 > p1
    p.D12 = Matrix::Zero(1, 2);
    CHECK_THROWS_AS(invariant_zeros(p), NonSquarePencilUnsupported);
}

TEST_CASE("stable_zero_certificate on the worked plant with zeros -1 and -2") {
    const Plant p = two_state(2.0, 3.0, 1.0);
    const ZeroCertificate cert = stable_zero_certificate(p);
    REQUIRE(cert.r() == 2);
    REQUIRE(cert.lambdas.size() == 2);
    std::vector<double> ls{cert.lambdas[0].real(), cert.lambdas[1].real()};
    std::sort(ls.begin(), ls.end());
    CHECK(ls[0] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(ls[1] == doctest::Approx(-1.0).epsilon(1e-9));

    CHECK(max_abs(p.A * cert.Hhat + p.B2 * cert.Rhat - cert.Hhat * cert.Lambda) <= 1e-10);
    CHECK(max_abs(p.C1 * cert.Hhat + p.D12 * cert.Rhat) <= 1e-10);
    CHECK(numerical_rank(cert.Hhat) == 2);
    CHECK(cert.Lambda.isDiagonal(1e-12));
}

TEST_CASE("stable_zero_certificate packs a complex pair as a rotation block") {
    const Plant p = two_state(1.0, 1.0, 1.0);
    const ZeroCertificate cert = stable_zero_certificate(p);
    REQUIRE(cert.r() == 2);
    REQUIRE(cert.lambdas.size() == 1);  // one block for the conjugate pair
    CHECK(cert.lambdas[0].real() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(cert.Lambda(0, 0) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(cert.Lambda(1, 1) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(cert.Lambda(0, 1) == doctest::Approx(-cert.Lambda(1, 0)).epsilon(1e-9));
    CHECK(std::abs(cert.Lambda(0, 1)) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
    CHECK(max_abs(p.A * cert.Hhat + p.B2 * cert.Rhat - cert.Hhat * cert.Lambda) <= 1e-10);
    CHECK(max_abs(p.C1 * cert.Hhat + p.D12 * cert.Rhat) <= 1e-10);
}

TEST_CASE("stable_zero_certificate is empty when no zero is strictly stable") {
    CHECK(stable_zero_certificate(two_state(1.0, 0.0, 0.0)).r() == 0);
    // Unstable zeros only: det = lambda^2 - 3 lambda + 2 -> {1, 2}.
    CHECK(stable_zero_certificate(two_state(2.0, -3.0, 1.0)).r() == 0);
}

TEST_CASE("stable_zero_certificate rejects zeros inside the axis band") {
    CHECK_THROWS_AS(stable_zero_certificate(two_state(0.0, 1.0, 1.0)), ImaginaryAxisZero);
    // det = lambda^2 + 1 -> +-i.
    CHECK_THROWS_AS(stable_zero_certificate(two_state(1.0, 0.0, 1.0)), ImaginaryAxisZero);
}

TEST_CASE("derived_w matches both of its defining expressions") {
    const Plant p = two_state(2.0, 3.0, 1.0);
    const ZeroCertificate cert = stable_zero_certificate(p);
    const SymMatrix w = derived_w(p, cert);

    const Matrix xhat = cert.Hhat * cert.Hhat.transpose();
    const Matrix yhat = cert.Rhat * cert.Hhat.transpose();
    CHECK(max_abs(w.mat() + he(p.A * xhat + p.B2 * yhat)) <= 1e-12);
    CHECK(max_abs(w.mat() + 2.0 * cert.Hhat * sym_part(cert.Lambda) * cert.Hhat.transpose()) <=
          1e-10);
    CHECK(min_eig_sym(w.mat()) >= -1e-12);
    CHECK(numerical_rank(w.mat()) == 2);
}

TEST_CASE("derived_w for a single zero at -1 equals twice the state certificate") {
    // Scalar plant A = 0, B2 = C1 = D12 = 1: one invariant zero at -1, so
    // W = -2 Hhat (-1) Hhat^T = 2 Xhat.
    Plant p;
    p.A = Matrix::Zero(1, 1);
    p.B1 = Matrix::Zero(1, 1);
    p.B2 = Matrix::Constant(1, 1, 1.0);
    p.C1 = Matrix::Constant(1, 1, 1.0);
    p.D11 = Matrix::Zero(1, 1);
    p.D12 = Matrix::Constant(1, 1, 1.0);
    const ZeroCertificate cert = stable_zero_certificate(p);
    REQUIRE(cert.r() == 1);
    const SymMatrix w = derived_w(p, cert);
    CHECK(max_abs(w.mat() - 2.0 * cert.Hhat * cert.Hhat.transpose()) <= 1e-12);
}

TEST_CASE("derived_w of an empty certificate is the zero matrix") {
    const Plant p = two_state(1.0, 0.0, 0.0);
    const SymMatrix w = derived_w(p, stable_zero_certificate(p));
    CHECK(w.dim() == 2);
    CHECK(max_abs(w.mat()) == 0.0);
}

TEST_CASE("primal_fr_certificate for a scalar unreachable unstable mode") {
    Plant p;
    p.A = Matrix::Constant(1, 1, 1.0);
    p.B1 = Matrix::Zero(1, 1);
    p.B2 = Matrix::Zero(1, 1);
    p.C1 = Matrix::Constant(1, 1, 1.0);
    p.D11 = Matrix::Zero(1, 1);
    p.D12 = Matrix::Constant(1, 1, 1.0);
    CVector eta(1);
    eta(0) = 1.0;
    const SymMatrix z = primal_fr_certificate(p, {1.0, 0.0}, eta);
    CHECK(z.mat()(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    // He(A^T Z) = 2 Re(lambda) Z = 4.
    CHECK(he(p.A.transpose() * z.mat())(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("primal_fr_certificate for a marginal conjugate pair") {
    Plant p;
    p.A = Matrix(2, 2);
    p.A << 0, 1, -1, 0;  // eigenvalues +-i
    p.B1 = Matrix::Zero(2, 1);
    p.B2 = Matrix::Zero(2, 1);
    p.C1 = Matrix::Identity(2, 2);
    p.D11 = Matrix::Zero(2, 1);
    p.D12 = Matrix::Zero(2, 1);
    CVector eta(2);
    eta(0) = {1.0 / std::sqrt(2.0), 0.0};
    eta(1) = {0.0, -1.0 / std::sqrt(2.0)};  // A^T eta = i eta
    const SymMatrix z = primal_fr_certificate(p, {0.0, 1.0}, eta);
    CHECK(max_abs(z.mat() - Matrix::Identity(2, 2)) <= 1e-12);
    CHECK(max_abs(he(p.A.transpose() * z.mat())) <= 1e-12);  // 2 Re(lambda) Z = 0
}

TEST_CASE("primal_fr_certificate accepts the witness from the reachability test") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    Plant p;
    p.A = a;
    p.B1 = Matrix::Zero(2, 1);
    p.B2 = Matrix(2, 1);
    p.B2 << 0.0, 1.0;
    p.C1 = Matrix::Identity(2, 2);
    p.D11 = Matrix::Zero(2, 1);
    p.D12 = Matrix::Zero(2, 1);
    const StabilizabilityResult res = is_stabilizable(p.A, p.B2);
    REQUIRE_FALSE(res.stabilizable);
    const SymMatrix z = primal_fr_certificate(p, res.offending_lambda, res.offending_eta);
    CHECK(min_eig_sym(z.mat()) >= -1e-12);
    CHECK(max_abs(p.B2.transpose() * z.mat()) <= 1e-10);
    CHECK(min_eig_sym(he(p.A.transpose() * z.mat())) >= -1e-10);
}

TEST_CASE("primal_fr_certificate rejects invalid witnesses") {
    Plant p;
    p.A = Matrix::Constant(1, 1, -1.0);  // stable mode: nothing to certify
    p.B1 = Matrix::Zero(1, 1);
    p.B2 = Matrix::Zero(1, 1);
    p.C1 = Matrix::Constant(1, 1, 1.0);
    p.D11 = Matrix::Zero(1, 1);
    p.D12 = Matrix::Zero(1, 1);
    CVector eta(1);
    eta(0) = 1.0;
    CHECK_THROWS_AS(primal_fr_certificate(p, {-1.0, 0.0}, eta), InvalidCertificate);

    Plant q = p;
    q.A = Matrix::Constant(1, 1, 1.0);
    q.B2 = Matrix::Constant(1, 1, 1.0);  // eta not orthogonal to the input
    CHECK_THROWS_AS(primal_fr_certificate(q, {1.0, 0.0}, eta), InvalidCertificate);

    Plant s = q;
    s.B2 = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(primal_fr_certificate(s, {2.0, 0.0}, eta), InvalidCertificate);
}

TEST_CASE("dual_fr_certificate satisfies its defining equations") {
    const Plant p = two_state(2.0, 3.0, 1.0);
    const ZeroCertificate cert = stable_zero_certificate(p);
    const DualFrCertificate d = dual_fr_certificate(p, cert);
    CHECK(d.gamma == 0.0);
    CHECK(max_abs(d.Xhat.mat() - cert.Hhat * cert.Hhat.transpose()) <= 1e-12);
    CHECK(max_abs(d.Yhat - cert.Rhat * cert.Hhat.transpose()) <= 1e-12);
    CHECK(max_abs(p.C1 * d.Xhat.mat() + p.D12 * d.Yhat) <= 1e-12);
    CHECK(dual_certificate_residual(p, d) <= 1e-10);
}

TEST_CASE("dual certificates hold across the seeded benchmark family") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const Plant p = generate_plant({}, {-1.0, -2.0, -3.0}, seed);
        const ZeroCertificate cert = stable_zero_certificate(p);
        REQUIRE(cert.r() == 3);
        CHECK(dual_certificate_residual(p, dual_fr_certificate(p, cert)) <= 1e-10);
    }
}

TEST_CASE("dual_fr_certificate_d12 certifies a feedthrough with zero columns") {
    Plant p;
    p.A = Matrix(2, 2);
    p.A << -1, 2, 0, -3;
    p.B1 = Matrix::Zero(2, 1);
    p.B2 = Matrix(2, 2);
    p.B2 << 1, 0, 2, 1;
    p.C1 = Matrix(2, 2);
    p.C1 << 1, 1, 0, 1;
    p.D11 = Matrix::Zero(2, 1);
    p.D12 = Matrix(2, 2);
    p.D12 << 0, 1, 0, 2;  // leading column zero
    const DualFrCertificate d = dual_fr_certificate_d12(p);
    CHECK(max_abs(d.Xhat.mat()) == 0.0);
    const Matrix b21 = p.B2.leftCols(1);
    CHECK(max_abs(d.Yhat.topRows(1) + 0.5 * b21.transpose()) <= 1e-14);
    CHECK(max_abs(d.Yhat.bottomRows(1)) == 0.0);
    CHECK(max_abs(he(p.B2 * d.Yhat) + b21 * b21.transpose()) <= 1e-12);
    CHECK(dual_certificate_residual(p, d) <= 1e-12);
}

TEST_CASE("dual_fr_certificate_d12 refuses a full-column-rank feedthrough") {
    Plant p = two_state(2.0, 3.0, 1.0);
    CHECK_THROWS_AS(dual_fr_certificate_d12(p), InvalidCertificate);
}

TEST_CASE("feasibility_report ties the flags to the structural facts") {
    // Benchmark family: reachable, full-rank D12, three stable zeros.
    const Plant bench = generate_plant({}, {-1.0, -2.0, -3.0}, 7);
    const FeasibilityReport rb = feasibility_report(bench);
    CHECK(rb.stab.stabilizable);
    CHECK(rb.d12_full_column_rank);
    CHECK(rb.d12_rank == 2);
    CHECK(rb.zeros.size() == 3);
    CHECK_FALSE(rb.has_imaginary_axis_zero);
    CHECK(rb.primal_strongly_feasible);
    CHECK_FALSE(rb.dual_strongly_feasible);

    // Scalar plant with only an unstable zero at +2: both sides well posed.
    Plant s;
    s.A = Matrix::Constant(1, 1, 1.0);
    s.B1 = Matrix::Constant(1, 1, 1.0);
    s.B2 = Matrix::Constant(1, 1, 1.0);
    s.C1 = Matrix::Constant(1, 1, -1.0);
    s.D11 = Matrix::Zero(1, 1);
    s.D12 = Matrix::Constant(1, 1, 1.0);
    const FeasibilityReport rs = feasibility_report(s);
    CHECK(rs.primal_strongly_feasible);
    CHECK(rs.dual_strongly_feasible);
    REQUIRE(rs.zeros.size() == 1);
    CHECK(rs.zeros[0].lambda.real() == doctest::Approx(2.0).epsilon(1e-9));

    // Unreachable unstable mode: the state side degenerates.
    Plant u = s;
    u.A = Matrix(2, 2);
    u.A << 1, 0, 0, -1;
    u.B1 = Matrix::Zero(2, 1);
    u.B2 = Matrix(2, 1);
    u.B2 << 0, 1;
    u.C1 = Matrix(1, 2);
    u.C1 << 0, 1;
    u.D11 = Matrix::Zero(1, 1);
    u.D12 = Matrix::Constant(1, 1, 1.0);
    const FeasibilityReport ru = feasibility_report(u);
    CHECK_FALSE(ru.primal_strongly_feasible);
    CHECK_FALSE(ru.stab.stabilizable);

    // Marginal zero on the axis: the gain side degenerates.
    const FeasibilityReport ri = feasibility_report(two_state(1.0, 0.0, 1.0));
    CHECK(ri.has_imaginary_axis_zero);
    CHECK_FALSE(ri.dual_strongly_feasible);

    // Rank-deficient feedthrough degenerates the gain side regardless of zeros.
    const Plant pd = generate_plant_d12_deficient({}, 11);
    const FeasibilityReport rd = feasibility_report(pd);
    CHECK_FALSE(rd.d12_full_column_rank);
    CHECK_FALSE(rd.dual_strongly_feasible);
}
