#include <complex>
#include <random>

#include "doctest.h"
#include "hinf/plant.hpp"

using namespace hinf;

namespace {

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

// Independent check: max over a dense log-frequency grid of
// sigma_max(C (jw I - A)^{-1} B + D).
double grid_norm(const ClosedLoop& cl, int points = 10000) {
    const Index n = cl.A.rows();
    Eigen::EigenSolver<Matrix> dec(cl.A, false);
    double lo = 1e300, hi = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double a = std::abs(dec.eigenvalues()(i));
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const double wa = 1e-3 * std::min(lo, 1.0), wb = 1e3 * std::max(hi, 1.0);
    double best = 0.0;
    for (int k = -1; k < points; ++k) {
        const double w = k < 0 ? 0.0 : wa * std::pow(wb / wa, double(k) / (points - 1));
        const CMatrix g =
            cl.C.cast<std::complex<double>>() *
                (std::complex<double>(0, w) * CMatrix::Identity(n, n) -
                 cl.A.cast<std::complex<double>>())
                    .partialPivLu()
                    .solve(cl.B.cast<std::complex<double>>()) +
            cl.D.cast<std::complex<double>>();
        best = std::max(best, Eigen::JacobiSVD<CMatrix>(g).singularValues()(0));
    }
    return best;
}

ClosedLoop first_order(double pole) {
    ClosedLoop cl;
    cl.A = Matrix::Constant(1, 1, pole);
    cl.B = Matrix::Constant(1, 1, 1.0);
    cl.C = Matrix::Constant(1, 1, 1.0);
    cl.D = Matrix::Zero(1, 1);
    return cl;
}

}  // namespace

TEST_CASE("close_loop forms A+B2K and C1+D12K") {
    Plant p;
    p.A = random_matrix(3, 3, 1);
    p.B1 = random_matrix(3, 2, 2);
    p.B2 = random_matrix(3, 1, 3);
    p.C1 = random_matrix(2, 3, 4);
    p.D11 = random_matrix(2, 2, 5);
    p.D12 = random_matrix(2, 1, 6);

    const ClosedLoop zero = close_loop(p, Matrix::Zero(1, 3));
    CHECK(max_abs(zero.A - p.A) == 0.0);
    CHECK(max_abs(zero.B - p.B1) == 0.0);
    CHECK(max_abs(zero.C - p.C1) == 0.0);
    CHECK(max_abs(zero.D - p.D11) == 0.0);

    const Matrix k = random_matrix(1, 3, 7);
    const ClosedLoop cl = close_loop(p, k);
    CHECK(max_abs(cl.A - (p.A + p.B2 * k)) <= 1e-14);
    CHECK(max_abs(cl.C - (p.C1 + p.D12 * k)) <= 1e-14);

    CHECK_THROWS_AS(close_loop(p, Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("scalar integrator with unit negative feedback") {
    Plant p;
    p.A = Matrix::Zero(1, 1);
    p.B1 = Matrix::Zero(1, 0);
    p.B2 = Matrix::Constant(1, 1, 1.0);
    p.C1 = Matrix::Constant(1, 1, 1.0);
    p.D11 = Matrix::Zero(1, 0);
    p.D12 = Matrix::Zero(1, 1);
    const ClosedLoop cl = close_loop(p, Matrix::Constant(1, 1, -1.0));
    CHECK(cl.A(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("is_hurwitz matches the eigenvalue sign") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    CHECK(is_hurwitz(d));

    Matrix nil(2, 2);
    nil << 0, 1, 0, 0;
    CHECK_FALSE(is_hurwitz(nil));

    Matrix companion(2, 2);  // lambda^2 + 3 lambda + 2, roots -1 and -2
    companion << 0, 1, -2, -3;
    CHECK(is_hurwitz(companion));

    CHECK(is_hurwitz(Matrix::Zero(0, 0)));
    CHECK_THROWS_AS(is_hurwitz(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("is_hurwitz agrees with the max real part on random matrices") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const Matrix m = random_matrix(5, 5, seed);
        Eigen::EigenSolver<Matrix> dec(m, false);
        const bool expect = dec.eigenvalues().real().maxCoeff() < -eps_imag;
        CHECK(is_hurwitz(m) == expect);
    }
}

TEST_CASE("hinf_norm of static and first-order systems") {
    ClosedLoop stat;
    stat.A = Matrix::Zero(0, 0);
    stat.B = Matrix::Zero(0, 2);
    stat.C = Matrix::Zero(2, 0);
    stat.D = Matrix::Zero(2, 2);
    stat.D(0, 0) = 2.0;
    stat.D(1, 1) = 1.0;
    CHECK(hinf_norm(stat) == doctest::Approx(2.0).epsilon(1e-9));

    CHECK(hinf_norm(first_order(-1.0)) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(hinf_norm(first_order(-2.0)) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("hinf_norm rejects unstable dynamics") {
    CHECK_THROWS_AS(hinf_norm(first_order(0.5)), UnstablePlant);
}

TEST_CASE("hinf_norm matches the frequency-grid oracle on random stable systems") {
    for (unsigned seed = 1; seed <= 8; ++seed) {
        ClosedLoop cl;
        Matrix a = random_matrix(4, 4, seed);
        a -= (1.0 + a.eigenvalues().real().maxCoeff()) * Matrix::Identity(4, 4);
        cl.A = a;
        cl.B = random_matrix(4, 2, seed + 50);
        cl.C = random_matrix(2, 4, seed + 100);
        cl.D = random_matrix(2, 2, seed + 150);
        const double norm = hinf_norm(cl, 1e-8);
        const double oracle = grid_norm(cl);
        CHECK(norm == doctest::Approx(oracle).epsilon(1e-4));
        CHECK(norm >= oracle * (1.0 - 1e-9));  // grid value is a lower bound
    }
}

TEST_CASE("hinf_norm with a resonant peak away from the eigenvalue magnitudes") {
    // Lightly damped oscillator: peak near w = 10, far above the DC gain.
    ClosedLoop cl;
    cl.A = Matrix(2, 2);
    cl.A << 0, 1, -100, -0.2;
    cl.B = Matrix(2, 1);
    cl.B << 0, 1;
    cl.C = Matrix(1, 2);
    cl.C << 1, 0;
    cl.D = Matrix::Zero(1, 1);
    // G(s) = 1/(s^2 + 0.2 s + 100); |G(jw)|^2 = 1/((100-w^2)^2 + 0.04 w^2)
    // peaks at w^2 = 99.98 with value 1/3.9996.
    const double peak = 1.0 / std::sqrt(3.9996);
    CHECK(hinf_norm(cl, 1e-8) == doctest::Approx(peak).epsilon(1e-6));
}

TEST_CASE("transform preserves the norm and rejects bad shapes") {
    ClosedLoop cl;
    cl.A = Matrix(2, 2);
    cl.A << -1, 0.5, 0, -2;
    cl.B = random_matrix(2, 1, 9);
    cl.C = random_matrix(1, 2, 10);
    cl.D = Matrix::Zero(1, 1);

    const ClosedLoop same = transform(cl, Matrix::Identity(2, 2));
    CHECK(max_abs(same.A - cl.A) <= 1e-14);

    Matrix t = Matrix::Zero(2, 2);
    t(0, 0) = 2.0;
    t(1, 1) = 1.0;
    CHECK(hinf_norm(transform(cl, t)) == doctest::Approx(hinf_norm(cl)).epsilon(1e-8));

    Matrix perm(2, 2);
    perm << 0, 1, 1, 0;
    const ClosedLoop swapped = transform(cl, perm);
    CHECK(swapped.A.trace() == doctest::Approx(cl.A.trace()).epsilon(1e-12));

    CHECK_THROWS_AS(transform(cl, Matrix::Zero(3, 3)), DimensionMismatch);
    CHECK_THROWS_AS(transform(cl, Matrix::Zero(2, 2)), SingularMatrix);
}

TEST_CASE("transform norm invariance holds for random changes of coordinates") {
    for (unsigned seed = 1; seed <= 6; ++seed) {
        ClosedLoop cl;
        Matrix a = random_matrix(5, 5, seed + 400);
        a -= (1.0 + a.eigenvalues().real().maxCoeff()) * Matrix::Identity(5, 5);
        cl.A = a;
        cl.B = random_matrix(5, 2, seed + 500);
        cl.C = random_matrix(2, 5, seed + 600);
        cl.D = random_matrix(2, 2, seed + 700);
        const Matrix t = random_matrix(5, 5, seed + 800) + 5.0 * Matrix::Identity(5, 5);
        CHECK(hinf_norm(transform(cl, t), 1e-8) ==
              doctest::Approx(hinf_norm(cl, 1e-8)).epsilon(1e-6));
    }
}

TEST_CASE("recover_gain composes the blocks with the inverse coordinates") {
    const Matrix ktilde = random_matrix(2, 3, 41);
    const Matrix rhat = random_matrix(2, 1, 42);
    const Matrix t = random_matrix(4, 4, 43) + 4.0 * Matrix::Identity(4, 4);

    // r = 0: plain similarity.
    const Matrix k0 = recover_gain(Matrix::Zero(2, 0), ktilde, Matrix::Identity(3, 3));
    CHECK(max_abs(k0 - ktilde) <= 1e-12);

    // T = I: concatenation.
    const Matrix k1 = recover_gain(rhat, ktilde, Matrix::Identity(4, 4));
    CHECK(max_abs(k1.leftCols(1) - rhat) <= 1e-12);
    CHECK(max_abs(k1.rightCols(3) - ktilde) <= 1e-12);

    // General T: multiply back.
    Matrix lhs(2, 4);
    lhs << rhat, ktilde;
    const Matrix k = recover_gain(rhat, ktilde, t);
    CHECK(max_abs(k * t - lhs) <= 1e-10 * std::max(1.0, max_abs(lhs)));

    CHECK_THROWS_AS(recover_gain(rhat, ktilde, Matrix::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("leading_zero_columns counts the zero prefix of a matrix") {
    Matrix d(3, 3);
    d << 0, 0, 1, 0, 0, 2, 0, 0, 3;
    CHECK(leading_zero_columns(d) == 2);
    CHECK(leading_zero_columns(Matrix::Zero(3, 2)) == 2);
    CHECK(leading_zero_columns(random_matrix(3, 2, 3)) == 0);
}

TEST_CASE("augment_differentiator rewrites the control channel") {
    Plant p;
    p.A = random_matrix(3, 3, 61);
    p.B1 = random_matrix(3, 2, 62);
    p.B2 = random_matrix(3, 2, 63);
    p.C1 = random_matrix(2, 3, 64);
    p.D11 = random_matrix(2, 2, 65);
    p.D12 = Matrix::Zero(2, 2);
    p.D12.col(1) = random_matrix(2, 1, 66);

    const double alpha = 1.5;
    const Plant aug = augment_differentiator(p, alpha);
    const Matrix b21 = p.B2.leftCols(1);
    CHECK(max_abs(aug.B2.leftCols(1) -
                  (p.A + alpha * Matrix::Identity(3, 3)) * b21) <= 1e-12);
    CHECK(max_abs(aug.B2.rightCols(1) - p.B2.rightCols(1)) == 0.0);
    CHECK(max_abs(aug.D12.leftCols(1) - p.C1 * b21) <= 1e-12);
    CHECK(max_abs(aug.D12.rightCols(1) - p.D12.rightCols(1)) == 0.0);
    CHECK(max_abs(aug.A - p.A) == 0.0);

    // The rewritten channel plants a zero at -alpha: the pencil annihilates
    // (B21, -e_1) there.
    const Index n = 3, m2 = 2, p1 = 2;
    Matrix pencil(n + p1, n + m2);
    pencil << aug.A + alpha * Matrix::Identity(n, n), aug.B2, aug.C1, aug.D12;
    Vector v(n + m2);
    v.head(n) = b21;
    v(n) = -1.0;
    v(n + 1) = 0.0;
    CHECK((pencil * v).norm() <= 1e-10 * std::max(1.0, pencil.norm()));
}

TEST_CASE("augment_differentiator is the identity for full-rank feedthrough") {
    Plant p;
    p.A = random_matrix(2, 2, 71);
    p.B1 = random_matrix(2, 1, 72);
    p.B2 = random_matrix(2, 1, 73);
    p.C1 = random_matrix(2, 2, 74);
    p.D11 = random_matrix(2, 1, 75);
    p.D12 = random_matrix(2, 1, 76);
    const Plant out = augment_differentiator(p, 1.0);
    CHECK(max_abs(out.B2 - p.B2) == 0.0);
    CHECK(max_abs(out.D12 - p.D12) == 0.0);
}
