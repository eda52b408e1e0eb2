#include "hinf/sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include "hinf/errors.hpp"
#include "hinf/lmi.hpp"

namespace hinf {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal:
            return "Optimal";
        case SolveStatus::MaxIter:
            return "MaxIter";
        case SolveStatus::Infeasible:
            return "Infeasible";
        case SolveStatus::NumericalFailure:
            return "NumericalFailure";
    }
    return "NumericalFailure";
}

namespace {

SolveStatus status_from_string(const std::string& s) {
    if (s == "Optimal") return SolveStatus::Optimal;
    if (s == "MaxIter") return SolveStatus::MaxIter;
    if (s == "Infeasible") return SolveStatus::Infeasible;
    if (s == "NumericalFailure") return SolveStatus::NumericalFailure;
    throw ParseError("report: unknown status '" + s + "'");
}

bool chol_with_jitter(const Matrix& s, Eigen::LLT<Matrix>& chol) {
    chol.compute(s);
    if (chol.info() == Eigen::Success) return true;
    const Index n = s.rows();
    double delta = 1e-14 * (1.0 + s.trace() / static_cast<double>(n));
    for (int k = 0; k < 5; ++k) {
        chol.compute(s + delta * Matrix::Identity(n, n));
        if (chol.info() == Eigen::Success) return true;
        delta *= 100.0;
    }
    return false;
}

// Largest step in (0, 1] keeping S + alpha dS positive semidefinite, backed
// off by the fraction-to-boundary factor tau.
double step_length(const Eigen::LLT<Matrix>& chol, const Matrix& ds, double tau) {
    const Matrix L = chol.matrixL();
    const Matrix half = L.triangularView<Eigen::Lower>().solve(ds).transpose().eval();
    const Matrix w = L.triangularView<Eigen::Lower>().solve(half);
    const double lmin = min_eig_sym(sym_part(w));
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, -tau / lmin);
}

}  // namespace

SolveReport solve(const StdLmi& lmi, const SolveOptions& opts) {
    lmi.validate(true);
    const Index N = lmi.dim();
    const Index m = lmi.num_vars();
    if (N < 1) throw DimensionMismatch("solve: empty constraint matrix");
    if (!(opts.tol > 0.0) || opts.max_iter < 1)
        throw DimensionMismatch("solve: bad options");

    const Matrix& F0 = lmi.F[0].mat();
    const double f0_norm = F0.norm();
    const double c_norm = lmi.c.norm();

    double col_norm = 0.0;
    for (const SymMatrix& f : lmi.F)
        col_norm = std::max(col_norm, f.mat().colwise().norm().maxCoeff());
    const double s0 = 1.0 + col_norm;

    Vector x = Vector::Zero(m);
    Matrix X = s0 * Matrix::Identity(N, N);
    Matrix Y = s0 * Matrix::Identity(N, N);

    const double tau = 0.98;
    const double psd_scale = 1.0 + max_abs(F0);

    SolveReport rep;
    rep.status = SolveStatus::MaxIter;

    double prev_eqres = std::numeric_limits<double>::infinity();
    int stall = 0;
    int tiny_steps = 0;
    int iter = 0;

    for (;; ++iter) {
        const Matrix slack = lmi.eval_slack(x);
        const Matrix Rp = slack - X;
        Vector d(m);
        for (Index j = 0; j < m; ++j) d(j) = lmi.c(j) - inner(lmi.F[j + 1].mat(), Y);

        const double obj_p = lmi.objective(x);
        const double obj_d = lmi.dual_objective(Y);
        const double xy = inner(X, Y);
        const double mu = xy / static_cast<double>(N);
        const double pinf = Rp.norm() / (1.0 + f0_norm);
        const double dinf = d.norm() / (1.0 + c_norm);
        const double compl_rel = xy / (1.0 + std::abs(obj_p) + std::abs(obj_d));

        rep.x = x;
        rep.objective_primal = obj_p;
        rep.objective_dual = obj_d;
        rep.iterations = iter;
        rep.mu_final = mu;

        if (!std::isfinite(mu) || !std::isfinite(pinf) || !std::isfinite(dinf)) {
            rep.status = SolveStatus::NumericalFailure;
            break;
        }
        if (std::max(pinf, std::max(dinf, compl_rel)) <= opts.tol &&
            min_eig_sym(sym_part(slack)) >= -1e-9 * psd_scale) {
            rep.status = SolveStatus::Optimal;
            break;
        }
        if (iter >= opts.max_iter) {
            rep.status = SolveStatus::MaxIter;
            break;
        }
        // Divergence heuristics; the method has no homogeneous embedding, so
        // infeasibility only ever surfaces through these.
        if (x.norm() > 1e12 * s0 || Y.norm() > 1e12 * s0) {
            rep.status = SolveStatus::Infeasible;
            break;
        }
        const double eqres = std::max(pinf, dinf);
        if (compl_rel <= opts.tol && eqres > opts.tol && eqres > 0.99 * prev_eqres)
            ++stall;
        else
            stall = 0;
        prev_eqres = eqres;
        if (stall >= 30) {
            rep.status = SolveStatus::Infeasible;
            break;
        }

        Eigen::LLT<Matrix> cholX;
        if (!chol_with_jitter(X, cholX)) {
            rep.status = SolveStatus::NumericalFailure;
            break;
        }
        Matrix Xinv = cholX.solve(Matrix::Identity(N, N));
        Xinv = sym_part(Xinv);

        // Schur complement B_ij = tr(F_i X^{-1} F_j Y); symmetric positive
        // definite for independent F and interior X, Y.
        std::vector<Matrix> H(static_cast<std::size_t>(m));
        for (Index j = 0; j < m; ++j)
            H[static_cast<std::size_t>(j)] = Xinv * lmi.F[j + 1].mat() * Y;
        Matrix B(m, m);
        for (Index j = 0; j < m; ++j) {
            const Matrix Ht = H[static_cast<std::size_t>(j)].transpose();
            for (Index i = 0; i < m; ++i) B(i, j) = inner(lmi.F[i + 1].mat(), Ht);
        }
        B = sym_part(B);

        Eigen::LLT<Matrix> cholB(B);
        if (cholB.info() != Eigen::Success) {
            const double bscale = 1.0 + max_abs(B.diagonal());
            double reg = 1e-12 * bscale;
            bool ok = false;
            while (reg <= 1e-6 * bscale) {
                cholB.compute(B + reg * Matrix::Identity(m, m));
                if (cholB.info() == Eigen::Success) {
                    ok = true;
                    break;
                }
                reg *= 10.0;
            }
            if (!ok) {
                rep.status = SolveStatus::NumericalFailure;
                break;
            }
        }

        const Matrix M2 = Xinv * Rp * Y;
        Vector base_rhs(m);
        for (Index j = 0; j < m; ++j) {
            const Matrix& Fj = lmi.F[j + 1].mat();
            base_rhs(j) = -inner(Fj, M2.transpose()) - lmi.c(j) + inner(Fj, Y);
        }

        // XY + (dX Y + X dY) = Rc target; eliminate dY through the Schur system.
        auto compute_step = [&](const Matrix& Rc, Vector& dx, Matrix& dX, Matrix& dY) {
            const Matrix M1 = Xinv * Rc;
            Vector rhs = base_rhs;
            for (Index j = 0; j < m; ++j) rhs(j) += inner(lmi.F[j + 1].mat(), M1.transpose());
            dx = cholB.solve(rhs);
            dX = Rp;
            for (Index j = 0; j < m; ++j) dX += dx(j) * lmi.F[j + 1].mat();
            dY = sym_part(Xinv * (Rc - dX * Y));
        };

        Eigen::LLT<Matrix> cholY;
        if (!chol_with_jitter(Y, cholY)) {
            rep.status = SolveStatus::NumericalFailure;
            break;
        }

        // Predictor: pure Newton step toward complementarity zero.
        Vector dx_a;
        Matrix dX_a, dY_a;
        compute_step(-X * Y, dx_a, dX_a, dY_a);
        const double ap_a = step_length(cholX, dX_a, tau);
        const double ad_a = step_length(cholY, dY_a, tau);
        const double mu_aff =
            std::max(0.0, inner(X + ap_a * dX_a, Y + ad_a * dY_a) / static_cast<double>(N));

        // Corrector with the second-order Mehrotra term. A collapsing step
        // means the iterate has left the central path, so retry with sigma
        // pushed toward 1 (re-centering); the factorizations are reused and
        // the second-order term is dropped on the later attempts.
        double sigma = std::min(1.0, std::pow(mu_aff / mu, 3.0));
        Vector dx;
        Matrix dX, dY;
        double ap = 0.0, ad = 0.0;
        for (int attempt = 0;; ++attempt) {
            Matrix Rc = sigma * mu * Matrix::Identity(N, N) - X * Y;
            if (attempt < 2) Rc -= dX_a * dY_a;
            compute_step(Rc, dx, dX, dY);
            ap = step_length(cholX, dX, tau);
            ad = step_length(cholY, dY, tau);
            if (attempt >= 4 || std::min(ap, ad) >= 0.05) break;
            sigma = 0.5 * (sigma + 1.0);
        }

        x += ap * dx;
        X = sym_part(X + ap * dX);
        Y = sym_part(Y + ad * dY);

        if (std::getenv("HINF_SDP_TRACE")) {
            const Eigen::SelfAdjointEigenSolver<Matrix> ex(X), ey(Y), eb(B);
            std::fprintf(stderr,
                         "it=%3d mu=%9.2e pinf=%9.2e dinf=%9.2e sig=%5.2f ap=%6.3f ad=%6.3f "
                         "X:[%8.1e,%8.1e] Y:[%8.1e,%8.1e] B:[%8.1e,%8.1e] |dx|=%8.1e\n",
                         iter, mu, pinf, dinf, sigma, ap, ad, ex.eigenvalues()(0),
                         ex.eigenvalues()(N - 1), ey.eigenvalues()(0), ey.eigenvalues()(N - 1),
                         eb.eigenvalues()(0), eb.eigenvalues()(m - 1), dx.norm());
        }

        if (ap < 1e-10 && ad < 1e-10) {
            if (++tiny_steps >= 3) {
                rep.status = SolveStatus::NumericalFailure;
                ++iter;
                rep.iterations = iter;
                break;
            }
        } else {
            tiny_steps = 0;
        }
    }

    rep.x = x;
    rep.Xslack = SymMatrix(sym_part(lmi.eval_slack(x)));
    rep.Y = SymMatrix(sym_part(Y));
    rep.objective_primal = lmi.objective(x);
    rep.objective_dual = lmi.dual_objective(rep.Y.mat());
    rep.mu_final = inner(X, Y) / static_cast<double>(N);
    return rep;
}

SolveReport BuiltinBackend::run(const StdLmi& lmi, const SolveOptions& opts) {
    return solve(lmi, opts);
}

FileExchangeBackend::FileExchangeBackend(std::string label, Runner runner)
    : label_(std::move(label)), runner_(std::move(runner)) {
    if (!runner_) throw BackendUnavailable("file-exchange backend has no runner");
}

SolveReport FileExchangeBackend::run(const StdLmi& lmi, const SolveOptions&) {
    std::ostringstream problem;
    write_stdlmi(problem, lmi);
    std::string answer;
    try {
        answer = runner_(problem.str());
    } catch (const std::exception& e) {
        throw BackendUnavailable(label_ + ": " + e.what());
    }
    std::istringstream in(answer);
    return read_report(in, lmi.dim(), lmi.num_vars());
}

SolveReport solve_with(const StdLmi& lmi, SolverBackend& backend, const SolveOptions& opts) {
    lmi.validate(false);
    return backend.run(lmi, opts);
}

void write_report(std::ostream& os, const SolveReport& report) {
    os << to_string(report.status) << ' ' << std::setprecision(17) << report.objective_primal
       << ' ' << report.objective_dual << ' ' << report.iterations << '\n';
    const Index m = report.x.size();
    for (Index j = 0; j < m; ++j) os << report.x(j) << (j + 1 == m ? '\n' : ' ');
    if (m == 0) os << '\n';
    const auto dump_lower = [&os](const Matrix& M) {
        for (Index i = 0; i < M.rows(); ++i)
            for (Index j = 0; j <= i; ++j) os << M(i, j) << (j == i ? '\n' : ' ');
    };
    dump_lower(report.Xslack.mat());
    dump_lower(report.Y.mat());
}

SolveReport read_report(std::istream& is, Index dim, Index num_vars) {
    std::string status_word;
    SolveReport rep;
    if (!(is >> status_word >> rep.objective_primal >> rep.objective_dual >> rep.iterations))
        throw ParseError("report: bad header line");
    rep.status = status_from_string(status_word);
    rep.x = Vector::Zero(num_vars);
    for (Index j = 0; j < num_vars; ++j)
        if (!(is >> rep.x(j))) throw ParseError("report: truncated x");
    const auto read_lower = [&is, dim](const char* what) {
        Matrix M = Matrix::Zero(dim, dim);
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j <= i; ++j) {
                double v = 0.0;
                if (!(is >> v)) throw ParseError(std::string("report: truncated ") + what);
                M(i, j) = v;
                M(j, i) = v;
            }
        return M;
    };
    rep.Xslack = SymMatrix(read_lower("slack"));
    rep.Y = SymMatrix(read_lower("dual matrix"));
    double extra = 0.0;
    if (is >> extra) throw DimensionMismatch("report: trailing data does not match dimensions");
    rep.mu_final = dim > 0 ? inner(rep.Xslack.mat(), rep.Y.mat()) / static_cast<double>(dim) : 0.0;
    return rep;
}

}  // namespace hinf
