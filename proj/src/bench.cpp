#include "hinf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"

#include "hinf/errors.hpp"
#include "hinf/zeros.hpp"

namespace hinf {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
    return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(trial) + 1));
}

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

void check_dims(const PlantDims& d) {
    if (d.n < 1 || d.p1 < 1 || d.m1 < 1 || d.m2 < 1)
        throw DimensionMismatch("generator: all dimensions must be positive");
}

}  // namespace

Plant generate_plant(const PlantDims& dims, const std::vector<double>& zeros,
                     std::uint64_t seed) {
    check_dims(dims);
    const Index n = dims.n, p1 = dims.p1, m1 = dims.m1, m2 = dims.m2;
    const Index r = static_cast<Index>(zeros.size());
    if (r > n) throw DimensionMismatch("generator: more zeros than states");
    for (double z : zeros)
        if (!(z < 0.0)) throw DimensionMismatch("generator: zeros must be strictly negative reals");

    std::mt19937_64 rng(seed);
    Plant p;
    p.A = random_matrix(rng, n, n);
    p.C1 = random_matrix(rng, p1, n);
    p.B1 = random_matrix(rng, n, m1);
    p.B2 = random_matrix(rng, n, m2);
    p.D11 = random_matrix(rng, p1, m1);
    p.D12 = random_matrix(rng, p1, m2);

    std::vector<Vector> etas, xis;
    for (Index j = 0; j < r; ++j) {
        const double lambda = zeros[static_cast<std::size_t>(j)];
        const Vector eta = random_matrix(rng, n - r, 1);
        const Vector xi = random_matrix(rng, m2, 1);
        // v = pencil(lambda) * (0_r; eta; xi); columns 1..r of A and C1 are
        // multiplied by zeros, so the overwrites below never feed back.
        Vector state = Vector::Zero(n);
        state.tail(n - r) = eta;
        const Vector v1 = p.A * state - lambda * state + p.B2 * xi;
        const Vector v2 = p.C1 * state + p.D12 * xi;
        p.A.col(j) = v1;
        p.A(j, j) += lambda;
        p.C1.col(j) = v2;
        etas.push_back(eta);
        xis.push_back(xi);
    }

    // Null-vector identities of the finished plant.
    const double scale =
        1.0 + max_abs(p.A) + max_abs(p.B2) + max_abs(p.C1) + max_abs(p.D12);
    for (Index j = 0; j < r; ++j) {
        const double lambda = zeros[static_cast<std::size_t>(j)];
        Vector state = Vector::Zero(n);
        state(j) = -1.0;
        state.tail(n - r) = etas[static_cast<std::size_t>(j)];
        const Vector res1 =
            p.A * state + p.B2 * xis[static_cast<std::size_t>(j)] - lambda * state;
        const Vector res2 = p.C1 * state + p.D12 * xis[static_cast<std::size_t>(j)];
        if (res1.lpNorm<Eigen::Infinity>() > 1e-10 * scale ||
            res2.lpNorm<Eigen::Infinity>() > 1e-10 * scale)
            throw NumericalFailure("generator: null-vector verification failed");
    }
    return p;
}

Plant generate_plant_d12_deficient(const PlantDims& dims, std::uint64_t seed) {
    check_dims(dims);
    if (dims.m2 < 2)
        throw DimensionMismatch("generator: feedthrough deficiency needs m2 >= 2");
    std::mt19937_64 rng(seed);
    Plant p;
    p.A = random_matrix(rng, dims.n, dims.n);
    p.C1 = random_matrix(rng, dims.p1, dims.n);
    p.B1 = random_matrix(rng, dims.n, dims.m1);
    p.B2 = random_matrix(rng, dims.n, dims.m2);
    p.D11 = random_matrix(rng, dims.p1, dims.m1);
    for (int attempt = 0; attempt < 16; ++attempt) {
        p.D12 = random_matrix(rng, dims.p1, dims.m2);
        p.D12.col(0).setZero();
        if (numerical_rank(p.D12) == dims.m2 - 1) return p;
    }
    throw NumericalFailure("generator: could not draw a full-rank trailing feedthrough");
}

DimacsErrors dimacs(const StdLmi& lmi, const SolveReport& report, DimacsNorm norm) {
    lmi.validate(false);
    const Index m = lmi.num_vars();
    if (report.x.size() != m || report.Y.dim() != lmi.dim() || report.Xslack.dim() != lmi.dim())
        throw DimensionMismatch("dimacs: report does not match the problem");

    const auto vec_norm = [norm](const Vector& v) {
        if (v.size() == 0) return 0.0;
        return norm == DimacsNorm::Max ? v.cwiseAbs().maxCoeff() : v.cwiseAbs().sum();
    };
    const auto mat_norm = [norm](const Matrix& v) {
        if (v.size() == 0) return 0.0;
        return norm == DimacsNorm::Max ? v.cwiseAbs().maxCoeff() : v.cwiseAbs().sum();
    };

    const double c_norm = vec_norm(lmi.c);
    const double f0_norm = mat_norm(lmi.F[0].mat());
    const double obj_p = lmi.objective(report.x);
    const double obj_d = lmi.dual_objective(report.Y.mat());
    const double gap_den = 1.0 + std::abs(obj_p) + std::abs(obj_d);

    DimacsErrors e;
    double eq = 0.0;
    for (Index j = 0; j < m; ++j) {
        const double rj = inner(lmi.F[j + 1].mat(), report.Y.mat()) - lmi.c(j);
        eq += rj * rj;
    }
    e.err1 = std::sqrt(eq) / (1.0 + c_norm);
    e.err2 = std::max(0.0, -min_eig_sym(report.Y.mat())) / (1.0 + c_norm);
    e.err3 = (report.Xslack.mat() - lmi.eval_slack(report.x)).norm() / (1.0 + f0_norm);
    e.err4 = std::max(0.0, -min_eig_sym(report.Xslack.mat())) / (1.0 + f0_norm);
    e.err5 = (obj_p - obj_d) / gap_den;
    e.err6 = inner(report.Xslack.mat(), report.Y.mat()) / gap_den;
    return e;
}

const char* to_string(TrialKind k) {
    switch (k) {
        case TrialKind::Original:
            return "original";
        case TrialKind::ReducedFullRank:
            return "reduced_fullrank";
        case TrialKind::ReducedD12:
            return "reduced_d12";
    }
    return "original";
}

namespace {

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

void fill_record(TrialRecord& rec, const StdLmi& lmi, const SolveReport& rep, DimacsNorm norm) {
    rec.status = to_string(rep.status);
    rec.solved = true;
    rec.gamma = rep.objective_primal;
    rec.errors = dimacs(lmi, rep, norm);
    rec.iterations = rep.iterations;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) throw DimensionMismatch("experiment: trials must be positive");
    if (!config.d12_mode && config.zeros.empty())
        throw DimensionMismatch("experiment: zero-placement mode needs at least one zero");

    ExperimentResult result;
    result.config = config;
    result.records.resize(static_cast<std::size_t>(config.trials) * 2);

    std::atomic<int> next{0};
    std::atomic<int> flag_violations{0};

    const SolveOptions sopts{config.tol, config.max_iter};

    auto do_trial = [&](int t) {
        const std::uint64_t tseed = trial_seed(config.seed, t);
        TrialRecord orig;
        orig.trial = t;
        orig.seed = tseed;
        orig.kind = TrialKind::Original;
        TrialRecord red;
        red.trial = t;
        red.seed = tseed;
        red.kind = config.d12_mode ? TrialKind::ReducedD12 : TrialKind::ReducedFullRank;
        try {
            const Plant p = config.d12_mode
                                ? generate_plant_d12_deficient(config.dims, tseed)
                                : generate_plant(config.dims, config.zeros, tseed);
            try {
                const SynthLmi sl = assemble_synth(p);
                fill_record(orig, sl.lmi, solve(sl.lmi, sopts), config.norm);
            } catch (const Error& e) {
                orig.status = sanitize(std::string("error: ") + e.what());
            }
            try {
                const ReductionResult rr = config.d12_mode
                                               ? reduce_rank_deficient(normalize_d12(p))
                                               : reduce_full_rank(p, stable_zero_certificate(p));
                fill_record(red, rr.reduced_lmi.lmi, solve(rr.reduced_lmi.lmi, sopts), config.norm);
                const FeasibilityReport fb = feasibility_report(rr.reduced_plant);
                if (!fb.dual_strongly_feasible) flag_violations.fetch_add(1);
            } catch (const Error& e) {
                red.status = sanitize(std::string("error: ") + e.what());
            }
        } catch (const Error& e) {
            orig.status = sanitize(std::string("error: ") + e.what());
            red.status = orig.status;
        }
        result.records[static_cast<std::size_t>(t) * 2] = orig;
        result.records[static_cast<std::size_t>(t) * 2 + 1] = red;
    };

    int nthreads = config.threads;
    if (nthreads <= 0) nthreads = static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, config.trials));

    if (nthreads == 1) {
        for (int t = 0; t < config.trials; ++t) do_trial(t);
    } else {
        auto worker = [&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= config.trials) return;
                do_trial(t);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    for (const TrialRecord& rec : result.records) {
        if (!rec.solved) continue;
        ThresholdCounts& tc =
            rec.kind == TrialKind::Original ? result.original : result.reduced;
        ++tc.total;
        if (rec.errors.err5 < -1e-7) ++tc.neg_1e7;
        if (rec.errors.err5 < -1e-5) ++tc.neg_1e5;
        if (rec.errors.err5 < -1e-3) ++tc.neg_1e3;
    }
    result.reduced_flag_violations = flag_violations.load();
    return result;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << "trial,seed,kind,status,gamma,err1,err5,err6,err2,err3,err4,iterations\n";
    os << std::setprecision(17);
    for (const TrialRecord& r : records) {
        os << r.trial << ',' << r.seed << ',' << to_string(r.kind) << ',' << r.status << ',';
        if (r.solved) {
            os << r.gamma << ',' << r.errors.err1 << ',' << r.errors.err5 << ','
               << r.errors.err6 << ',' << r.errors.err2 << ',' << r.errors.err3 << ','
               << r.errors.err4 << ',' << r.iterations;
        } else {
            os << ",,,,,,,";
        }
        os << '\n';
    }
}

void write_summary_json(std::ostream& os, const ExperimentResult& result) {
    nlohmann::json j;
    j["config"] = {
        {"n", result.config.dims.n},
        {"p1", result.config.dims.p1},
        {"m1", result.config.dims.m1},
        {"m2", result.config.dims.m2},
        {"mode", result.config.d12_mode ? "d12_deficient" : "stable_zeros"},
        {"zeros", result.config.zeros},
        {"trials", result.config.trials},
        {"tol", result.config.tol},
        {"max_iter", result.config.max_iter},
        {"seed", result.config.seed},
        {"dimacs_norm", result.config.norm == DimacsNorm::Max ? "max" : "l1"},
    };
    const auto counts = [](const ThresholdCounts& t) {
        return nlohmann::json{{"total", t.total},
                              {"err5_below_-1e-7", t.neg_1e7},
                              {"err5_below_-1e-5", t.neg_1e5},
                              {"err5_below_-1e-3", t.neg_1e3}};
    };
    j["original"] = counts(result.original);
    j["reduced"] = counts(result.reduced);
    j["reduced_degenerate_flags"] = result.reduced_flag_violations;
    os << j.dump(2) << '\n';
}

void write_histogram_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << "kind,metric,bin_lo,bin_hi,count\n";
    const TrialKind kinds[] = {TrialKind::Original, TrialKind::ReducedFullRank,
                               TrialKind::ReducedD12};
    const char* metrics[] = {"err1", "err5", "err6"};
    for (TrialKind kind : kinds) {
        bool any = false;
        for (const TrialRecord& r : records)
            if (r.kind == kind && r.solved) any = true;
        if (!any) continue;
        for (int mi = 0; mi < 3; ++mi) {
            int bins[16] = {};
            for (const TrialRecord& r : records) {
                if (r.kind != kind || !r.solved) continue;
                const double v = mi == 0   ? std::abs(r.errors.err1)
                                 : mi == 1 ? std::abs(r.errors.err5)
                                           : std::abs(r.errors.err6);
                int idx;
                if (v <= 0.0) {
                    idx = 0;
                } else {
                    idx = static_cast<int>(std::floor(std::log10(v))) + 16;
                    idx = std::max(0, std::min(15, idx));
                }
                ++bins[idx];
            }
            for (int b = 0; b < 16; ++b)
                os << to_string(kind) << ',' << metrics[mi] << ',' << b - 16 << ',' << b - 15
                   << ',' << bins[b] << '\n';
        }
    }
}

}  // namespace hinf
