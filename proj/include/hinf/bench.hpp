#pragma once

// Benchmark machinery: seeded generator for plants with prescribed stable
// invariant zeros (or a rank-deficient feedthrough), DIMACS accuracy metrics,
// and the batch experiment that solves original and reduced problems side by
// side, recording per-trial rows, threshold counts, and log-histograms.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hinf/lmi.hpp"
#include "hinf/plant.hpp"
#include "hinf/sdp.hpp"

namespace hinf {

struct PlantDims {
    Index n = 7;
    Index p1 = 5;
    Index m1 = 5;
    Index m2 = 2;
};

// Seeded generator: every entry uniform on [-3, 3], then for j = 1..r the
// j-th columns of A and C1 are overwritten so that (-e_j; eta_j; xi_j) is a
// null vector of the zero pencil at zeros[j]. The construction is verified to
// 1e-10 before returning. Zeros must be strictly negative reals.
Plant generate_plant(const PlantDims& dims, const std::vector<double>& zeros, std::uint64_t seed);

// Random plant whose feedthrough has the form (0 | Dhat12) with Dhat12 full
// column rank; requires m2 >= 2.
Plant generate_plant_d12_deficient(const PlantDims& dims, std::uint64_t seed);

// The norm of c used in the err1 denominator: the conventional sum of
// absolute values, or the largest absolute value (the definition the
// experiment write-up states in prose). Max is the default.
enum class DimacsNorm { Max, L1 };

struct DimacsErrors {
    double err1 = 0.0;  // dual equality feasibility
    double err2 = 0.0;  // dual cone violation
    double err3 = 0.0;  // primal equality residual (zero by construction here)
    double err4 = 0.0;  // primal cone violation
    double err5 = 0.0;  // relative duality gap
    double err6 = 0.0;  // relative complementarity
};

DimacsErrors dimacs(const StdLmi& lmi, const SolveReport& report,
                    DimacsNorm norm = DimacsNorm::Max);

enum class TrialKind { Original, ReducedFullRank, ReducedD12 };

const char* to_string(TrialKind k);

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    TrialKind kind = TrialKind::Original;
    std::string status;  // solver status, or "error: ..." when the pipeline failed
    bool solved = false; // true when gamma/errors below carry data
    double gamma = 0.0;
    DimacsErrors errors;
    int iterations = 0;
};

struct ExperimentConfig {
    PlantDims dims;
    std::vector<double> zeros{-1.0, -2.0, -3.0};  // ignored in d12 mode
    bool d12_mode = false;
    int trials = 500;
    double tol = 1e-7;
    int max_iter = 100;
    std::uint64_t seed = 1;
    DimacsNorm norm = DimacsNorm::Max;
    int threads = 1;  // <= 0 selects hardware concurrency
};

struct ThresholdCounts {
    int total = 0;     // rows with solver data
    int neg_1e7 = 0;   // err5 < -1e-7
    int neg_1e5 = 0;   // err5 < -1e-5
    int neg_1e3 = 0;   // err5 < -1e-3
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;  // trial-major, original row then reduced row
    ThresholdCounts original;
    ThresholdCounts reduced;
    int reduced_flag_violations = 0;  // reduced plants whose dual-side flag is still degenerate
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV rows: trial,seed,kind,status,gamma,err1,err5,err6,err2,err3,err4,iterations.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);

// Summary JSON mirroring the three negative-err5 threshold counts per kind.
void write_summary_json(std::ostream& os, const ExperimentResult& result);

// Unit-width log10 histogram bins over [-16, 0] for |err1|, |err5|, |err6|;
// CSV columns: kind,metric,bin_lo,bin_hi,count. Values outside the range are
// clamped into the end bins.
void write_histogram_csv(std::ostream& os, const std::vector<TrialRecord>& records);

}  // namespace hinf
