// Command-line front end: diagnose degeneracy of the synthesis problem for a
// plant, synthesize a state-feedback gain (with optional reduction of the
// degenerate problem to an equivalent well-posed one), generate benchmark
// plants with prescribed stable invariant zeros, and run batch experiments.

#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hinf/bench.hpp"
#include "hinf/errors.hpp"
#include "hinf/json_io.hpp"
#include "hinf/lmi.hpp"
#include "hinf/plant.hpp"
#include "hinf/sdp.hpp"
#include "hinf/zeros.hpp"

namespace {

using nlohmann::json;
using namespace hinf;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitAxisZero = 3;
constexpr int kExitNotStabilizable = 4;

const char* kSchemaHelp =
    "H-infinity state-feedback synthesis via linear matrix inequalities, with\n"
    "degeneracy diagnosis and reduction to an equivalent well-posed problem.\n"
    "\n"
    "Plant JSON schema (matrices are arrays of row arrays):\n"
    "  { \"n\": int, \"m1\": int, \"m2\": int, \"p1\": int,\n"
    "    \"A\": n x n, \"B1\": n x m1, \"B2\": n x m2,\n"
    "    \"C1\": p1 x n, \"D11\": p1 x m1, \"D12\": p1 x m2 }\n"
    "for the system x' = A x + B1 w + B2 u, z = C1 x + D11 w + D12 u.\n"
    "\n"
    "Exit codes: 0 success, 1 computation failed, 2 parse or dimension error,\n"
    "3 invariant zero on the imaginary axis, 4 plant not stabilizable.";

const char* mode_name(ReductionMode m) {
    switch (m) {
        case ReductionMode::Identity: return "identity";
        case ReductionMode::FullRank: return "full_rank";
        case ReductionMode::RankDeficientD12: return "rank_deficient_d12";
    }
    return "unknown";
}

std::string format_complex(const std::complex<double>& z) {
    std::ostringstream ss;
    ss << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return ss.str();
}

PlantDims parse_dims(const std::string& s) {
    std::vector<Index> vals;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const long v = std::stol(tok, &pos);
            if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
            vals.push_back(static_cast<Index>(v));
        } catch (const std::exception&) {
            throw ParseError("--dims: '" + tok + "' is not a positive integer");
        }
    }
    if (vals.size() != 4) throw ParseError("--dims expects n,p1,m1,m2");
    PlantDims d;
    d.n = vals[0];
    d.p1 = vals[1];
    d.m1 = vals[2];
    d.m2 = vals[3];
    return d;
}

json dimacs_to_json(const DimacsErrors& e) {
    return json{{"err1", e.err1}, {"err2", e.err2}, {"err3", e.err3},
                {"err4", e.err4}, {"err5", e.err5}, {"err6", e.err6}};
}

// Smallest singular value of the zero pencil at a real point; near zero when
// the point is an invariant zero.
double pencil_min_singular_value(const Plant& p, double lambda) {
    const Index n = p.n(), p1 = p.p1(), m2 = p.m2();
    Matrix pen(n + p1, n + m2);
    pen.topLeftCorner(n, n) = p.A - lambda * Matrix::Identity(n, n);
    pen.topRightCorner(n, m2) = p.B2;
    pen.bottomLeftCorner(p1, n) = p.C1;
    pen.bottomRightCorner(p1, m2) = p.D12;
    return svd(pen).sigma.tail(1)(0);
}

struct SynthArgs {
    std::string plant;
    std::string reduce = "auto";
    double tol = 1e-7;
    int max_iter = 100;
    std::string out;
};

struct GenArgs {
    std::string dims = "7,5,5,2";
    std::vector<double> zeros;
    bool d12 = false;
    std::uint64_t seed = 1;
    std::string out;
};

struct ExpArgs {
    std::string dims = "7,5,5,2";
    std::vector<double> zeros{-1.0, -2.0, -3.0};
    bool d12 = false;
    int trials = 500;
    std::uint64_t seed = 1;
    double tol = 1e-7;
    int max_iter = 100;
    int threads = 1;
    std::string norm = "max";
    std::string out;
    std::string summary;
    std::string hist;
};

int run_zeros(const std::string& plant_path) {
    const Plant p = read_plant_file(plant_path);
    const FeasibilityReport rep = feasibility_report(p);
    std::cout << feasibility_to_json(rep).dump(2) << '\n';
    if (rep.has_imaginary_axis_zero) {
        std::cerr << "invariant zero on the imaginary axis: reduction is not applicable\n";
        return kExitAxisZero;
    }
    return kExitOk;
}

int run_synth(const SynthArgs& a) {
    const Plant p = read_plant_file(a.plant);
    const FeasibilityReport fr = feasibility_report(p);
    if (!fr.stab.stabilizable) {
        std::cerr << "plant is not stabilizable: uncontrollable unstable mode at lambda = "
                  << format_complex(fr.stab.offending_lambda) << '\n';
        return kExitNotStabilizable;
    }
    const bool do_reduce = a.reduce == "on" || (a.reduce == "auto" && !fr.dual_strongly_feasible);

    SolveOptions opts;
    opts.tol = a.tol;
    opts.max_iter = a.max_iter;

    json out;
    out["feasibility"] = feasibility_to_json(fr);
    std::vector<std::string> notes;

    SolveReport rep;
    double gamma = 0.0;
    Matrix k;
    bool have_k = false;
    std::string mode = "none";
    std::string gain_target = "plant";

    if (!do_reduce) {
        const SynthLmi syn = assemble_synth(p);
        rep = solve(syn.lmi, opts);
        const VarMap::Unpacked u = syn.map.unpack(rep.x);
        gamma = u.gamma;
        out["reports"]["original"] = report_to_json(rep);
        out["dimacs"]["original"] = dimacs_to_json(dimacs(syn.lmi, rep));
        try {
            k = gain_from_solution(u.X, u.Y);
            have_k = true;
        } catch (const SingularMatrix&) {
            notes.push_back("state matrix variable is numerically singular; gain not recovered");
        }
    } else {
        ReductionResult rr;
        if (fr.d12_full_column_rank) {
            rr = reduce_full_rank(p, stable_zero_certificate(p));
        } else {
            rr = reduce_rank_deficient(normalize_d12(p));
            gain_target = "derivative_augmented_plant_rotated_inputs";
            notes.push_back(
                "feedthrough is column-rank deficient: the recovered gain drives the "
                "derivative-augmented plant in the rotated input basis given by V");
        }
        rep = solve(rr.reduced_lmi.lmi, opts);
        const VarMap::Unpacked u = rr.reduced_lmi.map.unpack(rep.x);
        gamma = u.gamma;
        mode = mode_name(rr.mode);
        out["reports"]["reduced"] = report_to_json(rep);
        out["dimacs"]["reduced"] = dimacs_to_json(dimacs(rr.reduced_lmi.lmi, rep));
        json red;
        red["mode"] = mode;
        red["r"] = rr.r;
        red["T"] = matrix_to_json(rr.T);
        red["V"] = matrix_to_json(rr.V);
        red["cancelled_modes"] = rr.cancelled_modes;
        if (rr.mode != ReductionMode::Identity)
            red["reduced_feasibility"] = feasibility_to_json(feasibility_report(rr.reduced_plant));
        out["reduction"] = red;
        try {
            const Matrix ktilde = gain_from_solution(u.X, u.Y);
            k = recover_gain(rr.Rhat_gain, ktilde, rr.T);
            have_k = true;
        } catch (const SingularMatrix&) {
            notes.push_back("reduced state matrix variable is numerically singular; gain not recovered");
        }
    }

    out["reduced"] = do_reduce;
    out["mode"] = mode;
    out["status"] = to_string(rep.status);
    out["gamma"] = gamma;
    out["gain_target"] = gain_target;
    out["K"] = have_k ? matrix_to_json(k) : json(nullptr);
    if (have_k && gain_target == "plant") {
        const ClosedLoop cl = close_loop(p, k);
        const bool hurwitz = is_hurwitz(cl.A);
        json check;
        check["hurwitz"] = hurwitz;
        if (hurwitz) check["hinf_norm"] = hinf_norm(cl);
        out["closed_loop"] = check;
    }
    out["notes"] = notes;

    std::ofstream os(a.out);
    if (!os) {
        std::cerr << "error: cannot open output file: " << a.out << '\n';
        return kExitFailure;
    }
    os << out.dump(2) << '\n';
    std::cout << "status=" << to_string(rep.status) << " gamma=" << gamma << " mode=" << mode
              << " -> " << a.out << '\n';
    if (rep.status != SolveStatus::Optimal) {
        std::cerr << "solver did not reach the optimality tolerance: " << to_string(rep.status)
                  << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

int run_gen(const GenArgs& a) {
    const PlantDims dims = parse_dims(a.dims);
    Plant p;
    if (a.d12) {
        p = generate_plant_d12_deficient(dims, a.seed);
    } else {
        p = generate_plant(dims, a.zeros, a.seed);
    }
    std::ofstream os(a.out);
    if (!os) {
        std::cerr << "error: cannot open output file: " << a.out << '\n';
        return kExitFailure;
    }
    write_plant(os, p);

    json ver;
    if (a.d12) {
        ver["d12_rank"] = numerical_rank(p.D12);
        ver["leading_zero_columns"] = leading_zero_columns(p.D12);
    } else {
        json zs = json::array();
        for (double z : a.zeros)
            zs.push_back(json{{"zero", z},
                              {"pencil_min_singular_value", pencil_min_singular_value(p, z)}});
        ver["planted_zeros"] = zs;
    }
    std::cout << ver.dump(2) << '\n';
    return kExitOk;
}

int run_experiment_cmd(const ExpArgs& a) {
    ExperimentConfig cfg;
    cfg.dims = parse_dims(a.dims);
    cfg.zeros = a.zeros;
    cfg.d12_mode = a.d12;
    cfg.trials = a.trials;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;
    cfg.norm = a.norm == "l1" ? DimacsNorm::L1 : DimacsNorm::Max;
    cfg.threads = a.threads;

    const ExperimentResult result = run_experiment(cfg);

    std::ofstream os(a.out);
    if (!os) {
        std::cerr << "error: cannot open output file: " << a.out << '\n';
        return kExitFailure;
    }
    write_trials_csv(os, result.records);
    if (!a.summary.empty()) {
        std::ofstream ss(a.summary);
        if (!ss) {
            std::cerr << "error: cannot open output file: " << a.summary << '\n';
            return kExitFailure;
        }
        write_summary_json(ss, result);
    }
    if (!a.hist.empty()) {
        std::ofstream hs(a.hist);
        if (!hs) {
            std::cerr << "error: cannot open output file: " << a.hist << '\n';
            return kExitFailure;
        }
        write_histogram_csv(hs, result.records);
    }
    std::ostringstream summary;
    write_summary_json(summary, result);
    std::cout << summary.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{kSchemaHelp};
    app.require_subcommand(1);

    std::string zeros_plant;
    CLI::App* cmd_zeros = app.add_subcommand(
        "zeros", "Report invariant zeros, stabilizability, and strong-feasibility flags");
    cmd_zeros->add_option("--plant", zeros_plant, "Plant JSON file")->required();

    SynthArgs sa;
    CLI::App* cmd_synth =
        app.add_subcommand("synth", "Synthesize a state-feedback gain minimizing the H-infinity norm");
    cmd_synth->add_option("--plant", sa.plant, "Plant JSON file")->required();
    cmd_synth->add_option("--reduce", sa.reduce, "Reduce the degenerate problem (default: auto)")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    cmd_synth->add_option("--tol", sa.tol, "Solver stopping tolerance (default 1e-7)")
        ->check(CLI::PositiveNumber);
    cmd_synth->add_option("--max-iter", sa.max_iter, "Solver iteration cap (default 100)")
        ->check(CLI::PositiveNumber);
    cmd_synth->add_option("--out", sa.out, "Result JSON file")->required();

    GenArgs ga;
    CLI::App* cmd_gen =
        app.add_subcommand("gen", "Generate a random plant with prescribed stable invariant zeros");
    cmd_gen->add_option("--dims", ga.dims, "n,p1,m1,m2 (default 7,5,5,2)");
    CLI::Option* gen_zeros =
        cmd_gen->add_option("--zeros", ga.zeros, "Stable zeros to plant, e.g. --zeros=-1,-2,-3")
            ->delimiter(',');
    CLI::Option* gen_d12 = cmd_gen->add_flag(
        "--d12-deficient", ga.d12, "Make the control feedthrough column-rank deficient instead");
    gen_zeros->excludes(gen_d12);
    gen_d12->excludes(gen_zeros);
    cmd_gen->add_option("--seed", ga.seed, "Generator seed (default 1)");
    cmd_gen->add_option("--out", ga.out, "Plant JSON file to write")->required();

    ExpArgs ea;
    CLI::App* cmd_exp = app.add_subcommand(
        "experiment", "Solve original and reduced problems over a batch of random plants");
    cmd_exp->add_option("--dims", ea.dims, "n,p1,m1,m2 (default 7,5,5,2)");
    cmd_exp->add_option("--zeros", ea.zeros, "Stable zeros to plant (default -1,-2,-3)")
        ->delimiter(',');
    cmd_exp->add_flag("--d12-deficient", ea.d12,
                      "Use rank-deficient feedthrough plants instead of planted zeros");
    cmd_exp->add_option("--trials", ea.trials, "Number of plants (default 500)")
        ->check(CLI::PositiveNumber);
    cmd_exp->add_option("--seed", ea.seed, "Base seed (default 1)");
    cmd_exp->add_option("--tol", ea.tol, "Solver stopping tolerance (default 1e-7)")
        ->check(CLI::PositiveNumber);
    cmd_exp->add_option("--max-iter", ea.max_iter, "Solver iteration cap (default 100)")
        ->check(CLI::PositiveNumber);
    cmd_exp->add_option("--threads", ea.threads,
                        "Worker threads; 0 selects hardware concurrency (default 1)");
    cmd_exp->add_option("--dimacs-norm", ea.norm,
                        "Norm of c in the err1 denominator (default max)")
        ->check(CLI::IsMember({"max", "l1"}));
    cmd_exp->add_option("--out", ea.out, "Per-trial CSV file")->required();
    cmd_exp->add_option("--summary", ea.summary, "Summary JSON file");
    cmd_exp->add_option("--hist", ea.hist, "Log-histogram CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (app.got_subcommand(cmd_zeros)) return run_zeros(zeros_plant);
        if (app.got_subcommand(cmd_synth)) return run_synth(sa);
        if (app.got_subcommand(cmd_gen)) return run_gen(ga);
        if (app.got_subcommand(cmd_exp)) return run_experiment_cmd(ea);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const ImaginaryAxisZero& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAxisZero;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
