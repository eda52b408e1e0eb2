// Python bindings for the synthesis pipeline: plants, degeneracy diagnosis,
// LMI assembly, the interior-point solver, the two reductions, and gain
// recovery. Structured reports cross the boundary as JSON strings.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hinf/bench.hpp"
#include "hinf/errors.hpp"
#include "hinf/json_io.hpp"
#include "hinf/lmi.hpp"
#include "hinf/plant.hpp"
#include "hinf/sdp.hpp"
#include "hinf/zeros.hpp"

namespace py = pybind11;
using namespace hinf;

namespace {

const char* mode_name(ReductionMode m) {
    switch (m) {
        case ReductionMode::Identity: return "identity";
        case ReductionMode::FullRank: return "full_rank";
        case ReductionMode::RankDeficientD12: return "rank_deficient_d12";
    }
    return "unknown";
}

Plant make_plant(Matrix a, Matrix b1, Matrix b2, Matrix c1, Matrix d11, Matrix d12) {
    Plant p;
    p.A = std::move(a);
    p.B1 = std::move(b1);
    p.B2 = std::move(b2);
    p.C1 = std::move(c1);
    p.D11 = std::move(d11);
    p.D12 = std::move(d12);
    p.validate();
    return p;
}

SolveOptions make_options(double tol, int max_iter) {
    SolveOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
}

}  // namespace

PYBIND11_MODULE(_hinffr, m) {
    m.doc() = "State-feedback H-infinity synthesis via LMIs with degeneracy "
              "diagnosis and facial reduction";

    // Translators run newest-first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

    py::class_<Plant>(m, "Plant")
        .def(py::init(&make_plant), py::arg("A"), py::arg("B1"), py::arg("B2"), py::arg("C1"),
             py::arg("D11"), py::arg("D12"))
        .def_readwrite("A", &Plant::A)
        .def_readwrite("B1", &Plant::B1)
        .def_readwrite("B2", &Plant::B2)
        .def_readwrite("C1", &Plant::C1)
        .def_readwrite("D11", &Plant::D11)
        .def_readwrite("D12", &Plant::D12)
        .def_property_readonly("n", &Plant::n)
        .def_property_readonly("m1", &Plant::m1)
        .def_property_readonly("m2", &Plant::m2)
        .def_property_readonly("p1", &Plant::p1)
        .def("validate", &Plant::validate)
        .def("to_json", [](const Plant& p) { return plant_to_json(p).dump(2); })
        .def_static("from_json", [](const std::string& text) {
            std::istringstream is(text);
            return read_plant(is);
        });

    py::class_<ClosedLoop>(m, "ClosedLoop")
        .def_readonly("A", &ClosedLoop::A)
        .def_readonly("B", &ClosedLoop::B)
        .def_readonly("C", &ClosedLoop::C)
        .def_readonly("D", &ClosedLoop::D);

    m.def("close_loop", &close_loop, py::arg("plant"), py::arg("K"));
    m.def("is_hurwitz", &is_hurwitz, py::arg("A"), py::arg("band") = eps_imag);
    m.def("hinf_norm", &hinf_norm, py::arg("system"), py::arg("rel_tol") = 1e-6);
    m.def("recover_gain", &recover_gain, py::arg("Rhat"), py::arg("Ktilde"), py::arg("T"));
    m.def("gain_from_solution", &gain_from_solution, py::arg("X"), py::arg("Y"));
    m.def("augment_differentiator", &augment_differentiator, py::arg("plant"), py::arg("alpha"));
    m.def("leading_zero_columns", &leading_zero_columns, py::arg("D12"));

    py::class_<InvariantZero>(m, "InvariantZero")
        .def_readonly("lam", &InvariantZero::lambda)
        .def_readonly("eta", &InvariantZero::eta)
        .def_readonly("xi", &InvariantZero::xi);

    py::class_<ZeroCertificate>(m, "ZeroCertificate")
        .def_readonly("Hhat", &ZeroCertificate::Hhat)
        .def_readonly("Rhat", &ZeroCertificate::Rhat)
        .def_readonly("Lambda", &ZeroCertificate::Lambda)
        .def_readonly("lambdas", &ZeroCertificate::lambdas)
        .def_property_readonly("r", &ZeroCertificate::r);

    m.def("invariant_zeros", &invariant_zeros, py::arg("plant"));
    m.def("stable_zero_certificate", &stable_zero_certificate, py::arg("plant"));
    m.def("feasibility_json",
          [](const Plant& p) { return feasibility_to_json(feasibility_report(p)).dump(2); },
          py::arg("plant"),
          "Stabilizability, invariant zeros, and strong-feasibility flags as JSON");

    py::class_<StdLmi>(m, "StdLmi")
        .def_property_readonly("dim", &StdLmi::dim)
        .def_property_readonly("num_vars", &StdLmi::num_vars)
        .def_property_readonly("c", [](const StdLmi& l) { return l.c; })
        .def("coefficient",
             [](const StdLmi& l, Index j) {
                 if (j < 0 || j >= static_cast<Index>(l.F.size()))
                     throw DimensionMismatch("coefficient index out of range");
                 return l.F[static_cast<std::size_t>(j)].mat();
             },
             py::arg("j"), "F_j as a dense matrix; j = 0 is the constant term F0")
        .def("eval_slack", [](const StdLmi& l, const Vector& x) { return l.eval_slack(x); },
             py::arg("x"))
        .def("objective", &StdLmi::objective, py::arg("x"))
        .def("to_text",
             [](const StdLmi& l) {
                 std::ostringstream os;
                 write_stdlmi(os, l);
                 return os.str();
             })
        .def_static("from_text", [](const std::string& text) {
            std::istringstream is(text);
            return read_stdlmi(is);
        });

    py::class_<SynthLmi>(m, "SynthLmi")
        .def_readonly("lmi", &SynthLmi::lmi)
        .def_readonly("n", &SynthLmi::n)
        .def_readonly("p1", &SynthLmi::p1)
        .def_readonly("m1", &SynthLmi::m1)
        .def_readonly("m2", &SynthLmi::m2)
        .def("unpack", [](const SynthLmi& s, const Vector& v) {
            const VarMap::Unpacked u = s.map.unpack(v);
            return py::make_tuple(u.gamma, u.X, u.Y);
        });

    m.def("assemble_synth", &assemble_synth, py::arg("plant"));

    py::class_<SolveReport>(m, "SolveReport")
        .def_property_readonly("status",
                               [](const SolveReport& r) { return std::string(to_string(r.status)); })
        .def_readonly("x", &SolveReport::x)
        .def_property_readonly("Xslack", [](const SolveReport& r) { return r.Xslack.mat(); })
        .def_property_readonly("Y", [](const SolveReport& r) { return r.Y.mat(); })
        .def_readonly("objective_primal", &SolveReport::objective_primal)
        .def_readonly("objective_dual", &SolveReport::objective_dual)
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("mu_final", &SolveReport::mu_final);

    m.def("solve",
          [](const StdLmi& lmi, double tol, int max_iter) {
              return solve(lmi, make_options(tol, max_iter));
          },
          py::arg("lmi"), py::arg("tol") = 1e-7, py::arg("max_iter") = 100);

    py::class_<NormalizedD12>(m, "NormalizedD12")
        .def_readonly("plant", &NormalizedD12::p)
        .def_readonly("V", &NormalizedD12::V)
        .def_readonly("r", &NormalizedD12::r);

    py::class_<ReductionResult>(m, "ReductionResult")
        .def_property_readonly("mode",
                               [](const ReductionResult& r) { return std::string(mode_name(r.mode)); })
        .def_readonly("r", &ReductionResult::r)
        .def_readonly("T", &ReductionResult::T)
        .def_readonly("reduced_plant", &ReductionResult::reduced_plant)
        .def_readonly("reduced_lmi", &ReductionResult::reduced_lmi)
        .def_readonly("Rhat_gain", &ReductionResult::Rhat_gain)
        .def_readonly("V", &ReductionResult::V)
        .def_readonly("cancelled_modes", &ReductionResult::cancelled_modes)
        .def_property_readonly("What", [](const ReductionResult& r) { return r.What.mat(); });

    m.def("reduce_full_rank", &reduce_full_rank, py::arg("plant"), py::arg("certificate"));
    m.def("normalize_d12", &normalize_d12, py::arg("plant"));
    m.def("reduce_rank_deficient", &reduce_rank_deficient, py::arg("normalized"));

    py::class_<DimacsErrors>(m, "DimacsErrors")
        .def_readonly("err1", &DimacsErrors::err1)
        .def_readonly("err2", &DimacsErrors::err2)
        .def_readonly("err3", &DimacsErrors::err3)
        .def_readonly("err4", &DimacsErrors::err4)
        .def_readonly("err5", &DimacsErrors::err5)
        .def_readonly("err6", &DimacsErrors::err6);

    m.def("dimacs",
          [](const StdLmi& lmi, const SolveReport& rep, const std::string& norm) {
              return dimacs(lmi, rep, norm == "l1" ? DimacsNorm::L1 : DimacsNorm::Max);
          },
          py::arg("lmi"), py::arg("report"), py::arg("norm") = "max");

    m.def("generate_plant",
          [](Index n, Index p1, Index m1, Index m2, const std::vector<double>& zeros,
             std::uint64_t seed) {
              PlantDims d;
              d.n = n;
              d.p1 = p1;
              d.m1 = m1;
              d.m2 = m2;
              return generate_plant(d, zeros, seed);
          },
          py::arg("n"), py::arg("p1"), py::arg("m1"), py::arg("m2"), py::arg("zeros"),
          py::arg("seed"));
    m.def("generate_plant_d12_deficient",
          [](Index n, Index p1, Index m1, Index m2, std::uint64_t seed) {
              PlantDims d;
              d.n = n;
              d.p1 = p1;
              d.m1 = m1;
              d.m2 = m2;
              return generate_plant_d12_deficient(d, seed);
          },
          py::arg("n"), py::arg("p1"), py::arg("m1"), py::arg("m2"), py::arg("seed"));
}
