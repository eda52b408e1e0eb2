#include "hinf/json_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "hinf/errors.hpp"

namespace hinf {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, Index rows, Index cols, const char* name) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows)
        throw ParseError(std::string(name) + ": expected " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ParseError(std::string(name) + ": expected " + std::to_string(cols) +
                             " columns in every row");
        for (Index k = 0; k < cols; ++k) {
            const json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw ParseError(std::string(name) + ": non-numeric entry");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

json plant_to_json(const Plant& p) {
    json j;
    j["n"] = p.n();
    j["m1"] = p.m1();
    j["m2"] = p.m2();
    j["p1"] = p.p1();
    j["A"] = matrix_to_json(p.A);
    j["B1"] = matrix_to_json(p.B1);
    j["B2"] = matrix_to_json(p.B2);
    j["C1"] = matrix_to_json(p.C1);
    j["D11"] = matrix_to_json(p.D11);
    j["D12"] = matrix_to_json(p.D12);
    return j;
}

Plant plant_from_json(const json& j) {
    for (const char* key : {"n", "m1", "m2", "p1", "A", "B1", "B2", "C1", "D11", "D12"})
        if (!j.contains(key)) throw ParseError(std::string("plant: missing key '") + key + "'");
    for (const char* key : {"n", "m1", "m2", "p1"})
        if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
            throw ParseError(std::string("plant: '") + key + "' must be a nonnegative integer");
    const Index n = j["n"].get<Index>();
    const Index m1 = j["m1"].get<Index>();
    const Index m2 = j["m2"].get<Index>();
    const Index p1 = j["p1"].get<Index>();
    Plant p;
    p.A = matrix_from_json(j["A"], n, n, "A");
    p.B1 = matrix_from_json(j["B1"], n, m1, "B1");
    p.B2 = matrix_from_json(j["B2"], n, m2, "B2");
    p.C1 = matrix_from_json(j["C1"], p1, n, "C1");
    p.D11 = matrix_from_json(j["D11"], p1, m1, "D11");
    p.D12 = matrix_from_json(j["D12"], p1, m2, "D12");
    p.validate();
    return p;
}

Plant read_plant(std::istream& is) {
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("plant: invalid JSON: ") + e.what());
    }
    return plant_from_json(j);
}

Plant read_plant_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plant file: " + path);
    return read_plant(in);
}

void write_plant(std::ostream& os, const Plant& p) { os << plant_to_json(p).dump(2) << '\n'; }

json report_to_json(const SolveReport& rep) {
    return json{{"status", to_string(rep.status)},
                {"objective_primal", rep.objective_primal},
                {"objective_dual", rep.objective_dual},
                {"iterations", rep.iterations},
                {"mu_final", rep.mu_final}};
}

namespace {

json complex_to_json(const std::complex<double>& z) { return json{z.real(), z.imag()}; }

json cvector_to_json(const CVector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

}  // namespace

json feasibility_to_json(const FeasibilityReport& rep) {
    json j;
    j["stabilizable"] = rep.stab.stabilizable;
    if (!rep.stab.stabilizable) {
        j["unstabilizable_mode"] = complex_to_json(rep.stab.offending_lambda);
        j["unstabilizable_direction"] = cvector_to_json(rep.stab.offending_eta);
    }
    j["d12_full_column_rank"] = rep.d12_full_column_rank;
    j["d12_rank"] = rep.d12_rank;
    json zeros = json::array();
    for (const InvariantZero& z : rep.zeros) {
        zeros.push_back(json{{"lambda", complex_to_json(z.lambda)},
                             {"eta", cvector_to_json(z.eta)},
                             {"xi", cvector_to_json(z.xi)}});
    }
    j["invariant_zeros"] = zeros;
    j["has_imaginary_axis_zero"] = rep.has_imaginary_axis_zero;
    j["primal_strongly_feasible"] = rep.primal_strongly_feasible;
    j["dual_strongly_feasible"] = rep.dual_strongly_feasible;
    j["notes"] = rep.notes;
    return j;
}

}  // namespace hinf
