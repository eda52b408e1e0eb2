#pragma once

// JSON serialization of plants and solver/diagnosis reports. Plant schema:
//   { "n": int, "m1": int, "m2": int, "p1": int,
//     "A": [[..]], "B1": [[..]], "B2": [[..]],
//     "C1": [[..]], "D11": [[..]], "D12": [[..]] }
// where every matrix is an array of row arrays with the declared dimensions.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hinf/plant.hpp"
#include "hinf/sdp.hpp"
#include "hinf/zeros.hpp"

namespace hinf {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols, const char* name);

nlohmann::json plant_to_json(const Plant& p);
Plant plant_from_json(const nlohmann::json& j);

Plant read_plant(std::istream& is);
Plant read_plant_file(const std::string& path);
void write_plant(std::ostream& os, const Plant& p);

nlohmann::json report_to_json(const SolveReport& rep);
nlohmann::json feasibility_to_json(const FeasibilityReport& rep);

}  // namespace hinf
