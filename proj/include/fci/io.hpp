#ifndef FCI_IO_HPP
#define FCI_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fci/asymptotics.hpp"
#include "fci/design.hpp"
#include "fci/estimation.hpp"
#include "fci/montecarlo.hpp"
#include "fci/population.hpp"

namespace fci {

// Observed-data table as read from disk: one outcome per unit.  Deliberately
// a different schema from Population (header `unit,arm,y,x_1..x_p` versus
// `y_1..y_J,x_1..x_p`) so estimation inputs cannot carry counterfactuals.
struct ObservedTable {
  std::vector<long long> unit_ids;
  ObservedData data;
};

// --- population files ---------------------------------------------------
// CSV header: y_1,...,y_J[,x_1,...,x_p]; one row per unit.
Population read_population_csv(std::istream& in);
Population read_population_json(std::istream& in);
// dispatches on extension (.json -> JSON, anything else CSV)
Population read_population_file(const std::string& path);
void write_population_csv(std::ostream& out, const Population& pop);

// --- observed tables ----------------------------------------------------
// CSV header: unit,arm,y[,x_1,...,x_p].  `arms` is J = 2^K.
ObservedTable read_observed_csv(std::istream& in, int arms);
ObservedTable read_observed_file(const std::string& path, int arms);
// every arm present with >= 2 rows, ids unique
void validate(const ObservedTable& table);

// --- model matrix -------------------------------------------------------
std::string model_matrix_csv(const ModelMatrix& m);
ModelMatrix parse_model_matrix_csv(std::istream& in);
nlohmann::ordered_json model_matrix_json(const ModelMatrix& m);

// --- reports ------------------------------------------------------------
nlohmann::ordered_json variance_report_json(const VarianceReport& report,
                                            const ModelMatrix& m,
                                            const MomentSummary& ms, int n);
nlohmann::ordered_json study_result_json(const StudyResult& result);

// --- study configs ------------------------------------------------------
StudyConfig parse_study_config(const nlohmann::json& j);
StudyConfig read_study_config(const std::string& path);
SyntheticRecipe parse_synthetic_recipe(const nlohmann::json& j);

// Opens for reading or throws io_error.
std::string read_text_file(const std::string& path);

}  // namespace fci

#endif
