#include "fci/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fci/errors.hpp"

namespace fci {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& field, int line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": cannot parse number '" + field + "'");
  }
  return value;
}

long long parse_int(const std::string& field, int line_no) {
  long long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": cannot parse integer '" + field + "'");
  }
  return value;
}

std::string strip_bom(std::string s) {
  if (s.size() >= 3 && s[0] == '\xEF' && s[1] == '\xBB' && s[2] == '\xBF') {
    return s.substr(3);
  }
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// expects names[i] == prefix_(i+1) for a contiguous run; returns run length
int count_indexed_columns(const std::vector<std::string>& names, std::size_t offset,
                          const std::string& prefix) {
  int count = 0;
  for (std::size_t i = offset; i < names.size(); ++i) {
    if (names[i] == prefix + "_" + std::to_string(count + 1)) {
      ++count;
    } else {
      break;
    }
  }
  return count;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading '" + path + "'");
  return buf.str();
}

Population read_population_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("population CSV: missing header row");
  }
  const auto header = split_csv_line(strip_bom(line));
  const int j = count_indexed_columns(header, 0, "y");
  if (j < 1) {
    throw std::invalid_argument(
        "population CSV: header must start with y_1 (a full potential-outcome "
        "table); observed-data tables use the `estimate` schema unit,arm,y,...");
  }
  const int p = count_indexed_columns(header, j, "x");
  if (static_cast<std::size_t>(j + p) != header.size()) {
    throw std::invalid_argument(
        "population CSV: unexpected column '" + header[j + p] +
        "'; expected y_1..y_J then x_1..x_p");
  }

  std::vector<double> values;
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    for (const auto& f : fields) values.push_back(parse_double(f, line_no));
    ++rows;
  }

  Population pop;
  pop.y.resize(rows, j);
  pop.x.resize(rows, p);
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < j; ++c) pop.y(i, c) = values[i * (j + p) + c];
    for (int c = 0; c < p; ++c) pop.x(i, c) = values[i * (j + p) + j + c];
  }
  validate(pop);
  return pop;
}

Population read_population_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("population JSON: ") + e.what());
  }
  if (!doc.contains("k") || !doc.contains("p") || !doc.contains("y")) {
    throw std::invalid_argument("population JSON: need fields k, p, y");
  }
  const int k = doc["k"].get<int>();
  const int p = doc["p"].get<int>();
  const int j = 1 << k;
  const auto& y = doc["y"];
  const int n = static_cast<int>(y.size());

  Population pop;
  pop.y.resize(n, j);
  pop.x.resize(n, p);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(y[i].size()) != j) {
      throw std::invalid_argument("population JSON: row " + std::to_string(i) +
                                  " of y must have 2^k entries");
    }
    for (int c = 0; c < j; ++c) pop.y(i, c) = y[i][c].get<double>();
  }
  if (p > 0) {
    if (!doc.contains("x") || static_cast<int>(doc["x"].size()) != n) {
      throw std::invalid_argument("population JSON: x must have N rows");
    }
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(doc["x"][i].size()) != p) {
        throw std::invalid_argument("population JSON: row " + std::to_string(i) +
                                    " of x must have p entries");
      }
      for (int c = 0; c < p; ++c) pop.x(i, c) = doc["x"][i][c].get<double>();
    }
  }
  validate(pop);
  return pop;
}

Population read_population_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return read_population_json(in);
  }
  return read_population_csv(in);
}

void write_population_csv(std::ostream& out, const Population& pop) {
  const Eigen::Index j = pop.arms();
  const Eigen::Index p = pop.covariates();
  for (Eigen::Index c = 0; c < j; ++c) out << (c ? "," : "") << "y_" << (c + 1);
  for (Eigen::Index c = 0; c < p; ++c) out << ",x_" << (c + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < pop.n(); ++i) {
    for (Eigen::Index c = 0; c < j; ++c) {
      out << (c ? "," : "") << format_double(pop.y(i, c));
    }
    for (Eigen::Index c = 0; c < p; ++c) out << "," << format_double(pop.x(i, c));
    out << "\n";
  }
}

ObservedTable read_observed_csv(std::istream& in, int arms) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("observed CSV: missing header row");
  }
  const auto header = split_csv_line(strip_bom(line));
  if (header.size() < 3 || header[0] != "unit" || header[1] != "arm" ||
      header[2] != "y") {
    throw std::invalid_argument(
        "observed CSV: header must be unit,arm,y[,x_1..x_p]; full "
        "potential-outcome tables use the `theory` schema y_1..y_J,...");
  }
  const int p = count_indexed_columns(header, 3, "x");
  if (static_cast<std::size_t>(3 + p) != header.size()) {
    throw std::invalid_argument("observed CSV: unexpected column '" + header[3 + p] +
                                "'; expected unit,arm,y,x_1..x_p");
  }

  ObservedTable table;
  std::vector<int> arm;
  std::vector<double> y;
  std::vector<double> x;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    table.unit_ids.push_back(parse_int(fields[0], line_no));
    const long long a = parse_int(fields[1], line_no);
    if (a < 1 || a > arms) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": arm index " +
                                  std::to_string(a) + " outside 1.." +
                                  std::to_string(arms));
    }
    arm.push_back(static_cast<int>(a));
    y.push_back(parse_double(fields[2], line_no));
    for (int c = 0; c < p; ++c) x.push_back(parse_double(fields[3 + c], line_no));
  }

  const int n = static_cast<int>(arm.size());
  table.data.arms = arms;
  table.data.arm = Eigen::Map<const Eigen::VectorXi>(arm.data(), n);
  table.data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  table.data.x.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) table.data.x(i, c) = x[i * p + c];
  }
  validate(table);
  return table;
}

ObservedTable read_observed_file(const std::string& path, int arms) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  return read_observed_csv(in, arms);
}

void validate(const ObservedTable& table) {
  std::set<long long> ids(table.unit_ids.begin(), table.unit_ids.end());
  if (ids.size() != table.unit_ids.size()) {
    throw std::invalid_argument("observed table: duplicate unit ids");
  }
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(table.data.arms);
  for (int i = 0; i < table.data.arm.size(); ++i) counts(table.data.arm(i) - 1) += 1;
  for (int a = 0; a < counts.size(); ++a) {
    if (counts(a) < 2) {
      throw std::invalid_argument("observed table: arm " + std::to_string(a + 1) +
                                  " has " + std::to_string(counts(a)) +
                                  " unit(s); every arm needs at least 2");
    }
  }
  if (!table.data.y.allFinite() || !table.data.x.allFinite()) {
    throw std::invalid_argument("observed table: non-finite entry");
  }
}

std::string model_matrix_csv(const ModelMatrix& m) {
  std::ostringstream out;
  out << "mean";
  for (const auto& label : m.effect_labels) out << "," << label;
  out << "\n";
  for (int row = 0; row < m.j; ++row) {
    for (int col = 0; col < m.j; ++col) out << (col ? "," : "") << m.h(row, col);
    out << "\n";
  }
  return out.str();
}

ModelMatrix parse_model_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("model matrix CSV: missing header");
  }
  const auto header = split_csv_line(strip_bom(line));
  const int j = static_cast<int>(header.size());
  int k = 0;
  while ((1 << k) < j) ++k;
  if ((1 << k) != j || header[0] != "mean") {
    throw std::invalid_argument("model matrix CSV: malformed header");
  }
  ModelMatrix m;
  m.k = k;
  m.j = j;
  m.effect_labels.assign(header.begin() + 1, header.end());
  m.h.resize(j, j);
  int row = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (row >= j) throw std::invalid_argument("model matrix CSV: too many rows");
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != j) {
      throw std::invalid_argument("model matrix CSV: row width mismatch");
    }
    for (int c = 0; c < j; ++c) {
      m.h(row, c) = static_cast<int>(parse_int(fields[c], line_no));
    }
    ++row;
  }
  if (row != j) throw std::invalid_argument("model matrix CSV: expected J rows");
  return m;
}

nlohmann::ordered_json model_matrix_json(const ModelMatrix& m) {
  nlohmann::ordered_json doc;
  doc["k"] = m.k;
  doc["j"] = m.j;
  doc["labels"] = m.effect_labels;
  auto columns = nlohmann::ordered_json::array();
  for (int c = 0; c < m.j; ++c) {
    auto col = nlohmann::ordered_json::array();
    for (int r = 0; r < m.j; ++r) col.push_back(m.h(r, c));
    columns.push_back(std::move(col));
  }
  doc["columns"] = std::move(columns);
  return doc;
}

nlohmann::ordered_json variance_report_json(const VarianceReport& report,
                                            const ModelMatrix& m,
                                            const MomentSummary& ms, int n) {
  nlohmann::ordered_json doc;
  doc["analysis"] = "plug-in asymptotics";
  doc["n"] = n;
  doc["k"] = m.k;
  doc["p"] = ms.lambda.rows();
  doc["proportions"] = std::vector<double>(report.p.data(), report.p.data() + report.p.size());
  doc["equal_precision_tolerance"] = report.tolerance;
  auto warnings = nlohmann::ordered_json::array();
  if (ms.omega_condition > kConditionWarnThreshold) {
    warnings.push_back("covariate Gram matrix condition estimate " +
                       std::to_string(ms.omega_condition) + " exceeds 1e8");
  }
  for (int j = 0; j < ms.sigma.rows(); ++j) {
    if (!(ms.sigma(j, j) > 0.0)) {
      warnings.push_back("outcome column " + std::to_string(j + 1) +
                         " has zero variance; the limit formulas assume "
                         "strictly positive arm variances");
    }
  }
  doc["warnings"] = std::move(warnings);
  auto effects = nlohmann::ordered_json::array();
  for (int l = 1; l < m.j; ++l) {
    nlohmann::ordered_json e;
    e["label"] = m.effect_labels[l - 1];
    e["var_rb"] = report.var_rb(l - 1);
    e["var_ca"] = report.var_ca(l - 1);
    e["gain"] = report.gain(l - 1);
    e["gain_corollary"] = report.gain_corollary(l - 1);
    e["equal_precision"] = static_cast<bool>(report.equal_precision[l - 1]);
    // same quantities on the scale of tau_hat itself
    e["var_tauhat_rb"] = report.var_rb(l - 1) / n;
    e["var_tauhat_ca"] = report.var_ca(l - 1) / n;
    e["gain_tauhat"] = report.gain(l - 1) / n;
    effects.push_back(std::move(e));
  }
  doc["effects"] = std::move(effects);
  return doc;
}

nlohmann::ordered_json study_result_json(const StudyResult& result) {
  nlohmann::ordered_json doc;
  doc["mode"] = result.mode;
  doc["rng"] = result.rng;
  doc["seed"] = result.master_seed;
  doc["replicates"] = result.replicates;
  doc["singular_failures"] = result.singular_failures;
  doc["n"] = result.n;
  doc["k"] = result.k;
  doc["p"] = result.p;
  doc["counts"] = std::vector<int>(result.counts.data(),
                                   result.counts.data() + result.counts.size());
  doc["true_tau"] = std::vector<double>(
      result.true_effects.data(),
      result.true_effects.data() + result.true_effects.size());
  auto stats = nlohmann::ordered_json::array();
  for (const auto& st : result.stats) {
    nlohmann::ordered_json e;
    e["label"] = st.label;
    e["effect"] = st.effect;
    e["method"] =
        st.method == Method::unadjusted ? "unadjusted" : "covariate_adjusted";
    e["replicates"] = st.replicates;
    e["mean"] = st.mean;
    e["bias"] = st.bias;
    e["n_var"] = st.n_var;
    e["sigma2_theory"] = st.sigma2_theory;
    e["var_ratio"] = st.var_ratio;
    e["skewness"] = st.skewness;
    e["excess_kurtosis"] = st.excess_kurtosis;
    e["ks_stat"] = st.ks_stat;
    e["ks_critical"] = st.ks_critical;
    stats.push_back(std::move(e));
  }
  doc["effects"] = std::move(stats);
  doc["note"] = result.normality_note;
  doc["wall_ms"] = result.wall_ms;
  return doc;
}

SyntheticRecipe parse_synthetic_recipe(const nlohmann::json& j) {
  SyntheticRecipe recipe;
  try {
    recipe.n = j.at("n").get<int>();
    recipe.k = j.at("k").get<int>();
    recipe.p = j.value("p", 0);
    recipe.seed = j.value("seed", 0ULL);
    const std::string dist = j.value("covariate_dist", std::string("normal"));
    if (dist == "normal") {
      recipe.covariate_dist = SyntheticRecipe::CovariateDist::normal;
    } else if (dist == "uniform") {
      recipe.covariate_dist = SyntheticRecipe::CovariateDist::uniform;
    } else {
      throw std::invalid_argument("covariate_dist must be 'normal' or 'uniform'");
    }
    const int arms = 1 << recipe.k;
    if (recipe.p > 0) {
      recipe.coef.resize(recipe.p, arms);
      if (j.contains("coef")) {
        const auto& coef = j.at("coef");
        if (static_cast<int>(coef.size()) != arms) {
          throw std::invalid_argument("coef must have one column per arm (J arrays)");
        }
        for (int a = 0; a < arms; ++a) {
          if (static_cast<int>(coef[a].size()) != recipe.p) {
            throw std::invalid_argument("coef[" + std::to_string(a) +
                                        "] must have p entries");
          }
          for (int c = 0; c < recipe.p; ++c) recipe.coef(c, a) = coef[a][c].get<double>();
        }
      } else {
        recipe.coef.setOnes();
      }
    }
    recipe.noise_sd.resize(arms);
    if (j.contains("noise_sd") && j.at("noise_sd").is_array()) {
      const auto& sd = j.at("noise_sd");
      if (static_cast<int>(sd.size()) != arms) {
        throw std::invalid_argument("noise_sd must have J entries");
      }
      for (int a = 0; a < arms; ++a) recipe.noise_sd(a) = sd[a].get<double>();
    } else {
      recipe.noise_sd.setConstant(j.value("noise_sd", 1.0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("synthetic recipe: ") + e.what());
  }
  return recipe;
}

StudyConfig parse_study_config(const nlohmann::json& j) {
  StudyConfig cfg;
  try {
    const auto& pop = j.at("population");
    if (pop.contains("synthetic")) {
      cfg.population = parse_synthetic_recipe(pop.at("synthetic"));
    } else if (pop.contains("file")) {
      cfg.population = pop.at("file").get<std::string>();
    } else {
      throw std::invalid_argument(
          "population must contain either 'synthetic' or 'file'");
    }
    cfg.k = j.value("k", 0);
    const auto counts = j.at("counts").get<std::vector<int>>();
    cfg.counts = Eigen::Map<const Eigen::VectorXi>(counts.data(),
                                                   static_cast<int>(counts.size()));
    cfg.replicates = j.at("replicates").get<std::int64_t>();
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("effects")) cfg.effects = j.at("effects").get<std::vector<int>>();
    cfg.ks_alpha = j.value("ks_alpha", 1e-3);
    cfg.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  return cfg;
}

StudyConfig read_study_config(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  return parse_study_config(doc);
}

}  // namespace fci
