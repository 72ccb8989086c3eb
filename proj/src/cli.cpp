#include "fci/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fci/asymptotics.hpp"
#include "fci/design.hpp"
#include "fci/errors.hpp"
#include "fci/estimation.hpp"
#include "fci/io.hpp"
#include "fci/montecarlo.hpp"
#include "fci/population.hpp"
#include "fci/spd.hpp"

namespace fci {

namespace {

template <typename Vec>
std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int cmd_design(int k, const std::string& format, std::ostream& out) {
  const ModelMatrix m = build_model_matrix(k);
  if (format == "json") {
    out << model_matrix_json(m).dump(2) << "\n";
  } else {
    out << model_matrix_csv(m);
  }
  return 0;
}

int cmd_synth(const std::string& recipe_path, const SyntheticRecipe& inline_recipe,
              bool have_inline, const std::string& out_path, std::ostream& out) {
  SyntheticRecipe recipe = inline_recipe;
  if (!recipe_path.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(recipe_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("recipe: ") + e.what());
    }
    recipe = parse_synthetic_recipe(doc);
  } else if (!have_inline) {
    throw std::invalid_argument("synth: give --recipe or inline --n/--k flags");
  }
  const Population pop = synthesize_population(recipe);
  if (out_path.empty()) {
    write_population_csv(out, pop);
  } else {
    std::ofstream file(out_path);
    if (!file) throw io_error("cannot open '" + out_path + "' for writing");
    write_population_csv(file, pop);
    if (!file.good()) throw io_error("error while writing '" + out_path + "'");
  }
  return 0;
}

int cmd_estimate(const std::string& table_path, int k, std::ostream& out) {
  const ModelMatrix m = build_model_matrix(k);
  const ObservedTable table = read_observed_file(table_path, m.j);
  const ObservedData& od = table.data;
  const ObservedSummary s = observed_summary(od);
  const EffectEstimates rb = tau_rb(m, s);

  nlohmann::ordered_json doc;
  doc["n"] = od.n();
  doc["k"] = k;
  doc["p"] = od.covariates();
  doc["counts"] = std::vector<int>(s.counts.data(), s.counts.data() + s.counts.size());
  doc["phat"] = to_std((s.counts.cast<double>() / static_cast<double>(od.n())).eval());
  doc["ybar_obs"] = to_std(s.ybar_obs);

  auto notes = nlohmann::ordered_json::array();
  auto effects = nlohmann::ordered_json::array();
  if (od.covariates() > 0) {
    const Eigen::MatrixXd slopes = beta_hat(od, s);
    const Eigen::VectorXd ca_means = adjusted_means(od, s, slopes);
    const EffectEstimates ca = tau_ca(m, ca_means, slopes);
    doc["ybar_ca"] = to_std(ca_means);
    auto beta = nlohmann::ordered_json::array();
    for (int a = 0; a < m.j; ++a) beta.push_back(to_std(slopes.col(a).eval()));
    doc["beta_hat"] = std::move(beta);
    for (int l = 1; l < m.j; ++l) {
      nlohmann::ordered_json e;
      e["label"] = m.effect_labels[l - 1];
      e["tau_rb"] = rb.tau(l - 1);
      e["tau_ca"] = ca.tau(l - 1);
      effects.push_back(std::move(e));
    }
    const Eigen::RowVectorXd xbar = od.x.colwise().mean();
    const Eigen::MatrixXd xc = od.x.rowwise() - xbar;
    const Eigen::MatrixXd gram = (xc.transpose() * xc) / static_cast<double>(od.n());
    const double cond = SpdSolver((gram + gram.transpose()) / 2.0).condition_estimate();
    if (cond > kConditionWarnThreshold) {
      notes.push_back("covariate Gram matrix condition estimate " +
                      std::to_string(cond) + " exceeds 1e8");
    }
  } else {
    notes.push_back("no covariates in table; covariate-adjusted estimates omitted");
    for (int l = 1; l < m.j; ++l) {
      nlohmann::ordered_json e;
      e["label"] = m.effect_labels[l - 1];
      e["tau_rb"] = rb.tau(l - 1);
      effects.push_back(std::move(e));
    }
  }
  doc["effects"] = std::move(effects);
  doc["notes"] = std::move(notes);
  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_theory(const std::string& pop_path, int k, const std::vector<int>& counts,
               const std::vector<double>& proportions, double eq_tol,
               std::ostream& out) {
  const Population pop = read_population_file(pop_path);
  const int n = static_cast<int>(pop.n());

  if (k == 0) {
    while ((1 << k) < pop.arms()) ++k;
    if ((1 << k) != pop.arms()) {
      throw std::invalid_argument("population has " + std::to_string(pop.arms()) +
                                  " outcome columns, not a power of 2");
    }
  }
  const ModelMatrix m = build_model_matrix(k);
  if (pop.arms() != m.j) {
    throw std::invalid_argument("population outcome columns != 2^k");
  }

  if (counts.empty() == proportions.empty()) {
    throw std::invalid_argument("theory: give exactly one of --counts, --proportions");
  }
  Eigen::VectorXd p(m.j);
  if (!counts.empty()) {
    if (static_cast<int>(counts.size()) != m.j) {
      throw std::invalid_argument("theory: need one count per arm");
    }
    const Eigen::VectorXi c =
        Eigen::Map<const Eigen::VectorXi>(counts.data(), m.j);
    validate_counts(n, c);
    p = c.cast<double>() / static_cast<double>(n);
  } else {
    if (static_cast<int>(proportions.size()) != m.j) {
      throw std::invalid_argument("theory: need one proportion per arm");
    }
    p = Eigen::Map<const Eigen::VectorXd>(proportions.data(), m.j);
  }

  const MomentSummary ms = moments(pop);
  const VarianceReport report = asym_var_effects(ms, p, m, eq_tol);
  out << variance_report_json(report, m, ms, n).dump(2) << "\n";
  return 0;
}

int cmd_mc(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
           std::optional<int> threads_flag, std::ostream& out) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  StudyConfig cfg = parse_study_config(doc);
  if (seed_flag) {
    cfg.master_seed = *seed_flag;
  } else if (!doc.contains("seed")) {
    if (const char* env = std::getenv("FCI_SEED")) {
      cfg.master_seed = std::strtoull(env, nullptr, 10);
    }
  }
  if (threads_flag) cfg.threads = *threads_flag;
  const StudyResult result = run_study(cfg);
  out << study_result_json(result).dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"randomization-based inference for 2^K factorial designs"};
  app.require_subcommand(1);

  // design
  auto* design = app.add_subcommand("design", "print the 2^K model matrix");
  int design_k = 0;
  std::string design_format = "csv";
  design->add_option("--k", design_k, "number of factors")->required();
  design->add_option("--format", design_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic population CSV");
  std::string synth_recipe;
  std::string synth_out;
  SyntheticRecipe inline_recipe;
  int synth_n = 0, synth_k = 0, synth_p = 0;
  std::uint64_t synth_seed = 0;
  double synth_noise = 1.0;
  std::string synth_dist = "normal";
  synth->add_option("--recipe", synth_recipe, "recipe JSON file");
  synth->add_option("--out", synth_out, "output CSV path (default stdout)");
  synth->add_option("--n", synth_n, "units");
  synth->add_option("--k", synth_k, "factors");
  synth->add_option("--p", synth_p, "covariates");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--noise-sd", synth_noise, "common noise scale");
  synth->add_option("--covariate-dist", synth_dist, "normal or uniform")
      ->check(CLI::IsMember({"normal", "uniform"}));

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "estimate factorial effects from an observed-data table");
  std::string est_table;
  int est_k = 0;
  estimate->add_option("--table", est_table, "observed CSV (unit,arm,y,x_1..x_p)")
      ->required();
  estimate->add_option("--k", est_k, "number of factors")->required();

  // theory
  auto* theory = app.add_subcommand(
      "theory", "asymptotic variances and adjustment gain for a population");
  std::string theory_pop;
  int theory_k = 0;
  std::vector<int> theory_counts;
  std::vector<double> theory_props;
  double theory_tol = 1e-8;
  theory->add_option("--population", theory_pop, "population CSV/JSON")->required();
  theory->add_option("--k", theory_k, "number of factors (default: from columns)");
  theory->add_option("--counts", theory_counts, "arm sizes n_1,...,n_J")
      ->delimiter(',');
  theory->add_option("--proportions", theory_props, "arm proportions p_1,...,p_J")
      ->delimiter(',');
  theory->add_option("--tol", theory_tol, "equal-precision tolerance");

  // mc
  auto* mc = app.add_subcommand("mc", "run a Monte Carlo study from a config file");
  std::string mc_config;
  std::optional<std::uint64_t> mc_seed;
  std::optional<int> mc_threads;
  mc->add_option("--config", mc_config, "study config JSON")->required();
  mc->add_option("--seed", mc_seed, "override the config master seed");
  mc->add_option("--threads", mc_threads, "override the config thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (design->parsed()) return cmd_design(design_k, design_format, out);
    if (synth->parsed()) {
      const bool have_inline = synth_n > 0 && synth_k > 0;
      inline_recipe.n = synth_n;
      inline_recipe.k = synth_k;
      inline_recipe.p = synth_p;
      inline_recipe.seed = synth_seed;
      inline_recipe.covariate_dist = synth_dist == "uniform"
                                         ? SyntheticRecipe::CovariateDist::uniform
                                         : SyntheticRecipe::CovariateDist::normal;
      if (have_inline) {
        if (synth_p > 0) {
          inline_recipe.coef = Eigen::MatrixXd::Ones(synth_p, 1 << synth_k);
        }
        inline_recipe.noise_sd =
            Eigen::VectorXd::Constant(1 << synth_k, synth_noise);
      }
      return cmd_synth(synth_recipe, inline_recipe, have_inline, synth_out, out);
    }
    if (estimate->parsed()) return cmd_estimate(est_table, est_k, out);
    if (theory->parsed()) {
      return cmd_theory(theory_pop, theory_k, theory_counts, theory_props,
                        theory_tol, out);
    }
    if (mc->parsed()) return cmd_mc(mc_config, mc_seed, mc_threads, out);
  } catch (const singular_design_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const enumeration_limit_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fci
