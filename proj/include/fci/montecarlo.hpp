#ifndef FCI_MONTECARLO_HPP
#define FCI_MONTECARLO_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fci/estimation.hpp"
#include "fci/population.hpp"

namespace fci {

// Deterministic synthetic population: covariates drawn iid (standard normal
// or uniform on [-1, 1]), outcomes Y_i(z_j) = x_i' coef_j + noise_sd_j * e_ij
// with standard-normal noise.
struct SyntheticRecipe {
  int n = 0;
  int k = 1;
  int p = 0;
  std::uint64_t seed = 0;
  enum class CovariateDist { normal, uniform };
  CovariateDist covariate_dist = CovariateDist::normal;
  Eigen::MatrixXd coef;      // p x J (ignored when p = 0)
  Eigen::VectorXd noise_sd;  // length J
};

Population synthesize_population(const SyntheticRecipe& recipe);

struct StudyConfig {
  // either a synthetic recipe or a path to a population CSV/JSON file
  std::variant<SyntheticRecipe, std::string> population;
  int k = 0;  // required for file populations; ignored for synthetic ones
  Eigen::VectorXi counts;
  std::int64_t replicates = 0;  // >= 100
  std::uint64_t master_seed = 0;
  std::vector<int> effects;  // 1-based effect indices; empty tracks all
  double ks_alpha = 1e-3;
  int threads = 1;
};

struct EffectMethodStats {
  std::string label;
  int effect = 0;  // 1-based l
  Method method = Method::unadjusted;
  std::int64_t replicates = 0;
  double mean = 0.0;
  double bias = 0.0;           // mean - true tau(l)
  double n_var = 0.0;          // N * empirical variance
  double sigma2_theory = 0.0;  // plug-in asymptotic variance
  double var_ratio = 0.0;      // n_var / sigma2_theory
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_stat = 0.0;      // vs N(true tau, sigma2_theory / N)
  double ks_critical = 0.0;  // at the configured alpha
};

struct StudyResult {
  std::string mode;  // "sampling" or "exhaustive"
  std::string rng;
  std::uint64_t master_seed = 0;
  std::int64_t replicates = 0;  // effective count
  std::int64_t singular_failures = 0;
  int n = 0;
  int k = 0;
  int p = 0;
  Eigen::VectorXi counts;
  Eigen::VectorXd true_effects;  // length J-1
  std::vector<EffectMethodStats> stats;
  // engineering thresholds, not distribution theory: flagged so consumers
  // don't over-read borderline normality numbers
  std::string normality_note =
      "normality thresholds are engineering choices; no convergence rate is implied";
  double wall_ms = 0.0;
};

void validate(const StudyConfig& cfg);

// Runs the study: draws (or exhaustively enumerates, when the assignment
// count is at most kExhaustiveLimit) randomizations, evaluates both
// estimators on each, and aggregates.  Output is identical for identical
// configs regardless of thread count; wall_ms is the only field that varies.
StudyResult run_study(const StudyConfig& cfg);

inline constexpr std::uint64_t kExhaustiveLimit = 100'000;

}  // namespace fci

#endif
