#include "fci/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fci/asymptotics.hpp"
#include "fci/errors.hpp"
#include "fci/io.hpp"
#include "fci/randomization.hpp"
#include "fci/rng.hpp"
#include "fci/stats.hpp"

namespace fci {

Population synthesize_population(const SyntheticRecipe& recipe) {
  if (recipe.n < 1 || recipe.k < 1) {
    throw std::invalid_argument("synthetic recipe: need n >= 1 and k >= 1");
  }
  if (recipe.p < 0) throw std::invalid_argument("synthetic recipe: p < 0");
  const int j = 1 << recipe.k;
  if (recipe.p > 0 && (recipe.coef.rows() != recipe.p || recipe.coef.cols() != j)) {
    throw std::invalid_argument("synthetic recipe: coef must be p x J");
  }
  if (recipe.noise_sd.size() != j) {
    throw std::invalid_argument("synthetic recipe: noise_sd must have J entries");
  }
  if ((recipe.noise_sd.array() < 0.0).any()) {
    throw std::invalid_argument("synthetic recipe: negative noise scale");
  }

  Rng rng(recipe.seed);
  Population pop;
  pop.x.resize(recipe.n, recipe.p);
  for (int i = 0; i < recipe.n; ++i) {
    for (int c = 0; c < recipe.p; ++c) {
      pop.x(i, c) = recipe.covariate_dist == SyntheticRecipe::CovariateDist::normal
                        ? rng.normal()
                        : 2.0 * rng.uniform01() - 1.0;
    }
  }
  pop.y.resize(recipe.n, j);
  for (int i = 0; i < recipe.n; ++i) {
    for (int a = 0; a < j; ++a) {
      double mean = 0.0;
      if (recipe.p > 0) mean = pop.x.row(i).dot(recipe.coef.col(a));
      pop.y(i, a) = mean + recipe.noise_sd(a) * rng.normal();
    }
  }
  validate(pop);
  return pop;
}

void validate(const StudyConfig& cfg) {
  if (cfg.replicates < 100) {
    throw std::invalid_argument("study config: replicates must be >= 100, got " +
                                std::to_string(cfg.replicates));
  }
  if (cfg.counts.size() < 1) throw std::invalid_argument("study config: counts missing");
  if (cfg.threads < 1) throw std::invalid_argument("study config: threads < 1");
  if (cfg.ks_alpha <= 0.0 || cfg.ks_alpha >= 1.0) {
    throw std::invalid_argument("study config: ks_alpha outside (0, 1)");
  }
}

namespace {

struct ResolvedStudy {
  Population pop;
  int k = 0;
};

ResolvedStudy resolve_population(const StudyConfig& cfg) {
  ResolvedStudy r;
  if (std::holds_alternative<SyntheticRecipe>(cfg.population)) {
    const auto& recipe = std::get<SyntheticRecipe>(cfg.population);
    r.pop = synthesize_population(recipe);
    r.k = recipe.k;
  } else {
    r.pop = read_population_file(std::get<std::string>(cfg.population));
    r.k = cfg.k;
    if (r.k < 1) {
      // infer from the column count when the config does not pin it
      int k = 0;
      while ((1 << k) < r.pop.arms()) ++k;
      if ((1 << k) != r.pop.arms()) {
        throw std::invalid_argument("study config: population arms not a power of 2");
      }
      r.k = k;
    }
  }
  return r;
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  ResolvedStudy resolved = resolve_population(cfg);
  const Population& pop = resolved.pop;
  const int n = static_cast<int>(pop.n());
  const int p = static_cast<int>(pop.covariates());
  const ModelMatrix m = build_model_matrix(resolved.k);
  if (pop.arms() != m.j) {
    throw std::invalid_argument("study config: population arms != 2^k");
  }
  validate_counts(n, cfg.counts);
  if (cfg.counts.size() != m.j) {
    throw std::invalid_argument("study config: counts length != 2^k");
  }

  std::vector<int> effects = cfg.effects;
  if (effects.empty()) {
    for (int l = 1; l < m.j; ++l) effects.push_back(l);
  }
  for (int l : effects) {
    if (l < 1 || l >= m.j) {
      throw std::invalid_argument("study config: effect index " + std::to_string(l) +
                                  " outside 1..J-1");
    }
  }

  const Eigen::VectorXd tau = true_tau(m, pop);
  const MomentSummary ms = moments(pop);
  const Eigen::VectorXd phat = cfg.counts.cast<double>() / static_cast<double>(n);
  const VarianceReport theory = asym_var_effects(ms, phat, m);

  StudyResult result;
  result.rng = Rng::algorithm();
  result.master_seed = cfg.master_seed;
  result.n = n;
  result.k = resolved.k;
  result.p = p;
  result.counts = cfg.counts;
  result.true_effects = tau;

  const auto exhaustive = try_assignment_count(n, cfg.counts, kExhaustiveLimit);
  result.mode = exhaustive ? "exhaustive" : "sampling";
  const std::int64_t r_total =
      exhaustive ? static_cast<std::int64_t>(*exhaustive) : cfg.replicates;
  result.replicates = r_total;

  // tau draws stored per replicate slot; aggregation order is then fixed no
  // matter how replicates were scheduled
  Eigen::MatrixXd draws_rb(r_total, m.j - 1);
  Eigen::MatrixXd draws_ca(r_total, m.j - 1);

  auto evaluate = [&](const Assignment& a, std::int64_t slot) {
    const ObservedData od = observe(pop, a);
    const ObservedSummary s = observed_summary(od);
    const EffectEstimates rb = tau_rb(m, s);
    draws_rb.row(slot) = rb.tau.transpose();
    if (p > 0) {
      const Eigen::MatrixXd slopes = beta_hat(od, s);
      const Eigen::VectorXd ca = adjusted_means(od, s, slopes);
      draws_ca.row(slot) = tau_ca(m, ca).tau.transpose();
    } else {
      draws_ca.row(slot) = draws_rb.row(slot);
    }
  };

  std::int64_t failures = 0;
  if (exhaustive) {
    std::int64_t slot = 0;
    for_each_assignment(n, cfg.counts, [&](const Assignment& a) {
      try {
        evaluate(a, slot);
      } catch (const singular_design_error&) {
        draws_rb.row(slot).setConstant(std::nan(""));
        draws_ca.row(slot).setConstant(std::nan(""));
      }
      ++slot;
    });
  } else {
    const int threads = std::min<std::int64_t>(cfg.threads, r_total);
    auto worker = [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t r = lo; r < hi; ++r) {
        const Assignment a =
            draw_assignment(n, cfg.counts, derive_seed(cfg.master_seed, r));
        try {
          evaluate(a, r);
        } catch (const singular_design_error&) {
          draws_rb.row(r).setConstant(std::nan(""));
          draws_ca.row(r).setConstant(std::nan(""));
        }
      }
    };
    if (threads <= 1) {
      worker(0, r_total);
    } else {
      std::vector<std::thread> pool;
      const std::int64_t block = (r_total + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = t * block;
        const std::int64_t hi = std::min<std::int64_t>(lo + block, r_total);
        if (lo < hi) pool.emplace_back(worker, lo, hi);
      }
      for (auto& th : pool) th.join();
    }
  }

  for (std::int64_t r = 0; r < r_total; ++r) {
    if (std::isnan(draws_rb(r, 0))) ++failures;
  }
  result.singular_failures = failures;

  const bool population_variance = exhaustive.has_value();
  for (int l : effects) {
    for (const Method method : {Method::unadjusted, Method::covariate_adjusted}) {
      const Eigen::MatrixXd& draws =
          method == Method::unadjusted ? draws_rb : draws_ca;
      const double sigma2 = method == Method::unadjusted ? theory.var_rb(l - 1)
                                                         : theory.var_ca(l - 1);

      MomentAccumulator acc;
      std::vector<double> standardized;
      standardized.reserve(r_total);
      const double sd_theory = std::sqrt(sigma2 / n);
      for (std::int64_t r = 0; r < r_total; ++r) {
        const double v = draws(r, l - 1);
        if (std::isnan(v)) continue;
        acc.add(v);
        standardized.push_back(sd_theory > 0.0 ? (v - tau(l - 1)) / sd_theory : 0.0);
      }

      EffectMethodStats st;
      st.label = m.effect_labels[l - 1];
      st.effect = l;
      st.method = method;
      st.replicates = acc.count();
      st.mean = acc.mean();
      st.bias = acc.mean() - tau(l - 1);
      st.n_var = n * (population_variance ? acc.variance_population()
                                          : acc.variance_sample());
      st.sigma2_theory = sigma2;
      st.var_ratio = st.n_var / sigma2;
      st.skewness = acc.skewness();
      st.excess_kurtosis = acc.excess_kurtosis();
      st.ks_stat = ks_statistic(standardized);
      st.ks_critical = ks_critical(cfg.ks_alpha, acc.count());
      result.stats.push_back(std::move(st));
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  result.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

}  // namespace fci
