#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "fci/asymptotics.hpp"
#include "fci/estimation.hpp"
#include "fci/randomization.hpp"
#include "fci/rng.hpp"

using namespace fci;

namespace {

Eigen::VectorXi counts_of(std::initializer_list<int> values) {
  Eigen::VectorXi c(static_cast<int>(values.size()));
  int i = 0;
  for (int v : values) c(i++) = v;
  return c;
}

Population random_population(int n, int k, int p, std::uint64_t seed) {
  fci::Rng rng(seed);
  Population pop;
  pop.y.resize(n, 1 << k);
  pop.x.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < pop.y.cols(); ++c) pop.y(i, c) = rng.normal();
    for (int c = 0; c < p; ++c) pop.x(i, c) = rng.normal();
  }
  // couple outcomes to covariates so adjustment has something to remove
  if (p > 0) {
    for (int c = 0; c < pop.y.cols(); ++c) {
      pop.y.col(c) += (0.3 + 0.2 * c) * pop.x.col(c % p);
    }
  }
  return pop;
}

}  // namespace

TEST_CASE("exact variance of observed means on a hand-checked column") {
  Population pop;
  pop.y.resize(4, 2);
  pop.y.col(0) << 1, -1, 1, -1;
  pop.y.col(1).setZero();
  pop.x.resize(4, 0);
  const auto [mean, cov] = exact_obs_moments(pop, counts_of({2, 2}));
  CHECK(mean(0) == doctest::Approx(0.0));
  CHECK(cov(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  // a constant (centered to zero) column has zero variance
  CHECK(cov(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("exact moment formulas match the enumeration oracle") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Population pop = random_population(8, 2, 0, seed);
    const auto counts = counts_of({2, 2, 2, 2});
    const auto [mean, cov] = exact_obs_moments(pop, counts);

    Eigen::VectorXd emp_mean = Eigen::VectorXd::Zero(4);
    Eigen::MatrixXd emp_second = Eigen::MatrixXd::Zero(4, 4);
    std::int64_t total = 0;
    for_each_assignment(8, counts, [&](const Assignment& a) {
      const Eigen::VectorXd ybar = observed_summary(pop, a).ybar_obs;
      emp_mean += ybar;
      emp_second += ybar * ybar.transpose();
      ++total;
    });
    emp_mean /= static_cast<double>(total);
    const Eigen::MatrixXd emp_cov =
        emp_second / static_cast<double>(total) - emp_mean * emp_mean.transpose();

    CHECK((emp_mean - mean).lpNorm<Eigen::Infinity>() < 1e-12);
    const double scale = cov.cwiseAbs().maxCoeff();
    CHECK((emp_cov - cov).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("asymptotic covariance pattern for J = 2") {
  MomentSummary ms;
  ms.sigma.resize(2, 2);
  const double rho = 0.37;
  ms.sigma << 1.0, rho, rho, 1.0;
  ms.sigma_tilde = ms.sigma;
  ms.lambda.resize(0, 2);
  ms.zeta.resize(0, 2);
  const Eigen::VectorXd p = Eigen::Vector2d(0.5, 0.5);
  const AsymptoticCovariance cov = asym_cov(ms, p);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, -rho, -rho, 1.0;
  CHECK(cov.obs.isApprox(expected, 1e-14));
  CHECK(cov.ca == cov.obs);  // sigma_tilde = sigma here
}

TEST_CASE("zero residual moments zero out the adjusted covariance") {
  MomentSummary ms;
  ms.sigma = Eigen::Matrix2d::Identity();
  ms.sigma_tilde = Eigen::Matrix2d::Zero();
  ms.lambda.resize(1, 2);
  ms.zeta.resize(1, 2);
  const AsymptoticCovariance cov = asym_cov(ms, Eigen::Vector2d(0.5, 0.5));
  CHECK(cov.ca.isZero(0));
}

TEST_CASE("effect variance for K = 1 reduces to the two-arm formula") {
  Population pop = random_population(64, 1, 0, 5);
  const MomentSummary ms = moments(pop);
  const ModelMatrix m = build_model_matrix(1);
  const Eigen::VectorXd p = Eigen::Vector2d(0.5, 0.5);
  const VarianceReport report = asym_var_effects(ms, p, m);
  const double expected = ms.sigma(0, 0) + ms.sigma(1, 1) + 2.0 * ms.sigma(0, 1);
  CHECK(report.var_rb(0) == doctest::Approx(expected).epsilon(1e-12));
  // no covariates: the adjusted variance and gain collapse
  CHECK(report.var_ca(0) == doctest::Approx(report.var_rb(0)));
  CHECK(report.gain(0) == doctest::Approx(0.0));
  CHECK(report.gain_corollary(0) == doctest::Approx(0.0));
}

TEST_CASE("variance formulas agree with the quadratic form h' Sigma h") {
  for (int k : {1, 2, 3}) {
    const Population pop = random_population(16 << k, k, 2, 100 + k);
    const MomentSummary ms = moments(pop);
    const ModelMatrix m = build_model_matrix(k);
    const Eigen::VectorXd p =
        Eigen::VectorXd::Constant(m.j, 1.0 / static_cast<double>(m.j));
    const VarianceReport report = asym_var_effects(ms, p, m);
    const AsymptoticCovariance cov = asym_cov(ms, p);
    const double scale = std::pow(2.0, -2.0 * (k - 1));
    for (int l = 1; l < m.j; ++l) {
      const Eigen::VectorXd h = m.h.col(l).cast<double>();
      CHECK(report.var_rb(l - 1) ==
            doctest::Approx(scale * h.dot(cov.obs * h)).epsilon(1e-12));
      CHECK(report.var_ca(l - 1) ==
            doctest::Approx(scale * h.dot(cov.ca * h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("uninformative covariates equalize the variances; perfect fit zeroes var_ca") {
  MomentSummary ms;
  ms.sigma.resize(2, 2);
  ms.sigma << 2.0, 0.4, 0.4, 1.5;
  ms.omega = Eigen::MatrixXd::Identity(1, 1);
  ms.lambda = Eigen::MatrixXd::Zero(1, 2);
  ms.zeta = Eigen::MatrixXd::Zero(1, 2);
  ms.sigma_tilde = ms.sigma;  // lambda = 0
  const ModelMatrix m = build_model_matrix(1);
  const Eigen::VectorXd p = Eigen::Vector2d(0.5, 0.5);

  const VarianceReport uninformative = asym_var_effects(ms, p, m);
  CHECK(uninformative.var_ca(0) == uninformative.var_rb(0));
  CHECK(uninformative.gain(0) == 0.0);

  ms.sigma_tilde.setZero();  // outcomes exactly linear in the covariates
  const VarianceReport perfect = asym_var_effects(ms, p, m);
  CHECK(perfect.var_ca(0) == 0.0);
}

TEST_CASE("gain via the xi decomposition equals var_rb - var_ca") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int k = 1 + static_cast<int>(seed % 3);
    const int p = 1 + static_cast<int>(seed % 5);
    const Population pop = random_population(64 << (k - 1), k, p, 500 + seed);
    const MomentSummary ms = moments(pop);
    const ModelMatrix m = build_model_matrix(k);
    const Eigen::VectorXd props =
        Eigen::VectorXd::Constant(m.j, 1.0 / static_cast<double>(m.j));
    const VarianceReport report = asym_var_effects(ms, props, m);
    for (int l = 1; l < m.j; ++l) {
      const double direct = report.var_rb(l - 1) - report.var_ca(l - 1);
      CHECK(std::abs(direct - report.gain_corollary(l - 1)) <=
            1e-10 * std::max(1.0, std::abs(direct)));
      CHECK(report.gain(l - 1) >= -1e-10);
    }
  }
}

TEST_CASE("precision gain returns both scales and the xi tensors") {
  const Population pop = random_population(64, 1, 2, 9);
  const MomentSummary ms = moments(pop);
  const ModelMatrix m = build_model_matrix(1);
  const Eigen::VectorXd p = Eigen::Vector2d(0.5, 0.5);
  const PrecisionGain g = precision_gain(ms, p, m, 64);
  CHECK(g.gain_variance(0) == doctest::Approx(g.gain_sigma2(0) / 64.0));
  REQUIRE(g.xi_quad.size() == 1);
  CHECK(g.xi_quad[0].rows() == 2);
  // diagonal xi_jj vanishes when p_j are equal: xi_jj = h_jl (zeta_j - zeta_j)
  CHECK(g.xi_quad[0](0, 0) == doctest::Approx(0.0));
  CHECK(g.xi_quad[0](1, 1) == doctest::Approx(0.0));
}

TEST_CASE("precision gain requires covariates") {
  const Population pop = random_population(32, 1, 0, 2);
  const MomentSummary ms = moments(pop);
  const ModelMatrix m = build_model_matrix(1);
  CHECK_THROWS_AS(precision_gain(ms, Eigen::Vector2d(0.5, 0.5), m, 32),
                  std::invalid_argument);
}

TEST_CASE("equal precision: mirrored slopes on a balanced 2^1 design") {
  // zeta_2 = -zeta_1 with equal proportions satisfies the pairwise condition
  MomentSummary ms;
  ms.sigma = Eigen::Matrix2d::Identity();
  ms.sigma_tilde = ms.sigma;
  ms.omega = Eigen::MatrixXd::Identity(1, 1);
  ms.lambda.resize(1, 2);
  ms.zeta.resize(1, 2);
  ms.zeta << 0.8, -0.8;
  ms.lambda = ms.zeta;
  const ModelMatrix m = build_model_matrix(1);
  const Eigen::VectorXd p = Eigen::Vector2d(0.5, 0.5);

  CHECK(equal_precision(ms, p, m, 1, 1e-8));
  const PrecisionGain g = precision_gain(ms, p, m, 100);
  CHECK(g.gain_sigma2(0) == doctest::Approx(0.0));

  // all-zero slopes trivially equal-precision
  ms.zeta.setZero();
  CHECK(equal_precision(ms, p, m, 1, 1e-8));

  // generic slopes are not
  ms.zeta << 0.8, 0.3;
  CHECK_FALSE(equal_precision(ms, p, m, 1, 1e-8));
  CHECK(precision_gain(ms, p, m, 100).gain_sigma2(0) > 0.0);
}

TEST_CASE("equal-precision flags in the report match the gain") {
  const Population pop = random_population(64, 2, 2, 31);
  const MomentSummary ms = moments(pop);
  const ModelMatrix m = build_model_matrix(2);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.25);
  const VarianceReport report = asym_var_effects(ms, p, m);
  for (int l = 1; l < m.j; ++l) {
    if (report.equal_precision[l - 1]) {
      CHECK(std::abs(report.gain(l - 1)) <= 16.0 * 1e-8 * ms.omega.norm());
    } else {
      CHECK(report.gain(l - 1) > 0.0);
    }
  }
}

TEST_CASE("nonnegative gain over many random moment structures") {
  fci::Rng rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(2));
    const int p = 1 + static_cast<int>(rng.below(3));
    const int j = 1 << k;
    const int n = 16 * j;
    const Population pop = random_population(n, k, p, rng.next());
    const MomentSummary ms = moments(pop);
    const ModelMatrix m = build_model_matrix(k);
    // random positive proportions summing to one
    Eigen::VectorXd props(j);
    for (int a = 0; a < j; ++a) props(a) = 0.2 + rng.uniform01();
    props /= props.sum();
    const VarianceReport report = asym_var_effects(ms, props, m);
    for (int l = 1; l < j; ++l) {
      CHECK(report.gain(l - 1) >= -1e-10);
      CHECK(std::abs(report.gain(l - 1) - report.gain_corollary(l - 1)) <=
            1e-10 * std::max(1.0, report.gain(l - 1)));
    }
  }
}

TEST_CASE("input validation") {
  const Population pop = random_population(16, 1, 1, 4);
  const MomentSummary ms = moments(pop);
  const ModelMatrix m = build_model_matrix(1);
  CHECK_THROWS_AS(asym_var_effects(ms, Eigen::Vector2d(0.7, 0.7), m),
                  std::invalid_argument);
  CHECK_THROWS_AS(asym_var_effects(ms, Eigen::Vector2d(1.5, -0.5), m),
                  std::invalid_argument);
  Population tiny;
  tiny.y.resize(1, 1);
  tiny.y.setZero();
  tiny.x.resize(1, 0);
  CHECK_THROWS_AS(exact_obs_moments(tiny, counts_of({2})), std::invalid_argument);
  CHECK_THROWS_AS(equal_precision(ms, Eigen::Vector2d(0.5, 0.5), m, 5, 1e-8),
                  std::invalid_argument);
}
