#include "fci/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fci/randomization.hpp"

namespace fci {

namespace {

void check_proportions(const Eigen::VectorXd& p, Eigen::Index arms) {
  if (p.size() != arms) {
    throw std::invalid_argument("proportions: expected " + std::to_string(arms) +
                                " entries, got " + std::to_string(p.size()));
  }
  if ((p.array() <= 0.0).any()) {
    throw std::invalid_argument("proportions: all p_j must be positive");
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("proportions: sum to " + std::to_string(p.sum()) +
                                ", expected 1");
  }
}

Eigen::MatrixXd mixing_pattern(const Eigen::MatrixXd& second_moments,
                               const Eigen::VectorXd& p) {
  Eigen::MatrixXd out = -second_moments;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    out(j, j) = (1.0 - p(j)) / p(j) * second_moments(j, j);
  }
  return out;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::MatrixXd> exact_obs_moments(
    const Population& pop, const Eigen::VectorXi& counts) {
  const Eigen::Index n = pop.n();
  if (n < 2) throw std::invalid_argument("exact_obs_moments: need N >= 2");
  validate_counts(static_cast<int>(n), counts);
  if (counts.size() != pop.arms()) {
    throw std::invalid_argument("exact_obs_moments: counts length != arms");
  }

  const Eigen::VectorXd ybar = pop.y.colwise().mean();
  const Eigen::MatrixXd yc = pop.y.rowwise() - ybar.transpose();
  const Eigen::MatrixXd s = yc.transpose() * yc;  // centered sums, no divisor

  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  Eigen::MatrixXd cov = -s / denom;
  for (Eigen::Index j = 0; j < counts.size(); ++j) {
    const double phat = counts(j) / static_cast<double>(n);
    cov(j, j) = (1.0 - phat) / phat * s(j, j) / denom;
  }
  return {ybar, cov};
}

AsymptoticCovariance asym_cov(const MomentSummary& ms, const Eigen::VectorXd& p) {
  check_proportions(p, ms.sigma.rows());
  AsymptoticCovariance out;
  out.obs = mixing_pattern(ms.sigma, p);
  out.ca = mixing_pattern(ms.sigma_tilde, p);
  return out;
}

namespace {

// sigma^2(l) = 2^{-2(K-1)} ( sum_j (1-p_j)/p_j m_jj - sum_{j != j'} h_jl h_j'l m_jj' )
double effect_variance(const Eigen::MatrixXd& second_moments, const Eigen::VectorXd& p,
                       const ModelMatrix& m, int l) {
  const int j = m.j;
  double acc = 0.0;
  for (int a = 0; a < j; ++a) {
    acc += (1.0 - p(a)) / p(a) * second_moments(a, a);
  }
  for (int a = 0; a < j; ++a) {
    for (int b = 0; b < j; ++b) {
      if (a == b) continue;
      acc -= m.h(a, l) * m.h(b, l) * second_moments(a, b);
    }
  }
  const double scale = std::pow(2.0, -2.0 * (m.k - 1));
  return scale * acc;
}

}  // namespace

Eigen::VectorXd xi_vector(const MomentSummary& ms, const Eigen::VectorXd& p,
                          const ModelMatrix& m, int l, int j, int jp) {
  const double hj = m.h(j, l);
  const double hjp = m.h(jp, l);
  return std::sqrt(p(jp) / p(j)) * hj * ms.zeta.col(j) -
         std::sqrt(p(j) / p(jp)) * hjp * ms.zeta.col(jp);
}

PrecisionGain precision_gain(const MomentSummary& ms, const Eigen::VectorXd& p,
                             const ModelMatrix& m, std::int64_t n) {
  if (ms.zeta.rows() == 0) {
    throw std::invalid_argument("precision_gain: population has no covariates");
  }
  check_proportions(p, m.j);

  PrecisionGain out;
  out.gain_sigma2.resize(m.j - 1);
  out.gain_variance.resize(m.j - 1);
  out.xi_quad.resize(m.j - 1);
  const double scale = std::pow(2.0, -(2.0 * m.k - 1.0));
  for (int l = 1; l < m.j; ++l) {
    Eigen::MatrixXd quad(m.j, m.j);
    for (int a = 0; a < m.j; ++a) {
      for (int b = 0; b < m.j; ++b) {
        const Eigen::VectorXd xi = xi_vector(ms, p, m, l, a, b);
        quad(a, b) = xi.dot(ms.omega * xi);
      }
    }
    out.xi_quad[l - 1] = quad;
    out.gain_sigma2(l - 1) = scale * quad.sum();
    out.gain_variance(l - 1) = out.gain_sigma2(l - 1) / static_cast<double>(n);
  }
  return out;
}

bool equal_precision(const MomentSummary& ms, const Eigen::VectorXd& p,
                     const ModelMatrix& m, int l, double tol) {
  if (l < 1 || l >= m.j) {
    throw std::invalid_argument("equal_precision: effect index outside 1..J-1");
  }
  check_proportions(p, m.j);
  if (ms.zeta.rows() == 0) return true;  // nothing to adjust with
  for (int a = 0; a < m.j; ++a) {
    for (int b = 0; b < m.j; ++b) {
      const Eigen::VectorXd diff =
          p(b) * m.h(a, l) * ms.zeta.col(a) - p(a) * m.h(b, l) * ms.zeta.col(b);
      if (diff.lpNorm<Eigen::Infinity>() > tol) return false;
    }
  }
  return true;
}

VarianceReport asym_var_effects(const MomentSummary& ms, const Eigen::VectorXd& p,
                                const ModelMatrix& m, double eq_tol) {
  if (ms.sigma.rows() != m.j) {
    throw std::invalid_argument("asym_var_effects: moments do not match design");
  }
  check_proportions(p, m.j);

  VarianceReport report;
  report.p = p;
  report.tolerance = eq_tol;
  report.var_rb.resize(m.j - 1);
  report.var_ca.resize(m.j - 1);
  report.gain.resize(m.j - 1);
  report.gain_corollary.resize(m.j - 1);
  report.equal_precision.resize(m.j - 1);

  const bool has_covariates = ms.zeta.rows() > 0;
  for (int l = 1; l < m.j; ++l) {
    report.var_rb(l - 1) = effect_variance(ms.sigma, p, m, l);
    report.var_ca(l - 1) = effect_variance(ms.sigma_tilde, p, m, l);
    report.gain(l - 1) = report.var_rb(l - 1) - report.var_ca(l - 1);
    report.equal_precision[l - 1] = equal_precision(ms, p, m, l, eq_tol);
  }
  if (has_covariates) {
    report.gain_corollary = precision_gain(ms, p, m, 1).gain_sigma2;
  } else {
    report.gain_corollary.setZero();
  }
  return report;
}

}  // namespace fci
