#include "fci/estimation.hpp"

#include <stdexcept>
#include <string>

#include "fci/spd.hpp"

namespace fci {

namespace {

void check_arm_vector(const Eigen::VectorXi& arm, int arms) {
  for (int i = 0; i < arm.size(); ++i) {
    if (arm(i) < 1 || arm(i) > arms) {
      throw std::invalid_argument("arm index " + std::to_string(arm(i)) +
                                  " of unit " + std::to_string(i + 1) +
                                  " outside 1.." + std::to_string(arms));
    }
  }
}

}  // namespace

ObservedData observe(const Population& pop, const Assignment& a) {
  if (a.arm.size() != pop.n()) {
    throw std::invalid_argument("observe: assignment length != N");
  }
  if (a.counts.size() != pop.arms()) {
    throw std::invalid_argument("observe: assignment arms != population arms");
  }
  ObservedData od;
  od.arms = static_cast<int>(pop.arms());
  od.arm = a.arm;
  check_arm_vector(od.arm, od.arms);
  od.x = pop.x;
  od.y.resize(pop.n());
  for (Eigen::Index i = 0; i < pop.n(); ++i) {
    od.y(i) = pop.y(i, a.arm(i) - 1);
  }
  return od;
}

ObservedSummary observed_summary(const ObservedData& od) {
  const int j = od.arms;
  const Eigen::Index p = od.covariates();
  check_arm_vector(od.arm, j);

  ObservedSummary s;
  s.counts = Eigen::VectorXi::Zero(j);
  s.ybar_obs = Eigen::VectorXd::Zero(j);
  s.xbar_obs = Eigen::MatrixXd::Zero(p, j);
  for (Eigen::Index i = 0; i < od.n(); ++i) {
    const int a = od.arm(i) - 1;
    s.counts(a) += 1;
    s.ybar_obs(a) += od.y(i);
    if (p > 0) s.xbar_obs.col(a) += od.x.row(i).transpose();
  }
  for (int a = 0; a < j; ++a) {
    if (s.counts(a) == 0) {
      throw std::invalid_argument("arm " + std::to_string(a + 1) + " is empty");
    }
    s.ybar_obs(a) /= s.counts(a);
    if (p > 0) s.xbar_obs.col(a) /= s.counts(a);
  }
  return s;
}

ObservedSummary observed_summary(const Population& pop, const Assignment& a) {
  return observed_summary(observe(pop, a));
}

Eigen::VectorXd effect_contrasts(const ModelMatrix& m, const Eigen::VectorXd& arm_means) {
  if (arm_means.size() != m.j) {
    throw std::invalid_argument("effect_contrasts: arm means length != J");
  }
  const double scale = 1.0 / static_cast<double>(1 << (m.k - 1));
  return scale *
         (m.h.rightCols(m.j - 1).cast<double>().transpose() * arm_means);
}

EffectEstimates tau_rb(const ModelMatrix& m, const ObservedSummary& s) {
  EffectEstimates est;
  est.method = Method::unadjusted;
  est.ybar_used = s.ybar_obs;
  est.tau = effect_contrasts(m, s.ybar_obs);
  return est;
}

Eigen::MatrixXd beta_hat(const ObservedData& od, const ObservedSummary& s) {
  const Eigen::Index p = od.covariates();
  const int j = od.arms;
  if (p < 1) throw std::invalid_argument("beta_hat: no covariates");
  if (s.ybar_obs.size() != j || s.xbar_obs.cols() != j) {
    throw std::invalid_argument("beta_hat: summary does not match data");
  }

  const Eigen::RowVectorXd xbar = od.x.colwise().mean();
  const Eigen::MatrixXd xc = od.x.rowwise() - xbar;
  const Eigen::MatrixXd gram =
      (xc.transpose() * xc) / static_cast<double>(od.n());

  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(p, j);
  for (Eigen::Index i = 0; i < od.n(); ++i) {
    const int a = od.arm(i) - 1;
    cross.col(a) += xc.row(i).transpose() * (od.y(i) - s.ybar_obs(a));
  }
  for (int a = 0; a < j; ++a) cross.col(a) /= s.counts(a);

  return SpdSolver((gram + gram.transpose()) / 2.0).solve(cross);
}

Eigen::MatrixXd beta_hat(const Population& pop, const Assignment& a,
                         const ObservedSummary& s) {
  return beta_hat(observe(pop, a), s);
}

Eigen::VectorXd adjusted_means(const ObservedData& od, const ObservedSummary& s,
                               const Eigen::MatrixXd& slopes) {
  if (od.covariates() == 0) return s.ybar_obs;
  if (slopes.rows() != od.covariates() || slopes.cols() != od.arms) {
    throw std::invalid_argument("adjusted_means: slope dimensions mismatch");
  }
  const Eigen::VectorXd xbar = od.x.colwise().mean();
  Eigen::VectorXd out = s.ybar_obs;
  for (int a = 0; a < od.arms; ++a) {
    out(a) += (xbar - s.xbar_obs.col(a)).dot(slopes.col(a));
  }
  return out;
}

Eigen::VectorXd adjusted_means(const Population& pop, const Assignment& a,
                               const ObservedSummary& s, const Eigen::MatrixXd& slopes) {
  return adjusted_means(observe(pop, a), s, slopes);
}

EffectEstimates tau_ca(const ModelMatrix& m, const Eigen::VectorXd& ca_means) {
  EffectEstimates est;
  est.method = Method::covariate_adjusted;
  est.ybar_used = ca_means;
  est.tau = effect_contrasts(m, ca_means);
  return est;
}

EffectEstimates tau_ca(const ModelMatrix& m, const Eigen::VectorXd& ca_means,
                       const Eigen::MatrixXd& slopes) {
  EffectEstimates est = tau_ca(m, ca_means);
  est.beta_hat = slopes;
  return est;
}

Eigen::VectorXd true_tau(const ModelMatrix& m, const Population& pop) {
  if (pop.arms() != m.j) {
    throw std::invalid_argument("true_tau: population arms != J");
  }
  return effect_contrasts(m, pop.y.colwise().mean());
}

}  // namespace fci
