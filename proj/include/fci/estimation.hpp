#ifndef FCI_ESTIMATION_HPP
#define FCI_ESTIMATION_HPP

#include <Eigen/Core>

#include "fci/design.hpp"
#include "fci/population.hpp"
#include "fci/randomization.hpp"

namespace fci {

// What an experimenter actually sees: one outcome per unit plus the
// pre-treatment covariates of every unit.  All estimators are computed from
// this shape, so they cannot touch counterfactual cells by construction.
struct ObservedData {
  Eigen::VectorXi arm;  // length N, 1-based
  Eigen::VectorXd y;    // length N, the observed outcome of each unit
  Eigen::MatrixXd x;    // N x p
  int arms = 0;         // J

  Eigen::Index n() const { return y.size(); }
  Eigen::Index covariates() const { return x.cols(); }
};

// Projects a potential-outcome table onto the assigned cells.
ObservedData observe(const Population& pop, const Assignment& a);

struct ObservedSummary {
  Eigen::VectorXd ybar_obs;  // length J, per-arm outcome means
  Eigen::MatrixXd xbar_obs;  // p x J, per-arm covariate means
  Eigen::VectorXi counts;    // length J
};

ObservedSummary observed_summary(const ObservedData& od);
ObservedSummary observed_summary(const Population& pop, const Assignment& a);

enum class Method { unadjusted, covariate_adjusted };

// Factorial-effect estimates tau(l) = 2^{-(K-1)} h_l' ybar_used, l = 1..J-1.
struct EffectEstimates {
  Eigen::VectorXd tau;        // length J-1, entry l-1 is effect l
  Method method = Method::unadjusted;
  Eigen::MatrixXd beta_hat;   // p x J slopes, empty unless covariate_adjusted
  Eigen::VectorXd ybar_used;  // length J
};

// The effect contrast applied to a vector of arm means.
Eigen::VectorXd effect_contrasts(const ModelMatrix& m, const Eigen::VectorXd& arm_means);

// Unadjusted randomization-based estimator.
EffectEstimates tau_rb(const ModelMatrix& m, const ObservedSummary& s);

// Plug-in slope of arm j: the full-population centered covariate Gram
// (divisor N) applied to the arm-j cross moment (divisor n_j).  Returns the
// slopes as a p x J matrix.  Requires p >= 1.
Eigen::MatrixXd beta_hat(const ObservedData& od, const ObservedSummary& s);
Eigen::MatrixXd beta_hat(const Population& pop, const Assignment& a,
                         const ObservedSummary& s);

// ybar_ca(z_j) = ybar_obs(z_j) + (xbar - xbar_obs(z_j))' b_j.  With p = 0 the
// observed means are returned unchanged.
Eigen::VectorXd adjusted_means(const ObservedData& od, const ObservedSummary& s,
                               const Eigen::MatrixXd& slopes);
Eigen::VectorXd adjusted_means(const Population& pop, const Assignment& a,
                               const ObservedSummary& s, const Eigen::MatrixXd& slopes);

// Covariate-adjusted estimator from already-adjusted arm means.
EffectEstimates tau_ca(const ModelMatrix& m, const Eigen::VectorXd& ca_means);
EffectEstimates tau_ca(const ModelMatrix& m, const Eigen::VectorXd& ca_means,
                       const Eigen::MatrixXd& slopes);

// Population-level factorial effects from the full arm means.
Eigen::VectorXd true_tau(const ModelMatrix& m, const Population& pop);

}  // namespace fci

#endif
