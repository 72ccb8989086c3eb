#include "fci/population.hpp"

#include <stdexcept>
#include <string>

#include "fci/spd.hpp"

namespace fci {

void validate(const Population& pop) {
  const Eigen::Index n = pop.n();
  const Eigen::Index j = pop.arms();
  if (j < 1) throw std::invalid_argument("population: no outcome columns");
  if (n < 2 * j) {
    throw std::invalid_argument("population: need N >= 2J, got N = " +
                                std::to_string(n) + ", J = " + std::to_string(j));
  }
  if (pop.x.size() > 0 && pop.x.rows() != n) {
    throw std::invalid_argument("population: covariate rows do not match N");
  }
  if (!pop.y.allFinite() || !pop.x.allFinite()) {
    throw std::invalid_argument("population: non-finite entry");
  }
}

Population center(const Population& pop) {
  Population out = pop;
  out.y.rowwise() -= pop.y.colwise().mean();
  if (pop.covariates() > 0) out.x.rowwise() -= pop.x.colwise().mean();
  return out;
}

MomentSummary moments(const Population& pop) {
  validate(pop);
  const double n = static_cast<double>(pop.n());
  const Eigen::Index p = pop.covariates();

  MomentSummary ms;
  ms.ybar = pop.y.colwise().mean();
  const Eigen::MatrixXd yc = pop.y.rowwise() - ms.ybar.transpose();
  ms.sigma = (yc.transpose() * yc) / n;
  ms.sigma = ((ms.sigma + ms.sigma.transpose()) / 2.0).eval();

  if (p == 0) {
    ms.xbar.resize(0);
    ms.omega.resize(0, 0);
    ms.lambda.resize(0, pop.arms());
    ms.zeta.resize(0, pop.arms());
    ms.sigma_tilde = ms.sigma;
    return ms;
  }

  ms.xbar = pop.x.colwise().mean();
  const Eigen::MatrixXd xc = pop.x.rowwise() - ms.xbar.transpose();
  ms.omega = (xc.transpose() * xc) / n;
  ms.omega = ((ms.omega + ms.omega.transpose()) / 2.0).eval();
  ms.lambda = (xc.transpose() * yc) / n;

  SpdSolver omega_solver(ms.omega);
  ms.omega_condition = omega_solver.condition_estimate();
  ms.zeta = omega_solver.solve(ms.lambda);

  ms.sigma_tilde = ms.sigma - ms.lambda.transpose() * ms.zeta;
  ms.sigma_tilde = ((ms.sigma_tilde + ms.sigma_tilde.transpose()) / 2.0).eval();
  return ms;
}

Eigen::MatrixXd residuals(const Population& pop, const MomentSummary& ms) {
  if (ms.ybar.size() != pop.arms() || ms.zeta.rows() != pop.covariates()) {
    throw std::invalid_argument("residuals: moment summary does not match population");
  }
  Eigen::MatrixXd r = pop.y.rowwise() - ms.ybar.transpose();
  if (pop.covariates() > 0) {
    const Eigen::MatrixXd xc = pop.x.rowwise() - ms.xbar.transpose();
    r -= xc * ms.zeta;
  }
  return r;
}

}  // namespace fci
