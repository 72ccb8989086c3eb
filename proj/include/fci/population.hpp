#ifndef FCI_POPULATION_HPP
#define FCI_POPULATION_HPP

#include <Eigen/Core>

namespace fci {

// A finite population: the full potential-outcome table plus covariates.
// Row i of `y` holds the J potential outcomes of unit i; row i of `x` its
// p pre-treatment covariates (p may be 0).
struct Population {
  Eigen::MatrixXd y;  // N x J
  Eigen::MatrixXd x;  // N x p

  Eigen::Index n() const { return y.rows(); }
  Eigen::Index arms() const { return y.cols(); }
  Eigen::Index covariates() const { return x.cols(); }
};

// Checks N >= 2J, matching row counts and finiteness of all entries.
// Throws std::invalid_argument on violation.
void validate(const Population& pop);

// Subtracts column means from outcomes and covariates.
Population center(const Population& pop);

// Finite-population second moments on centered data, divisor N throughout.
//   sigma       (1/N) sum_i yc_i yc_i'
//   omega       (1/N) sum_i xc_i xc_i'
//   lambda      (1/N) sum_i xc_i yc_i(z_j), column j per arm
//   zeta        omega^{-1} lambda, the population least-squares slopes
//   sigma_tilde sigma - lambda' omega^{-1} lambda, residual moments
struct MomentSummary {
  Eigen::MatrixXd sigma;        // J x J
  Eigen::MatrixXd omega;        // p x p
  Eigen::MatrixXd lambda;       // p x J
  Eigen::MatrixXd zeta;         // p x J
  Eigen::MatrixXd sigma_tilde;  // J x J
  Eigen::VectorXd ybar;         // J, means of the input (uncentered) outcomes
  Eigen::VectorXd xbar;         // p
  double omega_condition = 1.0; // pivot-ratio estimate, 1 when p = 0
};

// Computes all moment quantities.  Input need not be centered; centering is
// applied internally.  Throws singular_design_error when the covariate Gram
// matrix has a pivot below tolerance.
MomentSummary moments(const Population& pop);

// Residual table R(i, j) = yc_i(z_j) - xc_i' zeta_j on centered data.
// Every column has mean zero and is orthogonal to every covariate column.
Eigen::MatrixXd residuals(const Population& pop, const MomentSummary& ms);

// Condition-ratio threshold above which callers should surface a warning.
inline constexpr double kConditionWarnThreshold = 1e8;

}  // namespace fci

#endif
