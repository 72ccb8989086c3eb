#ifndef FCI_ASYMPTOTICS_HPP
#define FCI_ASYMPTOTICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "fci/design.hpp"
#include "fci/population.hpp"

namespace fci {

// Limit covariances of sqrt(N) * arm means under complete randomization:
// diagonal (1-p_j)/p_j * sigma_jj, off-diagonal -sigma_jj' (and the
// residual-moment analogue for the adjusted means).
struct AsymptoticCovariance {
  Eigen::MatrixXd obs;  // J x J
  Eigen::MatrixXd ca;   // J x J
};

// Exact finite-N mean and covariance of the observed arm means over the
// randomization distribution:
//   Var  { ybar_obs(z_j) }  = (1-n_j/N)/(n_j/N) * S_jj / (N(N-1))
//   Cov  { ybar_obs(z_j), ybar_obs(z_j') } = -S_jj' / (N(N-1)),
// with S the centered outer-product sums.  The mean is the population mean.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> exact_obs_moments(
    const Population& pop, const Eigen::VectorXi& counts);

AsymptoticCovariance asym_cov(const MomentSummary& ms, const Eigen::VectorXd& p);

// Per-effect asymptotic variances and the adjustment gain.
struct VarianceReport {
  Eigen::VectorXd var_rb;          // sigma^2_rb(l), variance of sqrt(N) tau_rb
  Eigen::VectorXd var_ca;          // sigma^2_ca(l)
  Eigen::VectorXd gain;            // var_rb - var_ca
  Eigen::VectorXd gain_corollary;  // same quantity via the xi decomposition
  std::vector<bool> equal_precision;
  Eigen::VectorXd p;               // arm proportions used
  double tolerance = 1e-8;         // equal-precision tolerance
};

// Evaluates the variance formulas for every effect l = 1..J-1, plugging the
// finite-N moments into the limit expressions.
VarianceReport asym_var_effects(const MomentSummary& ms, const Eigen::VectorXd& p,
                                const ModelMatrix& m, double eq_tol = 1e-8);

// xi_jj' = sqrt(p_j'/p_j) h_jl zeta_j - sqrt(p_j/p_j') h_j'l zeta_j' for
// effect l; zero-based arm indices j, jp.
Eigen::VectorXd xi_vector(const MomentSummary& ms, const Eigen::VectorXd& p,
                          const ModelMatrix& m, int l, int j, int jp);

// The precision gained by adjustment, decomposed into quadratic forms
// xi' Omega xi.  gain_sigma2 is on the sigma^2 scale (variance of
// sqrt(N) tau_hat); gain_variance divides by N.
struct PrecisionGain {
  Eigen::VectorXd gain_sigma2;           // length J-1
  Eigen::VectorXd gain_variance;         // length J-1
  std::vector<Eigen::MatrixXd> xi_quad;  // per effect, J x J of xi' Omega xi
};

PrecisionGain precision_gain(const MomentSummary& ms, const Eigen::VectorXd& p,
                             const ModelMatrix& m, std::int64_t n);

// True iff max-norm of p_j' h_jl zeta_j - p_j h_j'l zeta_j' is within tol for
// every arm pair, the condition for adjustment to leave effect l's precision
// unchanged.  l is 1-based (1..J-1).
bool equal_precision(const MomentSummary& ms, const Eigen::VectorXd& p,
                     const ModelMatrix& m, int l, double tol = 1e-8);

}  // namespace fci

#endif
