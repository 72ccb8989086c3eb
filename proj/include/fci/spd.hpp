#ifndef FCI_SPD_HPP
#define FCI_SPD_HPP

#include <Eigen/Core>
#include <vector>

namespace fci {

// LDL^T factorization of a symmetric positive-definite matrix with symmetric
// diagonal pivoting.  Sized for small systems (covariate Gram matrices,
// p <= ~50).  A pivot at or below `pivot_rel_tol * max initial diagonal`
// raises singular_design_error naming the dependent column.
class SpdSolver {
 public:
  explicit SpdSolver(const Eigen::MatrixXd& a, double pivot_rel_tol = 1e-12);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  // max/min pivot ratio; a cheap proxy for the condition number.
  double condition_estimate() const;

  Eigen::Index size() const { return l_.rows(); }

 private:
  Eigen::MatrixXd l_;       // unit lower-triangular factor (permuted order)
  Eigen::VectorXd d_;       // pivots
  std::vector<int> perm_;   // perm_[step] = original index eliminated at step
};

// One-shot solve of a v = b for symmetric positive-definite a.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace fci

#endif
