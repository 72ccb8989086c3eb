#include "fci/spd.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fci/errors.hpp"

namespace fci {

namespace {

// column numbers reported 1-based, matching the x_1..x_p file headers
std::string dependent_column_message(const std::vector<int>& perm, int step,
                                     int original) {
  std::ostringstream msg;
  msg << "singular design: column " << original + 1
      << " is numerically a linear combination of column(s) {";
  for (int s = 0; s < step; ++s) {
    if (s > 0) msg << ", ";
    msg << perm[s] + 1;
  }
  msg << "}";
  return msg.str();
}

}  // namespace

SpdSolver::SpdSolver(const Eigen::MatrixXd& a, double pivot_rel_tol) {
  const Eigen::Index p = a.rows();
  if (a.cols() != p) throw std::invalid_argument("SpdSolver: matrix not square");
  if (!a.isApprox(a.transpose(), 1e-10)) {
    throw std::invalid_argument("SpdSolver: matrix not symmetric");
  }

  Eigen::MatrixXd w = a;  // working copy, lower triangle is authoritative
  l_ = Eigen::MatrixXd::Identity(p, p);
  d_.resize(p);
  perm_.resize(p);
  std::iota(perm_.begin(), perm_.end(), 0);

  const double tol = pivot_rel_tol * std::max(a.diagonal().maxCoeff(), 0.0);

  for (Eigen::Index step = 0; step < p; ++step) {
    // symmetric diagonal pivoting: bring the largest remaining diagonal forward
    Eigen::Index pivot = step;
    for (Eigen::Index i = step + 1; i < p; ++i) {
      if (w(i, i) > w(pivot, pivot)) pivot = i;
    }
    if (pivot != step) {
      w.row(step).swap(w.row(pivot));
      w.col(step).swap(w.col(pivot));
      l_.row(step).head(step).swap(l_.row(pivot).head(step));
      std::swap(perm_[step], perm_[pivot]);
    }

    const double d = w(step, step);
    if (!(d > tol)) {
      throw singular_design_error(
          dependent_column_message(perm_, static_cast<int>(step), perm_[step]));
    }
    d_(step) = d;

    for (Eigen::Index i = step + 1; i < p; ++i) {
      l_(i, step) = w(i, step) / d;
    }
    // rank-one downdate of the trailing block, kept symmetric
    for (Eigen::Index i = step + 1; i < p; ++i) {
      const double lid = l_(i, step) * d;
      for (Eigen::Index j = step + 1; j <= i; ++j) {
        w(i, j) -= lid * l_(j, step);
        if (i != j) w(j, i) = w(i, j);
      }
    }
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  const Eigen::Index p = size();
  if (b.size() != p) throw std::invalid_argument("SpdSolver::solve: size mismatch");

  // P a P' = L D L'  =>  a v = b  via permuted forward/backward substitution
  Eigen::VectorXd y(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    y(i) = b(perm_[i]) - l_.row(i).head(i).dot(y.head(i));
  }
  y.array() /= d_.array();
  Eigen::VectorXd u(p);
  for (Eigen::Index i = p - 1; i >= 0; --i) {
    u(i) = y(i) - l_.col(i).tail(p - i - 1).dot(u.tail(p - i - 1));
  }
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(perm_[i]) = u(i);
  return v;
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd out(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c) out.col(c) = solve(Eigen::VectorXd(b.col(c)));
  return out;
}

double SpdSolver::condition_estimate() const {
  if (d_.size() == 0) return 1.0;
  return d_.maxCoeff() / d_.minCoeff();
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return SpdSolver(a).solve(b);
}

}  // namespace fci
