#include "fci/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fci {

void MomentAccumulator::add(double x) {
  const std::int64_t n1 = n_;
  n_ += 1;
  const double delta = x - mean_;
  const double delta_n = delta / n_;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (static_cast<double>(n_) * n_ - 3.0 * n_ + 3.0) +
         6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n_ - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double nx = na + nb;
  const double delta = other.mean_ - mean_;
  const double delta2 = delta * delta;

  const double m2 = m2_ + other.m2_ + delta2 * na * nb / nx;
  const double m3 = m3_ + other.m3_ + delta2 * delta * na * nb * (na - nb) / (nx * nx) +
                    3.0 * delta * (na * other.m2_ - nb * m2_) / nx;
  const double m4 =
      m4_ + other.m4_ +
      delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (nx * nx * nx) +
      6.0 * delta2 * (na * na * other.m2_ + nb * nb * m2_) / (nx * nx) +
      4.0 * delta * (na * other.m3_ - nb * m3_) / nx;

  mean_ = (na * mean_ + nb * other.mean_) / nx;
  n_ += other.n_;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double MomentAccumulator::variance_population() const {
  if (n_ < 1) throw std::logic_error("variance of empty accumulator");
  return m2_ / static_cast<double>(n_);
}

double MomentAccumulator::variance_sample() const {
  if (n_ < 2) throw std::logic_error("sample variance needs n >= 2");
  return m2_ / static_cast<double>(n_ - 1);
}

double MomentAccumulator::skewness() const {
  if (n_ < 2 || m2_ <= 0.0) return 0.0;
  return std::sqrt(static_cast<double>(n_)) * m3_ / std::pow(m2_, 1.5);
}

double MomentAccumulator::excess_kurtosis() const {
  if (n_ < 2 || m2_ <= 0.0) return 0.0;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_) - 3.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max(d, (i + 1) / n - f);
    d = std::max(d, f - i / n);
  }
  return d;
}

double ks_critical(double alpha, std::int64_t n) {
  if (alpha <= 0.0 || alpha >= 1.0 || n < 1) {
    throw std::invalid_argument("ks_critical: bad arguments");
  }
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace fci
