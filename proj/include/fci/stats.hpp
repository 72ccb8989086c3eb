#ifndef FCI_STATS_HPP
#define FCI_STATS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace fci {

// One-pass accumulator of central moments up to order four (Pebay update).
// Mergeable, so partial accumulations over disjoint blocks combine to the
// same moments as a single pass.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  // divisor n
  double variance_population() const;
  // divisor n-1
  double variance_sample() const;
  double skewness() const;
  double excess_kurtosis() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

// Standard normal CDF.
double normal_cdf(double z);

// Two-sided Kolmogorov-Smirnov distance of a sample against the standard
// normal; the input is sorted internally.
double ks_statistic(std::vector<double> values);

// Asymptotic critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical(double alpha, std::int64_t n);

// Compensated (Neumaier) summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace fci

#endif
