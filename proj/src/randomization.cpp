#include "fci/randomization.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fci/errors.hpp"
#include "fci/rng.hpp"

namespace fci {

void validate_counts(int n_total, const Eigen::VectorXi& counts) {
  if (counts.size() < 1) throw std::invalid_argument("counts: empty");
  long long sum = 0;
  for (int j = 0; j < counts.size(); ++j) {
    if (counts(j) < 2) {
      throw std::invalid_argument("counts: arm " + std::to_string(j + 1) +
                                  " has n_j = " + std::to_string(counts(j)) +
                                  " < 2");
    }
    sum += counts(j);
  }
  if (sum != n_total) {
    throw std::invalid_argument("counts: sum " + std::to_string(sum) +
                                " != N = " + std::to_string(n_total));
  }
}

Assignment draw_assignment(int n_total, const Eigen::VectorXi& counts,
                           std::uint64_t seed) {
  validate_counts(n_total, counts);
  Assignment a;
  a.counts = counts;
  a.arm.resize(n_total);
  int pos = 0;
  for (int j = 0; j < counts.size(); ++j) {
    for (int c = 0; c < counts(j); ++c) a.arm(pos++) = j + 1;
  }
  Rng rng(seed);
  for (int i = n_total - 1; i > 0; --i) {
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(a.arm(i), a.arm(k));
  }
  return a;
}

std::optional<std::uint64_t> try_assignment_count(int n_total,
                                                  const Eigen::VectorXi& counts,
                                                  std::uint64_t cap) {
  validate_counts(n_total, counts);
  // product of binomials C(remaining, n_j); every partial product is itself a
  // valid count, so bailing out as soon as one exceeds the cap is exact
  std::uint64_t total = 1;
  int remaining = n_total;
  for (int j = 0; j < counts.size(); ++j) {
    std::uint64_t binom = 1;
    for (int i = 1; i <= counts(j); ++i) {
      const auto num = static_cast<unsigned __int128>(binom) *
                       static_cast<std::uint64_t>(remaining - counts(j) + i);
      const auto next = num / static_cast<std::uint64_t>(i);  // exact division
      if (next > cap) return std::nullopt;
      binom = static_cast<std::uint64_t>(next);
    }
    const auto prod = static_cast<unsigned __int128>(total) * binom;
    if (prod > cap) return std::nullopt;
    total = static_cast<std::uint64_t>(prod);
    remaining -= counts(j);
  }
  return total;
}

std::uint64_t assignment_count(int n_total, const Eigen::VectorXi& counts,
                               std::uint64_t guard) {
  const auto total = try_assignment_count(n_total, counts, guard);
  if (!total) {
    double log_count = std::lgamma(n_total + 1.0);
    for (int j = 0; j < counts.size(); ++j) log_count -= std::lgamma(counts(j) + 1.0);
    char approx[32];
    std::snprintf(approx, sizeof(approx), "%.3g", std::exp(log_count));
    throw enumeration_limit_error("enumeration: about " + std::string(approx) +
                                  " distinct assignments exceed the guard of " +
                                  std::to_string(guard));
  }
  return *total;
}

std::vector<Assignment> enumerate_assignments(int n_total,
                                              const Eigen::VectorXi& counts,
                                              std::uint64_t guard) {
  std::vector<Assignment> out;
  out.reserve(static_cast<std::size_t>(assignment_count(n_total, counts, guard)));
  for_each_assignment(n_total, counts, [&out](const Assignment& a) { out.push_back(a); },
                      guard);
  return out;
}

}  // namespace fci
