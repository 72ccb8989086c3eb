#ifndef FCI_RANDOMIZATION_HPP
#define FCI_RANDOMIZATION_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace fci {

// Result of a complete randomization: arm[i] in 1..J is the treatment
// combination of unit i, counts[j-1] the fixed size of arm j (every
// arm holds at least 2 units).
struct Assignment {
  Eigen::VectorXi arm;     // length N, 1-based arm indices
  Eigen::VectorXi counts;  // length J
};

// Throws std::invalid_argument unless every count is >= 2 and they sum to
// n_total.
void validate_counts(int n_total, const Eigen::VectorXi& counts);

// Draws uniformly from the n_total! / prod(n_j!) distinct assignments via a
// seeded Fisher-Yates shuffle of the arm multiset.  Deterministic per seed.
Assignment draw_assignment(int n_total, const Eigen::VectorXi& counts,
                           std::uint64_t seed);

// Number of distinct assignments, or nullopt when it exceeds `cap`.
std::optional<std::uint64_t> try_assignment_count(int n_total,
                                                  const Eigen::VectorXi& counts,
                                                  std::uint64_t cap);

// As above but throws enumeration_limit_error beyond the guard.
std::uint64_t assignment_count(int n_total, const Eigen::VectorXi& counts,
                               std::uint64_t guard = 10'000'000);

// Visits every distinct assignment exactly once, in lexicographic order of
// the arm sequence, using O(N) memory.  The guard bounds the total count.
template <typename Fn>
void for_each_assignment(int n_total, const Eigen::VectorXi& counts, Fn&& fn,
                         std::uint64_t guard = 10'000'000) {
  assignment_count(n_total, counts, guard);  // validates and enforces the guard
  Assignment a;
  a.counts = counts;
  std::vector<int> arm;
  arm.reserve(n_total);
  for (int j = 0; j < counts.size(); ++j) {
    arm.insert(arm.end(), counts(j), j + 1);
  }
  do {
    a.arm = Eigen::Map<const Eigen::VectorXi>(arm.data(), n_total);
    fn(a);
  } while (std::next_permutation(arm.begin(), arm.end()));
}

// Materializes the full enumeration (small designs only).
std::vector<Assignment> enumerate_assignments(int n_total,
                                              const Eigen::VectorXi& counts,
                                              std::uint64_t guard = 10'000'000);

}  // namespace fci

#endif
