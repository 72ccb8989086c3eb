#include "fci/design.hpp"

#include <stdexcept>

namespace fci {

std::string effect_label(const std::vector<int>& factors) {
  std::string label;
  for (int f : factors) label.push_back(static_cast<char>('A' + f));
  return label;
}

namespace {

// All subsets of {0, ..., k-1} with at least two elements, ordered first by
// cardinality and then lexicographically within each cardinality.
std::vector<std::vector<int>> interaction_subsets(int k) {
  std::vector<std::vector<int>> subsets;
  for (int size = 2; size <= k; ++size) {
    std::vector<int> combo(size);
    for (int i = 0; i < size; ++i) combo[i] = i;
    for (;;) {
      subsets.push_back(combo);
      // advance to the next combination in lexicographic order
      int pos = size - 1;
      while (pos >= 0 && combo[pos] == k - size + pos) --pos;
      if (pos < 0) break;
      ++combo[pos];
      for (int i = pos + 1; i < size; ++i) combo[i] = combo[i - 1] + 1;
    }
  }
  return subsets;
}

}  // namespace

ModelMatrix build_model_matrix(int k) {
  if (k < 1 || k > 16) {
    throw std::invalid_argument("build_model_matrix: k must be in [1, 16], got " +
                                std::to_string(k));
  }
  const int j = 1 << k;

  ModelMatrix m;
  m.k = k;
  m.j = j;
  m.h.resize(j, j);

  m.h.col(0).setOnes();

  // Main-effect column c (1-based): blocks of 2^(K-c) entries, -1 then +1,
  // repeated 2^(c-1) times.  Entry i is the bit (K-c) of i, mapped to +/-1.
  for (int c = 1; c <= k; ++c) {
    for (int i = 0; i < j; ++i) {
      m.h(i, c) = ((i >> (k - c)) & 1) ? 1 : -1;
    }
  }

  const auto subsets = interaction_subsets(k);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const int col = k + 1 + static_cast<int>(s);
    Eigen::VectorXi prod = Eigen::VectorXi::Ones(j);
    for (int f : subsets[s]) prod = prod.cwiseProduct(m.h.col(f + 1));
    m.h.col(col) = prod;
  }

  m.effect_labels.reserve(j - 1);
  for (int c = 0; c < k; ++c) m.effect_labels.push_back(effect_label({c}));
  for (const auto& subset : subsets) m.effect_labels.push_back(effect_label(subset));

  return m;
}

std::vector<TreatmentCombination> treatment_combinations(const ModelMatrix& m) {
  std::vector<TreatmentCombination> combos(m.j);
  for (int row = 0; row < m.j; ++row) {
    combos[row].index = row + 1;
    combos[row].levels = m.h.row(row).segment(1, m.k).transpose();
  }
  return combos;
}

}  // namespace fci
