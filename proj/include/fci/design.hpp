#ifndef FCI_DESIGN_HPP
#define FCI_DESIGN_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace fci {

// Model matrix of a 2^K factorial design: a J x J orthogonal matrix with
// entries in {-1, +1} (J = 2^K).  Column 0 is all ones; columns 1..K encode
// the main effects; the remaining columns are entry-wise products over factor
// subsets, ordered by subset cardinality and then lexicographically.
struct ModelMatrix {
  int k = 0;                               // number of factors
  int j = 0;                               // 2^k treatment combinations
  Eigen::MatrixXi h;                       // J x J, exact integer entries
  std::vector<std::string> effect_labels;  // J-1 labels, one per column 1..J-1

  Eigen::MatrixXi::ConstColXpr column(int l) const { return h.col(l); }
};

// One row of the (h_1, ..., h_K) sub-matrix: the factor levels of an arm.
struct TreatmentCombination {
  int index = 0;           // 1-based arm index
  Eigen::VectorXi levels;  // length K, entries in {-1, +1}
};

// Builds the model matrix for K factors.  Throws std::invalid_argument unless
// 1 <= k <= 16 (J^2 integer entries are materialized).
ModelMatrix build_model_matrix(int k);

// The J treatment combinations, in arm order.
std::vector<TreatmentCombination> treatment_combinations(const ModelMatrix& m);

// Letter naming of a factor subset, e.g. {0,2} -> "AC".  Factors are named
// A, B, C, ... in construction order.
std::string effect_label(const std::vector<int>& factors);

}  // namespace fci

#endif
