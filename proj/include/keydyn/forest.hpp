#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "keydyn/features.hpp"

namespace keydyn {

using Sample = std::array<double, kFeatureCount>;

/// Defaults mirror the reference configuration: 500 bootstrapped trees,
/// depth <= 10, split needs 5 samples, leaves keep 2, sqrt(d) candidates.
struct ForestParams {
  int n_estimators = 500;
  int max_depth = 10;
  int min_samples_split = 5;
  int min_samples_leaf = 2;
  int max_features = 0;  ///< 0 selects floor(sqrt(feature count))
  bool bootstrap = true;

  int candidate_features() const;
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int depth = 0;
  std::array<int, 2> counts{};  ///< training samples per class reaching the node

  bool is_leaf() const { return feature < 0; }
  int samples() const { return counts[0] + counts[1]; }
};

/// Binary CART tree with Gini impurity; samples go left when value <= threshold.
class DecisionTree {
 public:
  int predict(const Sample& x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
  friend class TreeBuilder;
};

class ForestModel {
 public:
  /// Majority vote over trees; an exact tie goes to class 0.
  int predict(const Sample& x) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }
  /// Normalised mean Gini decrease per feature; sums to 1.
  const std::array<double, kFeatureCount>& importances() const { return importances_; }
  const ForestParams& params() const { return params_; }

 private:
  std::vector<DecisionTree> trees_;
  std::array<double, kFeatureCount> importances_{};
  ForestParams params_;
  friend ForestModel train_forest(const std::vector<Sample>&, const std::vector<int>&,
                                  const ForestParams&, std::uint64_t);
};

/// Labels must be 0 or 1 with both present; throws std::invalid_argument
/// otherwise or when fewer than 10 samples are given.
ForestModel train_forest(const std::vector<Sample>& x, const std::vector<int>& y,
                         const ForestParams& params, std::uint64_t seed);

}  // namespace keydyn
