#include "keydyn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "keydyn/rng.hpp"

namespace keydyn {

int ForestParams::candidate_features() const {
  if (max_features > 0) return std::min<int>(max_features, static_cast<int>(kFeatureCount));
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(kFeatureCount)))));
}

int DecisionTree::predict(const Sample& x) const {
  int at = 0;
  while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
    const auto& n = nodes_[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  const auto& leaf = nodes_[static_cast<std::size_t>(at)];
  return leaf.counts[1] > leaf.counts[0] ? 1 : 0;
}

int DecisionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

namespace {

double gini(int c0, int c1) {
  const double n = c0 + c1;
  if (n == 0) return 0.0;
  const double p0 = c0 / n;
  const double p1 = c1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<Sample>& x, const std::vector<int>& y, const ForestParams& params,
              RandomStream& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {}

  /// Returns the per-feature total impurity decrease.
  std::array<double, kFeatureCount> build(DecisionTree& tree, std::vector<int> indices) {
    tree_ = &tree;
    decrease_.fill(0.0);
    grow(std::move(indices), 0);
    return decrease_;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child impurity sum n_l g_l + n_r g_r
    std::size_t left_count = 0;
  };

  int grow(std::vector<int> indices, int depth) {
    TreeNode node;
    node.depth = depth;
    for (int i : indices) ++node.counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])];
    const int id = static_cast<int>(tree_->nodes_.size());
    tree_->nodes_.push_back(node);

    const int n = node.samples();
    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    if (pure || depth >= params_.max_depth || n < params_.min_samples_split ||
        n < 2 * params_.min_samples_leaf) {
      return id;
    }

    const Split split = best_split(indices);
    if (split.feature < 0) return id;

    std::vector<int> left;
    std::vector<int> right;
    left.reserve(split.left_count);
    right.reserve(indices.size() - split.left_count);
    for (int i : indices) {
      (x_[static_cast<std::size_t>(i)][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(i);
    }
    decrease_[static_cast<std::size_t>(split.feature)] +=
        n * gini(node.counts[0], node.counts[1]) - split.impurity;
    indices.clear();
    indices.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& self = tree_->nodes_[static_cast<std::size_t>(id)];
    self.feature = split.feature;
    self.threshold = split.threshold;
    self.left = l;
    self.right = r;
    return id;
  }

  Split best_split(const std::vector<int>& indices) {
    std::array<int, kFeatureCount> order{};
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order.begin(), order.end());

    const int wanted = params_.candidate_features();
    const int min_leaf = params_.min_samples_leaf;
    const int n = static_cast<int>(indices.size());
    int total1 = 0;
    for (int i : indices) total1 += y_[static_cast<std::size_t>(i)];
    const int total0 = n - total1;

    Split best;
    int visited = 0;
    std::vector<std::pair<double, int>> column(indices.size());
    for (int f : order) {
      if (visited >= wanted && best.feature >= 0) break;
      for (std::size_t k = 0; k < indices.size(); ++k) {
        const int i = indices[k];
        column[k] = {x_[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)], y_[static_cast<std::size_t>(i)]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here
      ++visited;

      int left1 = 0;
      for (int p = 1; p < n; ++p) {
        left1 += column[static_cast<std::size_t>(p - 1)].second;
        if (p < min_leaf || n - p < min_leaf) continue;
        const double lo = column[static_cast<std::size_t>(p - 1)].first;
        const double hi = column[static_cast<std::size_t>(p)].first;
        if (!(lo < hi)) continue;
        const int left0 = p - left1;
        const double impurity = p * gini(left0, left1) + (n - p) * gini(total0 - left0, total1 - left1);
        if (best.feature < 0 || impurity < best.impurity) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {f, mid, impurity, static_cast<std::size_t>(p)};
        }
      }
    }
    return best;
  }

  const std::vector<Sample>& x_;
  const std::vector<int>& y_;
  const ForestParams& params_;
  RandomStream& rng_;
  DecisionTree* tree_ = nullptr;
  std::array<double, kFeatureCount> decrease_{};
};

int ForestModel::predict(const Sample& x) const {
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += static_cast<std::size_t>(t.predict(x));
  return 2 * votes > trees_.size() ? 1 : 0;
}

ForestModel train_forest(const std::vector<Sample>& x, const std::vector<int>& y,
                         const ForestParams& params, std::uint64_t seed) {
  if (x.size() != y.size()) throw std::invalid_argument("feature and label counts differ");
  if (x.size() < 10) throw std::invalid_argument("forest training needs at least 10 samples");
  if (params.n_estimators < 1) throw std::invalid_argument("n_estimators must be positive");
  std::array<int, 2> seen{};
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
    ++seen[static_cast<std::size_t>(label)];
  }
  if (seen[0] == 0 || seen[1] == 0) throw std::invalid_argument("training data contains a single class");

  ForestModel model;
  model.params_ = params;
  model.trees_.resize(static_cast<std::size_t>(params.n_estimators));

  std::array<double, kFeatureCount> importance_sum{};
  int contributing = 0;
  const int n = static_cast<int>(x.size());
  std::vector<int> indices(x.size());
  for (int t = 0; t < params.n_estimators; ++t) {
    RandomStream rng(derive_seed(seed, {tag_hash("tree"), static_cast<std::uint64_t>(t)}));
    if (params.bootstrap) {
      for (auto& i : indices) i = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    } else {
      std::iota(indices.begin(), indices.end(), 0);
    }
    TreeBuilder builder(x, y, params, rng);
    const auto decrease = builder.build(model.trees_[static_cast<std::size_t>(t)], indices);
    const double total = std::accumulate(decrease.begin(), decrease.end(), 0.0);
    if (total > 0.0) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) importance_sum[f] += decrease[f] / total;
      ++contributing;
    }
  }

  const double total = std::accumulate(importance_sum.begin(), importance_sum.end(), 0.0);
  if (contributing == 0 || total <= 0.0) {
    // No tree found a split; no feature carries information.
    model.importances_.fill(1.0 / kFeatureCount);
  } else {
    for (std::size_t f = 0; f < kFeatureCount; ++f) model.importances_[f] = importance_sum[f] / total;
  }
  return model;
}

}  // namespace keydyn
