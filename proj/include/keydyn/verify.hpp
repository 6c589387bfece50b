#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "keydyn/dataset.hpp"
#include "keydyn/forest.hpp"
#include "keydyn/one_class.hpp"
#include "keydyn/stats.hpp"

namespace keydyn {

Eigen::MatrixXd to_matrix(const FeatureRows& rows);

// ---------------------------------------------------------------------------
// One-class pipeline: z-score -> PCA(2) -> one-class SVM

/// How test windows are standardised before projection.
enum class ScalingMode {
  train,        ///< test data goes through the training session's scaler
  per_session,  ///< each session is standardised with its own statistics
};

std::string_view to_string(ScalingMode mode);
ScalingMode parse_scaling_mode(std::string_view text);

struct OcsvmParams {
  double nu = 0.1;
  std::optional<double> kernel_width;  ///< nullopt: median heuristic on the training points
  ScalingMode scaling = ScalingMode::per_session;
};

struct OcsvmCell {
  std::string train_id;
  std::string test_id;
  double inlier_rate = 0.0;            ///< percent of test windows accepted
  double train_outlier_fraction = 0.0; ///< fraction of training windows rejected
  double kernel_width = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

OcsvmCell ocsvm_evaluate(const FeatureRows& train, const FeatureRows& test, const OcsvmParams& params);

/// Which train and test sessions a one-class table uses.
struct OcsvmPairing {
  KeyboardKind train_keyboard = KeyboardKind::laptop;
  int train_session = 1;
  KeyboardKind test_keyboard = KeyboardKind::laptop;
  int test_session = 2;

  /// "L1_L2" style.
  std::string name() const;
  /// L1->L2, L2->M2, M2->L1, M1->M2.
  static std::array<OcsvmPairing, 4> standard();
};

struct OcsvmMatrix {
  OcsvmPairing pairing;
  std::vector<int> user_ids;
  std::vector<std::vector<OcsvmCell>> cells;  ///< [train user][test user]
};

OcsvmMatrix ocsvm_matrix(const Manifest& manifest, const OcsvmPairing& pairing,
                         const FeatureSource& features, const OcsvmParams& params);

std::string ocsvm_matrix_csv(const OcsvmMatrix& m);
std::string ocsvm_matrix_json(const OcsvmMatrix& m);

// ---------------------------------------------------------------------------
// Random forest pairwise discrimination

enum class Decision { same_user, different_user };
std::string_view to_string(Decision d);

struct RfVerdict {
  double accuracy = 0.0;
  double f1_class0 = 0.0;
  double f1_class1 = 0.0;
  Decision decision = Decision::same_user;
  std::array<double, kFeatureCount> importances{};
};

struct RfOptions {
  ForestParams forest;
  int folds = 5;
  double threshold = 0.7;
};

/// Labels a's windows 0 and b's windows 1, then runs stratified k-fold
/// cross-validation (per-class shuffle, round-robin fold assignment). Accuracy
/// is the mean fold accuracy, F1 scores come from the pooled held-out
/// predictions, and importances from a forest fitted on all windows.
/// decision = different_user iff accuracy > threshold.
RfVerdict rf_compare(const FeatureRows& a, const FeatureRows& b, const RfOptions& options,
                     std::uint64_t seed);

struct RfCell {
  std::string row_id;
  std::string col_id;
  bool same_agent = false;
  bool misclassified = false;  ///< decision disagrees with agent identity
  RfVerdict verdict;
};

struct RfTable {
  std::string title;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<std::vector<std::optional<RfCell>>> cells;  ///< nullopt on self comparisons
};

/// Rows: every user's session 1; columns: every session on the keyboard.
RfTable rf_matrix(const Manifest& manifest, KeyboardKind keyboard, const FeatureSource& features,
                  const RfOptions& options, std::uint64_t seed);

/// Rows: every user's laptop session 1; columns: every mechanical session.
RfTable rf_cross_keyboard(const Manifest& manifest, const FeatureSource& features,
                          const RfOptions& options, std::uint64_t seed);

/// Cells "A:0.66 F0:0.65 F1:0.67"; same-agent cells wrapped in ** **,
/// misclassified cells in *** ***.
std::string rf_table_csv(const RfTable& t);
std::string rf_table_json(const RfTable& t);
/// One row per cell with the five importances.
std::string rf_importance_csv(const RfTable& t);

}  // namespace keydyn
