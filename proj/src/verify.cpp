#include "keydyn/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "keydyn/pca.hpp"
#include "keydyn/scaler.hpp"

namespace keydyn {

using nlohmann::json;

Eigen::MatrixXd to_matrix(const FeatureRows& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < kFeatureCount; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

std::string_view to_string(ScalingMode mode) { return mode == ScalingMode::train ? "train" : "per_session"; }

ScalingMode parse_scaling_mode(std::string_view text) {
  if (text == "train") return ScalingMode::train;
  if (text == "per_session") return ScalingMode::per_session;
  throw std::invalid_argument("unknown scaling mode '" + std::string(text) + "'");
}

OcsvmCell ocsvm_evaluate(const FeatureRows& train, const FeatureRows& test, const OcsvmParams& params) {
  const Eigen::MatrixXd train_raw = to_matrix(train);
  const Eigen::MatrixXd test_raw = to_matrix(test);

  const Scaler scaler = Scaler::fit(train_raw);
  const Eigen::MatrixXd train_scaled = scaler.apply(train_raw);
  const Eigen::MatrixXd test_scaled = params.scaling == ScalingMode::train
                                          ? scaler.apply(test_raw)
                                          : Scaler::fit(test_raw).apply(test_raw);

  const PcaModel pca = fit_pca(train_scaled, 2);
  const Eigen::MatrixXd train_pts = pca.project(train_scaled);
  const Eigen::MatrixXd test_pts = pca.project(test_scaled);

  const double width = params.kernel_width.value_or(median_heuristic_width(train_pts));
  const OneClassModel model = fit_one_class(train_pts, params.nu, width);

  OcsvmCell cell;
  cell.inlier_rate = inlier_rate(model, test_pts);
  cell.train_outlier_fraction = 1.0 - inlier_rate(model, train_pts) / 100.0;
  cell.kernel_width = width;
  cell.n_train = train.size();
  cell.n_test = test.size();
  return cell;
}

std::string OcsvmPairing::name() const {
  auto letter = [](KeyboardKind k) { return k == KeyboardKind::laptop ? 'L' : 'M'; };
  return fmt::format("{}{}_{}{}", letter(train_keyboard), train_session, letter(test_keyboard), test_session);
}

std::array<OcsvmPairing, 4> OcsvmPairing::standard() {
  using K = KeyboardKind;
  return {{{K::laptop, 1, K::laptop, 2},
           {K::laptop, 2, K::mechanical, 2},
           {K::mechanical, 2, K::laptop, 1},
           {K::mechanical, 1, K::mechanical, 2}}};
}

OcsvmMatrix ocsvm_matrix(const Manifest& manifest, const OcsvmPairing& pairing,
                         const FeatureSource& features, const OcsvmParams& params) {
  OcsvmMatrix out;
  out.pairing = pairing;
  out.user_ids = manifest.user_ids();
  const auto n = out.user_ids.size();
  out.cells.assign(n, std::vector<OcsvmCell>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& train = manifest.at(out.user_ids[i], pairing.train_keyboard, pairing.train_session);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& test = manifest.at(out.user_ids[j], pairing.test_keyboard, pairing.test_session);
      auto cell = ocsvm_evaluate(features(train), features(test), params);
      cell.train_id = train.label();
      cell.test_id = test.label();
      out.cells[i][j] = std::move(cell);
    }
  }
  return out;
}

std::string ocsvm_matrix_csv(const OcsvmMatrix& m) {
  std::string out = "Train/Test";
  for (const auto& c : m.cells.front()) out += "," + c.test_id;
  out += '\n';
  for (const auto& row : m.cells) {
    out += row.front().train_id;
    for (const auto& c : row) out += fmt::format(",{:.2f}", c.inlier_rate);
    out += '\n';
  }
  return out;
}

std::string ocsvm_matrix_json(const OcsvmMatrix& m) {
  json cells = json::array();
  for (const auto& row : m.cells) {
    for (const auto& c : row) {
      cells.push_back({{"train_id", c.train_id},
                       {"test_id", c.test_id},
                       {"inlier_rate", std::round(c.inlier_rate * 100.0) / 100.0},
                       {"train_outlier_fraction", c.train_outlier_fraction},
                       {"kernel_width", c.kernel_width},
                       {"n_train", c.n_train},
                       {"n_test", c.n_test}});
    }
  }
  return json{{"pairing", m.pairing.name()}, {"users", m.user_ids}, {"cells", cells}}.dump(2) + '\n';
}

// ---------------------------------------------------------------------------

std::string_view to_string(Decision d) { return d == Decision::same_user ? "same_user" : "different_user"; }

namespace {

double f1_score(const std::vector<int>& truth, const std::vector<int>& pred, int positive) {
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == positive;
    const bool p = pred[i] == positive;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  const int denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * tp / denom;
}

}  // namespace

RfVerdict rf_compare(const FeatureRows& a, const FeatureRows& b, const RfOptions& options,
                     std::uint64_t seed) {
  if (a.size() < 20 || b.size() < 20)
    throw std::invalid_argument("rf_compare needs at least 20 windows per session");
  if (options.folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");

  std::vector<Sample> x(a.begin(), a.end());
  x.insert(x.end(), b.begin(), b.end());
  std::vector<int> y(a.size(), 0);
  y.resize(a.size() + b.size(), 1);

  // Stratified fold assignment.
  std::vector<int> fold(x.size());
  RandomStream fold_rng(derive_seed(seed, {tag_hash("folds")}));
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    fold_rng.shuffle(members.begin(), members.end());
    for (std::size_t k = 0; k < members.size(); ++k) fold[members[k]] = static_cast<int>(k % static_cast<std::size_t>(options.folds));
  }

  std::vector<int> pooled_truth;
  std::vector<int> pooled_pred;
  double accuracy_sum = 0.0;
  for (int f = 0; f < options.folds; ++f) {
    std::vector<Sample> train_x;
    std::vector<int> train_y;
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (fold[i] == f) {
        held.push_back(i);
      } else {
        train_x.push_back(x[i]);
        train_y.push_back(y[i]);
      }
    }
    const auto forest = train_forest(train_x, train_y, options.forest,
                                     derive_seed(seed, {tag_hash("fold"), static_cast<std::uint64_t>(f)}));
    int correct = 0;
    for (auto i : held) {
      const int p = forest.predict(x[i]);
      correct += p == y[i];
      pooled_truth.push_back(y[i]);
      pooled_pred.push_back(p);
    }
    accuracy_sum += static_cast<double>(correct) / static_cast<double>(held.size());
  }

  RfVerdict v;
  v.accuracy = accuracy_sum / options.folds;
  v.f1_class0 = f1_score(pooled_truth, pooled_pred, 0);
  v.f1_class1 = f1_score(pooled_truth, pooled_pred, 1);
  v.decision = v.accuracy > options.threshold ? Decision::different_user : Decision::same_user;
  v.importances = train_forest(x, y, options.forest, derive_seed(seed, {tag_hash("full")})).importances();
  return v;
}

namespace {

std::uint64_t cell_seed(std::uint64_t seed, const SessionEntry& r, const SessionEntry& c) {
  return derive_seed(seed, {tag_hash("rf"), static_cast<std::uint64_t>(r.user_id),
                            static_cast<std::uint64_t>(r.keyboard), static_cast<std::uint64_t>(r.session),
                            static_cast<std::uint64_t>(c.user_id), static_cast<std::uint64_t>(c.keyboard),
                            static_cast<std::uint64_t>(c.session)});
}

RfTable rf_table(const std::string& title, const std::vector<const SessionEntry*>& rows,
                 const std::vector<const SessionEntry*>& cols, const FeatureSource& features,
                 const RfOptions& options, std::uint64_t seed) {
  RfTable t;
  t.title = title;
  for (const auto* r : rows) t.row_ids.push_back(r->label());
  for (const auto* c : cols) t.col_ids.push_back(c->label());
  t.cells.assign(rows.size(), std::vector<std::optional<RfCell>>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (rows[i] == cols[j]) continue;
      RfCell cell;
      cell.row_id = t.row_ids[i];
      cell.col_id = t.col_ids[j];
      cell.same_agent = rows[i]->user_id == cols[j]->user_id;
      cell.verdict = rf_compare(features(*rows[i]), features(*cols[j]), options,
                                cell_seed(seed, *rows[i], *cols[j]));
      const bool said_same = cell.verdict.decision == Decision::same_user;
      cell.misclassified = said_same != cell.same_agent;
      t.cells[i][j] = std::move(cell);
    }
  }
  return t;
}

std::vector<const SessionEntry*> sessions_on(const Manifest& m, KeyboardKind kb, bool first_only) {
  std::vector<const SessionEntry*> out;
  for (int id : m.user_ids()) {
    const int last = first_only ? 1 : m.sessions_per_keyboard;
    for (int s = 1; s <= last; ++s) out.push_back(&m.at(id, kb, s));
  }
  return out;
}

std::string keyboard_title(KeyboardKind kb) { return kb == KeyboardKind::laptop ? "Laptop" : "Mechanical"; }

}  // namespace

RfTable rf_matrix(const Manifest& manifest, KeyboardKind keyboard, const FeatureSource& features,
                  const RfOptions& options, std::uint64_t seed) {
  return rf_table(keyboard_title(keyboard), sessions_on(manifest, keyboard, true),
                  sessions_on(manifest, keyboard, false), features, options, seed);
}

RfTable rf_cross_keyboard(const Manifest& manifest, const FeatureSource& features,
                          const RfOptions& options, std::uint64_t seed) {
  return rf_table("Laptop vs Mechanical", sessions_on(manifest, KeyboardKind::laptop, true),
                  sessions_on(manifest, KeyboardKind::mechanical, false), features, options, seed);
}

std::string rf_table_csv(const RfTable& t) {
  std::string out = t.title;
  for (const auto& c : t.col_ids) out += "," + c;
  out += '\n';
  for (std::size_t i = 0; i < t.row_ids.size(); ++i) {
    out += t.row_ids[i];
    for (const auto& cell : t.cells[i]) {
      out += ',';
      if (!cell) continue;
      const auto& v = cell->verdict;
      const auto text = fmt::format("A:{:.2f} F0:{:.2f} F1:{:.2f}", v.accuracy, v.f1_class0, v.f1_class1);
      const char* mark = cell->misclassified ? "***" : (cell->same_agent ? "**" : "");
      out += fmt::format("{}{}{}", mark, text, mark);
    }
    out += '\n';
  }
  return out;
}

std::string rf_table_json(const RfTable& t) {
  json cells = json::array();
  for (const auto& row : t.cells) {
    for (const auto& cell : row) {
      if (!cell) continue;
      const auto& v = cell->verdict;
      json imp;
      for (std::size_t f = 0; f < kFeatureCount; ++f) imp[std::string(kFeatureNames[f])] = v.importances[f];
      cells.push_back({{"train_id", cell->row_id},
                       {"test_id", cell->col_id},
                       {"accuracy", v.accuracy},
                       {"f1_class0", v.f1_class0},
                       {"f1_class1", v.f1_class1},
                       {"decision", std::string(to_string(v.decision))},
                       {"same_agent", cell->same_agent},
                       {"misclassified", cell->misclassified},
                       {"feature_importances", imp}});
    }
  }
  return json{{"title", t.title}, {"cells", cells}}.dump(2) + '\n';
}

std::string rf_importance_csv(const RfTable& t) {
  std::string out = "train_id,test_id";
  for (auto name : kFeatureNames) out += fmt::format(",{}", name);
  out += '\n';
  for (const auto& row : t.cells) {
    for (const auto& cell : row) {
      if (!cell) continue;
      out += cell->row_id + "," + cell->col_id;
      for (double v : cell->verdict.importances) out += fmt::format(",{:.6f}", v);
      out += '\n';
    }
  }
  return out;
}

}  // namespace keydyn
