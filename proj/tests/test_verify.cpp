#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "keydyn/dataset.hpp"
#include "keydyn/errors.hpp"
#include "keydyn/forest.hpp"
#include "keydyn/one_class.hpp"
#include "keydyn/pca.hpp"
#include "keydyn/scaler.hpp"
#include "keydyn/verify.hpp"

using namespace keydyn;

namespace {

Eigen::MatrixXd gaussian_blob(RandomStream& rng, Eigen::Index n, double cx, double cy, double sd) {
  Eigen::MatrixXd m(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, 0) = rng.normal(cx, sd);
    m(i, 1) = rng.normal(cy, sd);
  }
  return m;
}

FeatureRows session_rows(int user, std::uint64_t seed) {
  auto profiles = instantiate_profiles(ProfileRanges::defaults(), 42);
  const auto agent = make_agent(profiles.at(static_cast<std::size_t>(user - 1)), 42);
  SimConfig cfg;
  cfg.seed = seed;
  return feature_matrix(extract_windows(pair_events(simulate_session(agent, 1000, cfg))));
}

}  // namespace

TEST_CASE("scaler on a symmetric triple and a constant column") {
  Eigen::MatrixXd x(3, 2);
  x << 2, 7, 4, 7, 6, 7;
  const auto s = Scaler::fit(x);
  const double sd = std::sqrt(8.0 / 3.0);
  CHECK(s.mean(0) == 4.0);
  CHECK(s.sd(0) == doctest::Approx(sd).epsilon(1e-15));
  const auto z = s.apply(x);
  CHECK(z(0, 0) == doctest::Approx(-2.0 / sd).epsilon(1e-15));
  CHECK(z(1, 0) == 0.0);
  CHECK(z(2, 0) == doctest::Approx(2.0 / sd).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(z(i, 1) == 0.0);
}

TEST_CASE("scaler standardises its own training set") {
  RandomStream rng(3);
  Eigen::MatrixXd x(200, 5);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = rng.normal(10.0 * double(j), 1.0 + double(j));
  const auto z = Scaler::fit(x).apply(x);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const double mean = z.col(j).mean();
    const double var = (z.col(j).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("pca on data along a line") {
  Eigen::RowVectorXd dir(5);
  dir << 1, -2, 0.5, 3, 1;
  Eigen::MatrixXd x(50, 5);
  for (Eigen::Index i = 0; i < 50; ++i) x.row(i) = (double(i) - 20.0) * 0.1 * dir;
  const auto p = fit_pca(x);
  CHECK(p.explained_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.explained_ratio(1)) < 1e-12);
  const double cosine = std::abs(p.components.row(0).dot(dir.normalized()));
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pca recovers an embedded plane") {
  // Orthonormal pair in 5-d.
  Eigen::VectorXd q1(5), q2(5);
  q1 << 1, 1, 1, 1, 1;
  q1.normalize();
  q2 << 1, -1, 2, 0, -2;
  q2 -= q2.dot(q1) * q1;
  q2.normalize();

  RandomStream rng(8);
  const Eigen::Index n = 50000;
  const double s1 = 3.0, s2 = 1.0, noise = 0.1;
  Eigen::MatrixXd x(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = rng.normal(0, s1) * q1 + rng.normal(0, s2) * q2;
    for (int j = 0; j < 5; ++j) v(j) += rng.normal(0, noise);
    x.row(i) = v.transpose() + Eigen::RowVectorXd::Constant(5, 7.0);
  }
  const auto p = fit_pca(x);
  const double total = s1 * s1 + s2 * s2 + 5 * noise * noise;
  CHECK(std::abs(p.explained_ratio(0) / (s1 * s1 / total) - 1.0) < 0.02);
  CHECK(std::abs(p.explained_ratio(1) / (s2 * s2 / total) - 1.0) < 0.02);
  CHECK(std::abs(p.components.row(0).dot(q1)) > 0.999);
  CHECK(std::abs(p.components.row(1).dot(q2)) > 0.999);

  const Eigen::MatrixXd gram = p.components * p.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(p.explained_ratio(0) >= p.explained_ratio(1));
  for (Eigen::Index k = 0; k < 2; ++k) {
    Eigen::Index arg = 0;
    p.components.row(k).cwiseAbs().maxCoeff(&arg);
    CHECK(p.components(k, arg) > 0.0);
  }

  const auto at_mean = p.project(p.mean);
  CHECK(at_mean.cwiseAbs().maxCoeff() < 1e-12);

  // Mean squared residual equals the discarded eigenvalues.
  const Eigen::MatrixXd centred = x.rowwise() - p.mean;
  const Eigen::MatrixXd residual = centred - p.project(x) * p.components;
  const double err = residual.rowwise().squaredNorm().mean();
  const double discarded = p.all_eigenvalues.tail(3).sum();
  CHECK(std::abs(err - discarded) < 1e-6);

  CHECK_THROWS_AS(fit_pca(x.topRows(1)), std::invalid_argument);
}

TEST_CASE("nu bounds the training outliers") {
  RandomStream rng(12);
  const auto x = gaussian_blob(rng, 100, 0, 0, 1);
  const auto m = fit_one_class(x, 0.5, median_heuristic_width(x));
  int outliers = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) outliers += !m.is_inlier(x.row(i));
  CHECK(outliers >= 40);
  CHECK(outliers <= 60);
  CHECK(m.alpha.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.alpha.minCoeff() >= 0.0);
  CHECK(m.alpha.maxCoeff() <= 1.0 / (0.5 * 100) + 1e-12);
}

TEST_CASE("self rate near the complement of nu and far points rejected") {
  RandomStream rng(21);
  const auto x = gaussian_blob(rng, 150, 1, -1, 1);
  const auto m = fit_one_class(x, 0.1, median_heuristic_width(x));
  const double self = inlier_rate(m, x);
  CHECK(self >= 85.0);
  CHECK(self <= 95.0);
  const auto far = gaussian_blob(rng, 50, 40, 40, 1);
  CHECK(inlier_rate(m, far) == 0.0);
  CHECK_THROWS_AS(inlier_rate(m, Eigen::MatrixXd(0, 2)), std::invalid_argument);
}

TEST_CASE("well separated blobs") {
  RandomStream rng(5);
  const double width = 1.0;
  const auto a = gaussian_blob(rng, 120, 0, 0, 0.5);
  const auto b = gaussian_blob(rng, 120, 10.0 * std::sqrt(width), 0, 0.5);
  const auto m = fit_one_class(a, 0.1, width);
  CHECK(100.0 - inlier_rate(m, b) >= 95.0);
}

TEST_CASE("duplicating the training set leaves the decision unchanged") {
  RandomStream rng(6);
  const auto x = gaussian_blob(rng, 60, 0, 0, 1);
  Eigen::MatrixXd twice(120, 2);
  twice << x, x;
  OneClassOptions tight;
  tight.tolerance = 1e-10;
  const auto m1 = fit_one_class(x, 0.2, 1.5, tight);
  const auto m2 = fit_one_class(twice, 0.2, 1.5, tight);
  const auto probes = gaussian_blob(rng, 40, 0, 0, 2);
  for (Eigen::Index i = 0; i < probes.rows(); ++i)
    CHECK(std::abs(m1.decision(probes.row(i)) - m2.decision(probes.row(i))) < 1e-6);
}

TEST_CASE("one-class argument checks") {
  RandomStream rng(1);
  const auto x = gaussian_blob(rng, 9, 0, 0, 1);
  CHECK_THROWS_AS(fit_one_class(x, 0.1, 1.0), std::invalid_argument);
  const auto y = gaussian_blob(rng, 20, 0, 0, 1);
  CHECK_THROWS_AS(fit_one_class(y, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_one_class(y, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_one_class(y, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("pipeline on a session against itself and under constant shifts") {
  const auto train = session_rows(3, 100);
  const auto test = session_rows(3, 101);
  for (auto mode : {ScalingMode::train, ScalingMode::per_session}) {
    OcsvmParams params;
    params.scaling = mode;
    const auto self = ocsvm_evaluate(train, train, params);
    CHECK(self.inlier_rate >= 100.0 * (1 - params.nu) - 5.0);
    CHECK(self.train_outlier_fraction <= params.nu + 0.05);

    const auto base = ocsvm_evaluate(train, test, params);
    auto shift = [](FeatureRows rows) {
      for (auto& r : rows)
        for (std::size_t f = 0; f < kFeatureCount; ++f) r[f] += 25.0 * double(f + 1);
      return rows;
    };
    const auto moved = ocsvm_evaluate(shift(train), shift(test), params);
    CHECK(moved.inlier_rate == doctest::Approx(base.inlier_rate).epsilon(1e-12));
  }
}

TEST_CASE("forest on a single separating feature") {
  RandomStream rng(44);
  std::vector<Sample> x(300);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (auto& v : x[i]) v = rng.normal(0, 1);
    x[i][0] = rng.uniform(40, 60);
    y[i] = x[i][0] > 50.0;
  }
  const auto f = train_forest(x, y, {}, 1);
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += f.predict(x[i]) == y[i];
  CHECK(correct / 300.0 >= 0.99);
  const auto& imp = f.importances();
  CHECK(std::max_element(imp.begin(), imp.end()) == imp.begin());
  CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto again = train_forest(x, y, {}, 1);
  CHECK(again.importances() == f.importances());
}

TEST_CASE("forest structure respects its limits") {
  RandomStream rng(45);
  std::vector<Sample> x(250);
  std::vector<int> y(250);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (auto& v : x[i]) v = rng.normal(0, 1);
    y[i] = x[i][1] + 0.5 * x[i][3] + rng.normal(0, 0.7) > 0;
  }
  const auto f = train_forest(x, y, {}, 2);
  REQUIRE(f.trees().size() == 500);
  for (const auto& t : f.trees()) {
    CHECK(t.depth() <= 10);
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) {
        CHECK(n.samples() >= 2);
      } else {
        CHECK(n.samples() >= 5);
        const auto& l = t.nodes()[static_cast<std::size_t>(n.left)];
        const auto& r = t.nodes()[static_cast<std::size_t>(n.right)];
        CHECK(l.samples() + r.samples() == n.samples());
        CHECK(l.depth == n.depth + 1);
      }
    }
  }
  CHECK(ForestParams{}.candidate_features() == 2);
}

TEST_CASE("forest on random labels stays near chance") {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(derive_seed(900, {seed}));
    auto make = [&](std::size_t n, std::vector<Sample>& x, std::vector<int>& y) {
      x.resize(n);
      y.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x[i]) v = rng.normal(0, 1);
        y[i] = rng.uniform() < 0.5;
      }
    };
    std::vector<Sample> xtr, xte;
    std::vector<int> ytr, yte;
    make(200, xtr, ytr);
    make(200, xte, yte);
    ForestParams params;
    params.n_estimators = 200;
    const auto f = train_forest(xtr, ytr, params, seed);
    int correct = 0;
    for (std::size_t i = 0; i < xte.size(); ++i) correct += f.predict(xte[i]) == yte[i];
    total += correct / 200.0;
  }
  CHECK(std::abs(total / 20.0 - 0.5) <= 0.08);
}

TEST_CASE("forest argument checks") {
  std::vector<Sample> x(20, Sample{1, 2, 3, 4, 5});
  std::vector<int> zeros(20, 0);
  CHECK_THROWS_AS(train_forest(x, zeros, {}, 1), std::invalid_argument);
  std::vector<int> mixed(20, 0);
  mixed[3] = 1;
  std::vector<Sample> few(5, Sample{});
  CHECK_THROWS_AS(train_forest(few, std::vector<int>{0, 1, 0, 1, 0}, {}, 1), std::invalid_argument);
  mixed[4] = 2;
  CHECK_THROWS_AS(train_forest(x, mixed, {}, 1), std::invalid_argument);
}

TEST_CASE("rf_compare on identical and shifted sessions") {
  const auto a = session_rows(2, 300);
  RfOptions opts;
  const auto same = rf_compare(a, a, opts, 7);
  CHECK(same.accuracy < 0.7);
  CHECK(same.decision == Decision::same_user);

  auto shifted = a;
  for (auto& r : shifted) r[0] += 50.0;
  const auto diff = rf_compare(a, shifted, opts, 7);
  CHECK(diff.accuracy >= 0.95);
  CHECK(diff.decision == Decision::different_user);
  CHECK(std::accumulate(diff.importances.begin(), diff.importances.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  FeatureRows tiny(a.begin(), a.begin() + 19);
  CHECK_THROWS_AS(rf_compare(a, tiny, opts, 7), std::invalid_argument);
}

TEST_CASE("rf_compare is label symmetric") {
  const auto a = session_rows(1, 400);
  const auto b = session_rows(4, 401);
  RfOptions opts;
  const auto ab = rf_compare(a, b, opts, 11);
  const auto ba = rf_compare(b, a, opts, 11);
  CHECK(std::abs(ab.accuracy - ba.accuracy) <= 0.05);
  CHECK(std::abs(ab.f1_class0 - ba.f1_class1) <= 0.05);
  CHECK(std::abs(ab.f1_class1 - ba.f1_class0) <= 0.05);
  CHECK(ab.decision == ba.decision);
}

TEST_CASE("threshold is strict") {
  const auto a = session_rows(5, 500);
  RfOptions opts;
  const auto r = rf_compare(a, a, opts, 3);
  opts.threshold = r.accuracy;
  CHECK(rf_compare(a, a, opts, 3).decision == Decision::same_user);
  opts.threshold = r.accuracy - 1e-9;
  CHECK(rf_compare(a, a, opts, 3).decision == Decision::different_user);
}
