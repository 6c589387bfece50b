#include <doctest.h>

#include "keydyn/commands.hpp"
#include "keydyn/errors.hpp"
#include "support.hpp"

using namespace keydyn;

namespace {

ExperimentConfig small_config(const std::filesystem::path& out, std::size_t users, int chars) {
  ExperimentConfig c;
  c.out_dir = out;
  c.profiles.users.resize(users);
  c.n_chars = chars;
  c.rf.forest.n_estimators = 40;
  return c;
}

std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = testing::slurp(e.path());
  return out;
}

}  // namespace

TEST_CASE("default config carries the reference values") {
  const ExperimentConfig c;
  CHECK(c.seed == 42);
  CHECK(c.n_chars == 1000);
  CHECK(c.sessions_per_keyboard == 2);
  CHECK(c.profiles.users.size() == 5);
  CHECK(c.ocsvm.nu == 0.1);
  CHECK_FALSE(c.ocsvm.kernel_width.has_value());
  CHECK(c.rf.forest.n_estimators == 500);
  CHECK(c.rf.forest.max_depth == 10);
  CHECK(c.rf.forest.min_samples_split == 5);
  CHECK(c.rf.forest.min_samples_leaf == 2);
  CHECK(c.rf.forest.candidate_features() == 2);
  CHECK(c.rf.forest.bootstrap);
  CHECK(c.rf.threshold == 0.7);
}

TEST_CASE("config round trip and validation") {
  ExperimentConfig c;
  c.seed = 7;
  c.n_chars = 321;
  c.ocsvm.nu = 0.2;
  c.ocsvm.kernel_width = 2.5;
  c.ocsvm.scaling = ScalingMode::train;
  c.rf.threshold = 0.8;
  c.profiles.users[2].wpm = {41.0, 43.5};
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.ocsvm.kernel_width == 2.5);
  CHECK(back.profiles.users[2].wpm.high == 43.5);

  testing::TempDir dir("cfg");
  cmd_init(dir.path() / "k.json", c);
  CHECK(ExperimentConfig::load(dir.path() / "k.json").to_json() == c.to_json());

  CHECK(ExperimentConfig::from_json("{\"seed\": 5}").n_chars == 1000);
  CHECK_THROWS(ExperimentConfig::from_json("{\"sed\": 5}"));
  CHECK_THROWS(ExperimentConfig::from_json("{\"rf\": {\"trees\": 5}}"));
  CHECK_THROWS(ExperimentConfig::from_json("[1, 2"));
}

TEST_CASE("minimal simulation") {
  testing::TempDir dir("sim1");
  const auto m = cmd_simulate(small_config(dir.path(), 1, 1));
  REQUIRE(m.sessions.size() == 4);
  for (const auto& e : m.sessions) CHECK(read_session(m.events_file(e)).size() == 2);
  CHECK(std::filesystem::exists(dir.path() / kManifestName));
}

TEST_CASE("simulation and extraction are deterministic and idempotent") {
  testing::TempDir a("det_a"), b("det_b");
  cmd_simulate(small_config(a.path(), 2, 200));
  cmd_simulate(small_config(b.path(), 2, 200));
  CHECK(cmd_extract(a.path() / kManifestName) == 8);
  const auto first = tree_contents(a.path());
  CHECK(cmd_extract(a.path() / kManifestName) == 8);
  CHECK(tree_contents(a.path()) == first);
  cmd_extract(b.path() / kManifestName);
  CHECK(tree_contents(b.path()) == first);

  auto other = small_config(b.path(), 2, 200);
  other.seed = 43;
  cmd_simulate(other);
  CHECK(tree_contents(b.path()) != first);
}

TEST_CASE("extract needs a usable manifest") {
  testing::TempDir dir("empty");
  CHECK_THROWS_AS(cmd_extract(dir.path() / kManifestName), ManifestError);
  Manifest{}.save(dir.path() / kManifestName);
  CHECK_THROWS_AS(cmd_extract(dir.path() / kManifestName), ManifestError);
}

TEST_CASE("report over a small grid") {
  testing::TempDir dir("report");
  const auto config = small_config(dir.path(), 2, 300);
  cmd_simulate(config);
  cmd_extract(config.manifest_path());
  const auto summary = cmd_report(config, "all");

  // rf: 2 keyboards x (2 rows x 4 columns - 2 self) + cross 2 rows x 4 columns
  CHECK(summary.rf_cells == 20);
  CHECK(summary.rf_same + summary.rf_different == summary.rf_cells);
  CHECK(summary.rf_misclassified <= summary.rf_cells);
  CHECK(summary.ks_cells == 12);
  CHECK(summary.ocsvm_cells == 16);

  const auto reports = config.report_dir();
  for (const char* f : {"ks_laptop.csv", "ks_mechanical.csv", "ks_laptop_vs_mechanical.csv", "ocsvm_L1_L2.csv",
                        "ocsvm_L2_M2.csv", "ocsvm_M2_L1.csv", "ocsvm_M1_M2.csv", "rf_laptop.csv",
                        "rf_mechanical.csv", "rf_laptop_vs_mechanical.csv", "rf_laptop_importance.csv",
                        "summary.json", "summary.txt"})
    CHECK_MESSAGE(std::filesystem::exists(reports / f), f);

  const auto rf = testing::slurp(reports / "rf_laptop.csv");
  CHECK(rf.find("**A:") != std::string::npos);
  const auto text = testing::slurp(reports / "summary.txt");
  CHECK(text.find("misclassified") != std::string::npos);

  CHECK_THROWS(cmd_report(config, "plots"));
}
