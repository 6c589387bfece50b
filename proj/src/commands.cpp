#include "keydyn/commands.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "keydyn/errors.hpp"

namespace keydyn {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::filesystem::path ensure_reports(const ExperimentConfig& config) {
  const auto dir = config.report_dir();
  std::filesystem::create_directories(dir);
  return dir;
}

Manifest load_manifest(const ExperimentConfig& config) { return Manifest::load(config.manifest_path()); }

std::string file_stem(KsMatrix const& m) { return "ks_" + m.pairing.name(); }

}  // namespace

void cmd_init(const std::filesystem::path& path, const ExperimentConfig& config) { config.save(path); }

Manifest cmd_simulate(const ExperimentConfig& config) {
  const auto profiles = instantiate_profiles(config.profiles, config.seed);
  return generate_grid(profiles, config.sessions_per_keyboard, config.n_chars, config.seed, config.out_dir);
}

std::size_t cmd_extract(const std::filesystem::path& manifest_path) {
  const auto manifest = Manifest::load(manifest_path);
  std::size_t written = 0;
  for (const auto& s : manifest.sessions) {
    const auto out = manifest.features_file(s);
    std::filesystem::create_directories(out.parent_path());
    write_features(out, session_features(manifest.events_file(s)));
    ++written;
  }
  return written;
}

KeyboardScope parse_keyboard_scope(std::string_view text) {
  if (text == "laptop") return KeyboardScope::laptop;
  if (text == "mechanical") return KeyboardScope::mechanical;
  if (text == "cross") return KeyboardScope::cross;
  if (text == "all") return KeyboardScope::all;
  throw std::invalid_argument("keyboard must be laptop, mechanical, cross or all");
}

std::vector<KsMatrix> cmd_ks(const ExperimentConfig& config, KeyboardScope scope) {
  const auto manifest = load_manifest(config);
  FeatureStore store(manifest);
  const auto dir = ensure_reports(config);

  using K = KeyboardKind;
  std::vector<KeyboardPairing> pairings;
  if (scope == KeyboardScope::laptop || scope == KeyboardScope::all) pairings.push_back({K::laptop, K::laptop});
  if (scope == KeyboardScope::mechanical || scope == KeyboardScope::all) pairings.push_back({K::mechanical, K::mechanical});
  if (scope == KeyboardScope::cross || scope == KeyboardScope::all) pairings.push_back({K::laptop, K::mechanical});

  std::vector<KsMatrix> out;
  for (const auto& p : pairings) {
    auto m = ks_matrix(manifest, p, store.source());
    write_text(dir / (file_stem(m) + ".csv"), ks_matrix_csv(m));
    write_text(dir / (file_stem(m) + ".json"), ks_matrix_json(m));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<OcsvmMatrix> cmd_ocsvm(const ExperimentConfig& config) {
  const auto manifest = load_manifest(config);
  FeatureStore store(manifest);
  const auto dir = ensure_reports(config);
  std::vector<OcsvmMatrix> out;
  for (const auto& p : OcsvmPairing::standard()) {
    auto m = ocsvm_matrix(manifest, p, store.source(), config.ocsvm);
    write_text(dir / ("ocsvm_" + p.name() + ".csv"), ocsvm_matrix_csv(m));
    write_text(dir / ("ocsvm_" + p.name() + ".json"), ocsvm_matrix_json(m));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<RfTable> cmd_rf(const ExperimentConfig& config, KeyboardScope scope) {
  const auto manifest = load_manifest(config);
  FeatureStore store(manifest);
  const auto dir = ensure_reports(config);

  std::vector<std::pair<std::string, RfTable>> tables;
  if (scope == KeyboardScope::laptop || scope == KeyboardScope::all)
    tables.emplace_back("laptop", rf_matrix(manifest, KeyboardKind::laptop, store.source(), config.rf, config.seed));
  if (scope == KeyboardScope::mechanical || scope == KeyboardScope::all)
    tables.emplace_back("mechanical",
                        rf_matrix(manifest, KeyboardKind::mechanical, store.source(), config.rf, config.seed));
  if (scope == KeyboardScope::cross || scope == KeyboardScope::all)
    tables.emplace_back("laptop_vs_mechanical", rf_cross_keyboard(manifest, store.source(), config.rf, config.seed));

  std::vector<RfTable> out;
  for (auto& [name, t] : tables) {
    write_text(dir / ("rf_" + name + ".csv"), rf_table_csv(t));
    write_text(dir / ("rf_" + name + ".json"), rf_table_json(t));
    write_text(dir / ("rf_" + name + "_importance.csv"), rf_importance_csv(t));
    out.push_back(std::move(t));
  }
  return out;
}

std::string ReportSummary::to_text() const {
  std::string s;
  if (rf_cells > 0) {
    s += fmt::format("rf: {} cells, {} same_user, {} different_user, {} misclassified\n", rf_cells, rf_same,
                     rf_different, rf_misclassified);
  }
  if (ks_cells > 0) {
    s += fmt::format("ks: {} cells, {} with p < 0.05 on at least 3 of 5 features\n", ks_cells,
                     ks_cells_mostly_significant);
  }
  if (ocsvm_cells > 0) {
    s += fmt::format("ocsvm: {} cells, mean cross-user inlier rate {:.2f}%\n", ocsvm_cells,
                     ocsvm_mean_cross_user_rate);
  }
  return s;
}

std::string ReportSummary::to_json() const {
  const nlohmann::json doc = {
      {"rf", {{"cells", rf_cells}, {"same_user", rf_same}, {"different_user", rf_different},
              {"misclassified", rf_misclassified}}},
      {"ks", {{"cells", ks_cells}, {"mostly_significant", ks_cells_mostly_significant}}},
      {"ocsvm", {{"cells", ocsvm_cells}, {"mean_cross_user_inlier_rate", ocsvm_mean_cross_user_rate}}}};
  return doc.dump(2) + '\n';
}

ReportSummary cmd_report(const ExperimentConfig& config, std::string_view which, KeyboardScope scope) {
  const bool all = which == "all";
  if (!all && which != "ks" && which != "ocsvm" && which != "rf")
    throw std::invalid_argument("report must be one of ks, ocsvm, rf, all");

  ReportSummary summary;
  if (all || which == "ks") {
    for (const auto& m : cmd_ks(config, scope)) {
      for (const auto& row : m.cells) {
        for (const auto& cell : row) {
          ++summary.ks_cells;
          int significant = 0;
          for (double p : cell) significant += p < 0.05;
          summary.ks_cells_mostly_significant += significant >= 3;
        }
      }
    }
  }
  if (all || which == "ocsvm") {
    double sum = 0.0;
    int cross = 0;
    for (const auto& m : cmd_ocsvm(config)) {
      for (std::size_t i = 0; i < m.cells.size(); ++i) {
        for (std::size_t j = 0; j < m.cells[i].size(); ++j) {
          ++summary.ocsvm_cells;
          if (i != j) {
            sum += m.cells[i][j].inlier_rate;
            ++cross;
          }
        }
      }
    }
    summary.ocsvm_mean_cross_user_rate = cross > 0 ? sum / cross : 0.0;
  }
  if (all || which == "rf") {
    for (const auto& t : cmd_rf(config, scope)) {
      for (const auto& row : t.cells) {
        for (const auto& cell : row) {
          if (!cell) continue;
          ++summary.rf_cells;
          (cell->verdict.decision == Decision::same_user ? summary.rf_same : summary.rf_different)++;
          summary.rf_misclassified += cell->misclassified;
        }
      }
    }
  }
  const auto dir = ensure_reports(config);
  write_text(dir / "summary.json", summary.to_json());
  write_text(dir / "summary.txt", summary.to_text());
  return summary;
}

}  // namespace keydyn
