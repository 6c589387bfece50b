#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "keydyn/experiment.hpp"

namespace keydyn {

/// Writes the default configuration (or `config`) to path.
void cmd_init(const std::filesystem::path& path, const ExperimentConfig& config = {});

/// Simulates the session grid into config.out_dir; returns the manifest.
Manifest cmd_simulate(const ExperimentConfig& config);

/// Writes one feature CSV per manifest session; returns the number written.
std::size_t cmd_extract(const std::filesystem::path& manifest_path);

/// Keyboard selector for ks and rf: laptop, mechanical, cross or all.
enum class KeyboardScope { laptop, mechanical, cross, all };
KeyboardScope parse_keyboard_scope(std::string_view text);

std::vector<KsMatrix> cmd_ks(const ExperimentConfig& config, KeyboardScope scope = KeyboardScope::all);
std::vector<OcsvmMatrix> cmd_ocsvm(const ExperimentConfig& config);
std::vector<RfTable> cmd_rf(const ExperimentConfig& config, KeyboardScope scope = KeyboardScope::all);

/// Aggregate counts over whatever the report produced.
struct ReportSummary {
  int rf_cells = 0;
  int rf_same = 0;
  int rf_different = 0;
  int rf_misclassified = 0;
  int ks_cells = 0;
  int ks_cells_mostly_significant = 0;  ///< cells with p < 0.05 on >= 3 features
  int ocsvm_cells = 0;
  double ocsvm_mean_cross_user_rate = 0.0;

  std::string to_text() const;
  std::string to_json() const;
};

/// which: ks, ocsvm, rf or all. Writes tables plus reports/summary.{json,txt}.
ReportSummary cmd_report(const ExperimentConfig& config, std::string_view which,
                         KeyboardScope scope = KeyboardScope::all);

}  // namespace keydyn
