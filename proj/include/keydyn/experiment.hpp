#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "keydyn/dataset.hpp"
#include "keydyn/stats.hpp"
#include "keydyn/verify.hpp"

namespace keydyn {

/// Everything a run depends on. Defaults reproduce the reference experiment.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "run";
  ProfileRanges profiles = ProfileRanges::defaults();
  int n_chars = 1000;
  int sessions_per_keyboard = 2;
  OcsvmParams ocsvm;
  RfOptions rf;

  std::string to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::filesystem::path manifest_path() const { return out_dir / kManifestName; }
  std::filesystem::path report_dir() const { return out_dir / "reports"; }
};

/// Lazily loads per-session feature rows (sparse windows dropped). Reads the
/// feature CSV when present, otherwise derives features from the event CSV.
class FeatureStore {
 public:
  explicit FeatureStore(const Manifest& manifest) : manifest_(manifest) {}

  const FeatureRows& rows(const SessionEntry& entry);
  FeatureSource source() {
    return [this](const SessionEntry& e) -> const FeatureRows& { return rows(e); };
  }

 private:
  const Manifest& manifest_;
  std::map<std::string, FeatureRows> cache_;
};

/// Events -> keystrokes -> windows for one session file.
std::vector<FeatureWindow> session_features(const std::filesystem::path& events_csv);

}  // namespace keydyn
