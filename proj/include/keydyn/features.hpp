#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "keydyn/agent_sim.hpp"

namespace keydyn {

struct Keystroke {
  Key key;
  double press_ms = 0.0;
  double release_ms = 0.0;
  double dwell_ms() const { return release_ms - press_ms; }
};

/// Matches every press with the next release of the same key. Output is in
/// press order. Throws PairingError on an orphan press or release.
std::vector<Keystroke> pair_events(const std::vector<KeystrokeEvent>& events);

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"avg_dwell", "std_dwell",
                                                                          "avg_flight", "std_flight",
                                                                          "error_rate"};
/// Short names used in the KS tables.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureAbbrev{"ad", "sd", "af", "sf",
                                                                           "er"};

struct FeatureWindow {
  double window_start_ms = 0.0;
  double window_end_ms = 0.0;
  double avg_dwell = 0.0;
  double std_dwell = 0.0;
  double avg_flight = 0.0;
  double std_flight = 0.0;
  double error_rate_pct = 0.0;
  /// Fewer than two member keystrokes.
  bool sparse = false;

  std::array<double, kFeatureCount> values() const {
    return {avg_dwell, std_dwell, avg_flight, std_flight, error_rate_pct};
  }
  bool operator==(const FeatureWindow&) const = default;
};

struct WindowSpec {
  double window_ms = 5000.0;
  double step_ms = 1000.0;
};

/// Sliding windows [start, start + window) stepping from 0 while the window
/// end does not pass the last release. A keystroke is a member when its press
/// falls in the window; the flight ending at a member press (previous release
/// to this press) belongs to the same window. Standard deviations use the
/// population form.
std::vector<FeatureWindow> extract_windows(const std::vector<Keystroke>& keystrokes,
                                           WindowSpec spec = {});

/// Row-major n x 5 matrix of the non-sparse windows.
std::vector<std::array<double, kFeatureCount>> feature_matrix(const std::vector<FeatureWindow>& windows);

inline constexpr const char* kFeatureHeader =
    "Window start ms,Window end ms,avg_dwell time,std_dwell time,avg_flight time,std_flight time,"
    "Error rate,sparse";

void write_features(std::ostream& out, const std::vector<FeatureWindow>& windows);
void write_features(const std::filesystem::path& path, const std::vector<FeatureWindow>& windows);
std::vector<FeatureWindow> read_features(std::istream& in);
std::vector<FeatureWindow> read_features(const std::filesystem::path& path);

}  // namespace keydyn
