#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "keydyn/agent_sim.hpp"

namespace keydyn {

struct Range {
  double low = 0.0;
  double high = 0.0;
};

struct UserRange {
  int user_id = 1;
  Range wpm;
  Range error_rate;
  Range fatigue_factor;
  Range finger_agility;
  Hand dominant_hand = Hand::right;
};

/// Per-user parameter ranges; defaults reproduce the five reference typists.
struct ProfileRanges {
  std::vector<UserRange> users;

  static ProfileRanges defaults();
  void validate() const;
};

/// Draws one profile per user, ascending id, fields in order wpm, error rate,
/// fatigue factor, agility. The keyboard field is left at laptop.
std::vector<AgentProfile> instantiate_profiles(const ProfileRanges& ranges, std::uint64_t seed);

/// Personal matrix seeded by (seed, user) so it is shared by all of a user's sessions.
Agent make_agent(const AgentProfile& profile, std::uint64_t seed);

std::uint64_t session_seed(std::uint64_t seed, int user_id, KeyboardKind keyboard, int session);

// ---------------------------------------------------------------------------
// Session CSV

inline constexpr const char* kSessionHeader =
    "Timestamp (ms),Key,Action,Keyboard type,Agent id,wpm,Error rate,Fatigue factor,"
    "Finger agility,Dominant hand";

/// 0.01 ms resolution with trailing zeros dropped: 0, 53.37, 174, 220.8.
std::string format_timestamp(double ms);

void write_session(std::ostream& out, const std::vector<KeystrokeEvent>& events);
void write_session(const std::filesystem::path& path, const std::vector<KeystrokeEvent>& events);

/// Validates header, column count, monotone timestamps and press/release
/// matching; throws SchemaError with the 1-based file row on failure.
std::vector<KeystrokeEvent> read_session(std::istream& in);
std::vector<KeystrokeEvent> read_session(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Manifest

struct SessionEntry {
  int user_id = 1;
  KeyboardKind keyboard = KeyboardKind::laptop;
  int session = 1;
  std::string events_path;    ///< relative to the manifest directory
  std::string features_path;  ///< relative to the manifest directory
  AgentProfile profile;

  /// "U1 L-1" style label.
  std::string label() const;
};

struct Manifest {
  std::uint64_t seed = 0;
  int n_chars = 0;
  int sessions_per_keyboard = 0;
  std::vector<SessionEntry> sessions;
  std::filesystem::path root;  ///< directory holding manifest.json; not serialised

  const SessionEntry* find(int user_id, KeyboardKind keyboard, int session) const;
  /// Throws ManifestError if absent.
  const SessionEntry& at(int user_id, KeyboardKind keyboard, int session) const;
  std::vector<int> user_ids() const;

  std::filesystem::path events_file(const SessionEntry& e) const { return root / e.events_path; }
  std::filesystem::path features_file(const SessionEntry& e) const { return root / e.features_path; }

  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Simulates users x {laptop, mechanical} x sessions and writes one CSV per
/// session plus manifest.json under out_dir.
Manifest generate_grid(const std::vector<AgentProfile>& profiles, int sessions_per_keyboard,
                       int n_chars, std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace keydyn
