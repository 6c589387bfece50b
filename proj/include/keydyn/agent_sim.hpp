#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "keydyn/keyboard.hpp"
#include "keydyn/rng.hpp"
#include "keydyn/text.hpp"

namespace keydyn {

enum class Hand { left, right };

std::string_view to_string(Hand hand);
Hand parse_hand(std::string_view text);

/// One simulated typist on one keyboard.
struct AgentProfile {
  int agent_id = 1;
  double wpm = 40.0;
  double error_rate = 0.0;       ///< probability of a wrong key per intended character
  KeyboardModel keyboard;
  double fatigue_factor = 0.0;   ///< fatigue increment per intended character
  double finger_agility = 1.0;
  Hand dominant_hand = Hand::right;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Keys the simulator can emit: the generator alphabet plus backspace.
std::span<const Key> typing_keys();

/// Per-agent efficiency multiplier for every ordered pair of typing keys.
/// factor = base * hand * digraph, with each component kept for auditing.
class PersonalMatrix {
 public:
  struct Entry {
    double base = 1.0;
    double hand = 1.0;
    double digraph = 1.0;
    double factor = 1.0;
    bool operator==(const Entry&) const = default;
  };

  const Entry& at(Key from, Key to) const;
  double factor(Key from, Key to) const { return at(from, to).factor; }

  /// Row-major over typing_keys() x typing_keys().
  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const PersonalMatrix&) const = default;

 private:
  std::vector<Entry> entries_;
  friend PersonalMatrix build_personal_matrix(const AgentProfile&, const KeyboardGeometry&,
                                              RandomStream&);
  friend PersonalMatrix uniform_personal_matrix();
};

inline constexpr double kPersonalBaseMean = 1.0;
inline constexpr double kPersonalBaseSd = 0.15;
inline constexpr double kPersonalBaseMin = 0.7;
inline constexpr double kPersonalBaseMax = 1.3;
inline constexpr double kDominantHandFactor = 0.9;
inline constexpr double kOtherHandFactor = 1.05;
inline constexpr double kDigraphFactor = 0.85;

/// The embedded common-digraph list.
std::span<const std::array<char, 2>> common_digraphs();
bool is_common_digraph(Key a, Key b);

/// Draws base variations in row-major order over typing_keys().
PersonalMatrix build_personal_matrix(const AgentProfile& profile, const KeyboardGeometry& geom,
                                     RandomStream& rng);
/// Every factor equal to 1; handy for isolating the other flight-time terms.
PersonalMatrix uniform_personal_matrix();

struct SimConfig {
  std::uint64_t seed = 0;
  double noise_mean = 1.0;
  double noise_sd = 0.05;
  double dwell_sd_ms = 5.0;
  double backspace_dwell_mean_ms = 40.0;
  double backspace_dwell_sd_ms = 3.0;
  double repeated_key_distance = kRepeatedKeyDistance;
  /// Wrong keys are drawn uniformly among typing keys within this grid radius.
  double error_neighbour_radius = 1.5;
};

inline constexpr double kReferenceWpm = 40.0;
inline constexpr double kFatigueSlowdown = 0.3;
inline constexpr double kFatigueFlightGain = 0.4;
inline constexpr double kMinDurationMs = 1.0;

struct SimState {
  double fatigue = 0.0;
  double wpm_base = 40.0;
  double wpm_current = 40.0;
  double clock_ms = 0.0;
  std::optional<Key> prev_key;

  static SimState initial(const AgentProfile& profile);
};

/// Fatigue accumulation with clamp at 1 and the quadratic speed loss.
SimState update_fatigue(SimState state, double increment);
double fatigued_wpm(double wpm_base, double fatigue);

/// The flight formula with distance and personal factor supplied directly.
double flight_duration(const SimConfig& cfg, const AgentProfile& profile, const SimState& state,
                       double distance, double personal_factor, RandomStream& rng);

/// Release-to-press gap from k_from to k_to:
///   base_flight * (40 / wpm_current) / agility * (0.5 + D/2) * P * (1 + 0.4 phi^2) * N
/// with N ~ Normal(noise_mean, noise_sd) redrawn until positive; clamped >= 1 ms.
double flight_time(const SimConfig& cfg, const AgentProfile& profile, const PersonalMatrix& matrix,
                   const SimState& state, Key from, Key to, RandomStream& rng);

/// Hold duration; backspace uses its own faster distribution. Clamped >= 1 ms.
double dwell_time(const SimConfig& cfg, const KeyboardModel& keyboard, Key key, RandomStream& rng);

enum class Action { press, release };

std::string_view to_string(Action action);
Action parse_action(std::string_view text);

struct KeystrokeEvent {
  double timestamp_ms = 0.0;
  Key key;
  Action action = Action::press;
  AgentProfile profile;

  bool operator==(const KeystrokeEvent& o) const {
    return timestamp_ms == o.timestamp_ms && key == o.key && action == o.action;
  }
};

/// Agent identity that persists across sessions and keyboards.
struct Agent {
  AgentProfile profile;
  PersonalMatrix matrix;
};

/// Simulates typing n_chars intended characters. Timestamps are quantised to
/// 0.01 ms so the CSV rendering is exact. The session stream is seeded from
/// cfg.seed; the personal matrix belongs to the agent.
std::vector<KeystrokeEvent> simulate_session(const Agent& agent, int n_chars, const SimConfig& cfg,
                                             const FrequencyTable& text = FrequencyTable::english());

/// Convenience overload: the personal matrix is drawn from cfg.seed as well.
std::vector<KeystrokeEvent> simulate_session(const AgentProfile& profile, int n_chars,
                                             const SimConfig& cfg);

}  // namespace keydyn
