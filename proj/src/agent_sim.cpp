#include "keydyn/agent_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "keydyn/errors.hpp"

namespace keydyn {

std::string_view to_string(Hand hand) { return hand == Hand::left ? "left" : "right"; }

Hand parse_hand(std::string_view text) {
  if (text == "left") return Hand::left;
  if (text == "right") return Hand::right;
  throw std::invalid_argument("unknown dominant hand '" + std::string(text) + "'");
}

std::string_view to_string(Action action) { return action == Action::press ? "press" : "release"; }

Action parse_action(std::string_view text) {
  if (text == "press") return Action::press;
  if (text == "release") return Action::release;
  throw std::invalid_argument("unknown action '" + std::string(text) + "'");
}

void AgentProfile::validate() const {
  if (!(wpm > 0.0)) throw std::invalid_argument("wpm must be positive");
  if (!(error_rate >= 0.0 && error_rate < 1.0)) throw std::invalid_argument("error_rate must lie in [0, 1)");
  if (!(fatigue_factor >= 0.0 && fatigue_factor <= 0.01))
    throw std::invalid_argument("fatigue_factor must lie in [0, 0.01]");
  if (!(finger_agility > 0.0)) throw std::invalid_argument("finger_agility must be positive");
  if (!(keyboard.base_flight_ms > 0.0 && keyboard.base_dwell_ms > 0.0))
    throw std::invalid_argument("keyboard timings must be positive");
}

namespace {

constexpr std::array<Key, 28> kTypingKeys = [] {
  std::array<Key, 28> keys{};
  for (int i = 0; i < 26; ++i) keys[static_cast<std::size_t>(i)] = Key(static_cast<char>('a' + i));
  keys[26] = Key::space();
  keys[27] = Key::backspace();
  return keys;
}();

constexpr std::array<std::array<char, 2>, 10> kDigraphs{{
    {'t', 'h'}, {'h', 'e'}, {'i', 'n'}, {'e', 'r'}, {'a', 'n'},
    {'r', 'e'}, {'o', 'n'}, {'a', 't'}, {'e', 'n'}, {'n', 'd'},
}};

std::size_t typing_index(Key k) {
  if (k.code() >= 'a' && k.code() <= 'z') return static_cast<std::size_t>(k.code() - 'a');
  if (k == Key::space()) return 26;
  if (k.is_backspace()) return 27;
  throw InvalidKey("key '" + k.name() + "' is not a typing key");
}

double hand_factor(const KeyboardGeometry& geom, Hand dominant, Key a, Key b) {
  const auto sa = geom.side(a);
  const auto sb = geom.side(b);
  if (sa != sb || sa == HandSide::neutral) return 1.0;
  const bool on_dominant = (sa == HandSide::left) == (dominant == Hand::left);
  return on_dominant ? kDominantHandFactor : kOtherHandFactor;
}

/// Rounds to the 0.01 ms grid with the 1 ms floor applied first.
std::int64_t to_ticks(double ms) {
  return std::max<std::int64_t>(100, std::llround(std::max(ms, kMinDurationMs) * 100.0));
}

}  // namespace

std::span<const Key> typing_keys() { return kTypingKeys; }

std::span<const std::array<char, 2>> common_digraphs() { return kDigraphs; }

bool is_common_digraph(Key a, Key b) {
  return std::any_of(kDigraphs.begin(), kDigraphs.end(),
                     [&](const auto& d) { return d[0] == a.code() && d[1] == b.code(); });
}

const PersonalMatrix::Entry& PersonalMatrix::at(Key from, Key to) const {
  return entries_.at(typing_index(from) * kTypingKeys.size() + typing_index(to));
}

PersonalMatrix build_personal_matrix(const AgentProfile& profile, const KeyboardGeometry& geom,
                                     RandomStream& rng) {
  profile.validate();
  PersonalMatrix m;
  m.entries_.reserve(kTypingKeys.size() * kTypingKeys.size());
  for (auto a : kTypingKeys) {
    for (auto b : kTypingKeys) {
      PersonalMatrix::Entry e;
      e.base = std::clamp(rng.normal(kPersonalBaseMean, kPersonalBaseSd), kPersonalBaseMin,
                          kPersonalBaseMax);
      e.hand = hand_factor(geom, profile.dominant_hand, a, b);
      e.digraph = is_common_digraph(a, b) ? kDigraphFactor : 1.0;
      e.factor = e.base * e.hand * e.digraph;
      m.entries_.push_back(e);
    }
  }
  return m;
}

PersonalMatrix uniform_personal_matrix() {
  PersonalMatrix m;
  m.entries_.assign(kTypingKeys.size() * kTypingKeys.size(), PersonalMatrix::Entry{});
  return m;
}

SimState SimState::initial(const AgentProfile& profile) {
  SimState s;
  s.wpm_base = profile.wpm;
  s.wpm_current = profile.wpm;
  return s;
}

double fatigued_wpm(double wpm_base, double fatigue) {
  return wpm_base * (1.0 - kFatigueSlowdown * fatigue * fatigue);
}

SimState update_fatigue(SimState state, double increment) {
  state.fatigue = std::min(1.0, state.fatigue + increment);
  state.wpm_current = fatigued_wpm(state.wpm_base, state.fatigue);
  return state;
}

double flight_duration(const SimConfig& cfg, const AgentProfile& profile, const SimState& state,
                       double distance, double personal_factor, RandomStream& rng) {
  const double base = profile.keyboard.base_flight_ms * (kReferenceWpm / state.wpm_current) /
                      profile.finger_agility;
  double noise = rng.normal(cfg.noise_mean, cfg.noise_sd);
  while (noise <= 0.0) noise = rng.normal(cfg.noise_mean, cfg.noise_sd);
  const double phi2 = state.fatigue * state.fatigue;
  const double flight =
      base * (0.5 + distance / 2.0) * personal_factor * (1.0 + kFatigueFlightGain * phi2) * noise;
  return std::max(kMinDurationMs, flight);
}

double flight_time(const SimConfig& cfg, const AgentProfile& profile, const PersonalMatrix& matrix,
                   const SimState& state, Key from, Key to, RandomStream& rng) {
  const double distance = from == to ? cfg.repeated_key_distance
                                     : key_distance(KeyboardGeometry::qwerty(), from, to);
  return flight_duration(cfg, profile, state, distance, matrix.factor(from, to), rng);
}

double dwell_time(const SimConfig& cfg, const KeyboardModel& keyboard, Key key, RandomStream& rng) {
  const double d = key.is_backspace()
                       ? rng.normal(cfg.backspace_dwell_mean_ms, cfg.backspace_dwell_sd_ms)
                       : rng.normal(keyboard.base_dwell_ms, cfg.dwell_sd_ms);
  return std::max(kMinDurationMs, d);
}

std::vector<KeystrokeEvent> simulate_session(const Agent& agent, int n_chars, const SimConfig& cfg,
                                             const FrequencyTable& text) {
  if (n_chars < 1) throw std::invalid_argument("n_chars must be at least 1");
  const auto& profile = agent.profile;
  profile.validate();
  const auto& geom = KeyboardGeometry::qwerty();

  RandomStream rng(cfg.seed);
  SimState state = SimState::initial(profile);
  std::int64_t clock = 0;  // 0.01 ms ticks

  std::vector<KeystrokeEvent> events;
  events.reserve(static_cast<std::size_t>(n_chars) * 2 + 16);

  std::vector<Key> pool;
  for (auto k : kTypingKeys) {
    if (!k.is_backspace()) pool.push_back(k);
  }

  auto strike = [&](Key key) {
    if (state.prev_key) {
      clock += to_ticks(flight_time(cfg, profile, agent.matrix, state, *state.prev_key, key, rng));
    }
    const std::int64_t press = clock;
    clock += to_ticks(dwell_time(cfg, profile.keyboard, key, rng));
    events.push_back({static_cast<double>(press) / 100.0, key, Action::press, profile});
    events.push_back({static_cast<double>(clock) / 100.0, key, Action::release, profile});
    state.prev_key = key;
    state.clock_ms = static_cast<double>(clock) / 100.0;
  };

  for (int i = 0; i < n_chars; ++i) {
    const Key intended = sample_character(text, rng);
    const bool mistype = rng.uniform() < profile.error_rate;
    if (mistype) {
      const auto candidates = geom.neighbours(intended, cfg.error_neighbour_radius, pool);
      if (!candidates.empty()) {
        strike(candidates[rng.index(candidates.size())]);
        strike(Key::backspace());
      }
    }
    strike(intended);
    state = update_fatigue(state, profile.fatigue_factor);
  }
  return events;
}

std::vector<KeystrokeEvent> simulate_session(const AgentProfile& profile, int n_chars,
                                             const SimConfig& cfg) {
  RandomStream pattern_rng(derive_seed(cfg.seed, {tag_hash("personal-matrix")}));
  Agent agent{profile, build_personal_matrix(profile, KeyboardGeometry::qwerty(), pattern_rng)};
  return simulate_session(agent, n_chars, cfg);
}

}  // namespace keydyn
