#include "keydyn/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "keydyn/errors.hpp"

namespace keydyn {

using nlohmann::json;

ProfileRanges ProfileRanges::defaults() {
  return {{
      {1, {50.0, 55.0}, {0.03, 0.04}, {1e-4, 3e-4}, {0.9, 1.0}, Hand::left},
      {2, {65.0, 70.0}, {0.01, 0.03}, {1.5e-3, 3e-3}, {1.0, 1.1}, Hand::right},
      {3, {40.0, 45.0}, {0.02, 0.03}, {1e-4, 3e-4}, {0.8, 0.9}, Hand::right},
      {4, {80.0, 85.0}, {0.08, 0.10}, {1e-4, 3e-4}, {1.2, 1.3}, Hand::right},
      {5, {30.0, 35.0}, {0.01, 0.02}, {1e-4, 3e-4}, {0.7, 0.8}, Hand::right},
  }};
}

void ProfileRanges::validate() const {
  if (users.empty()) throw std::invalid_argument("profile ranges list no users");
  std::set<int> ids;
  for (const auto& u : users) {
    if (!ids.insert(u.user_id).second)
      throw std::invalid_argument(fmt::format("duplicate user id {}", u.user_id));
    for (const Range* r : {&u.wpm, &u.error_rate, &u.fatigue_factor, &u.finger_agility}) {
      if (!(r->low <= r->high))
        throw std::invalid_argument(fmt::format("user {}: range low exceeds high", u.user_id));
    }
  }
}

std::vector<AgentProfile> instantiate_profiles(const ProfileRanges& ranges, std::uint64_t seed) {
  ranges.validate();
  auto users = ranges.users;
  std::sort(users.begin(), users.end(),
            [](const UserRange& a, const UserRange& b) { return a.user_id < b.user_id; });

  RandomStream rng(derive_seed(seed, {tag_hash("profiles")}));
  std::vector<AgentProfile> out;
  for (const auto& u : users) {
    AgentProfile p;
    p.agent_id = u.user_id;
    p.wpm = rng.uniform(u.wpm.low, u.wpm.high);
    p.error_rate = rng.uniform(u.error_rate.low, u.error_rate.high);
    p.fatigue_factor = rng.uniform(u.fatigue_factor.low, u.fatigue_factor.high);
    p.finger_agility = rng.uniform(u.finger_agility.low, u.finger_agility.high);
    p.dominant_hand = u.dominant_hand;
    p.keyboard = KeyboardModel::for_kind(KeyboardKind::laptop);
    p.validate();
    out.push_back(p);
  }
  return out;
}

Agent make_agent(const AgentProfile& profile, std::uint64_t seed) {
  RandomStream rng(derive_seed(seed, {tag_hash("personal-matrix"),
                                      static_cast<std::uint64_t>(profile.agent_id)}));
  return {profile, build_personal_matrix(profile, KeyboardGeometry::qwerty(), rng)};
}

std::uint64_t session_seed(std::uint64_t seed, int user_id, KeyboardKind keyboard, int session) {
  return derive_seed(seed, {tag_hash("session"), static_cast<std::uint64_t>(user_id),
                            static_cast<std::uint64_t>(keyboard),
                            static_cast<std::uint64_t>(session)});
}

// ---------------------------------------------------------------------------

std::string format_timestamp(double ms) {
  const long long ticks = std::llround(ms * 100.0);
  const long long whole = ticks / 100;
  const long long frac = ticks % 100;
  if (frac == 0) return fmt::format("{}", whole);
  if (frac % 10 == 0) return fmt::format("{}.{}", whole, frac / 10);
  return fmt::format("{}.{:02}", whole, frac);
}

namespace {

std::string agent_label(int id) { return fmt::format("user{}", id); }

std::string profile_columns(const AgentProfile& p) {
  return fmt::format("{},{},{},{},{},{},{}", to_string(p.keyboard.kind), agent_label(p.agent_id),
                     p.wpm, p.error_rate, p.fatigue_factor, p.finger_agility,
                     to_string(p.dominant_hand));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s, std::size_t row, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(fmt::format("column '{}': '{}' is not a number", column, s), row);
  return v;
}

int parse_agent_id(std::string_view s, std::size_t row) {
  std::string_view digits = s.starts_with("user") ? s.substr(4) : s;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    throw SchemaError(fmt::format("column 'Agent id': '{}' is not an agent id", s), row);
  return v;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

void write_session(std::ostream& out, const std::vector<KeystrokeEvent>& events) {
  out << kSessionHeader << '\n';
  for (const auto& e : events) {
    out << format_timestamp(e.timestamp_ms) << ',' << e.key.name() << ',' << to_string(e.action)
        << ',' << profile_columns(e.profile) << '\n';
  }
}

void write_session(const std::filesystem::path& path, const std::vector<KeystrokeEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_session(out, events);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<KeystrokeEvent> read_session(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty session file", 1);
  if (trim_cr(line) != kSessionHeader) throw SchemaError("header does not match session schema", 1);

  std::vector<KeystrokeEvent> events;
  std::map<Key, std::size_t> open_presses;  // key -> row of pending press
  std::size_t row = 1;
  double last_ts = -1.0;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim_cr(line);
    if (text.empty()) continue;
    const auto cols = split(text, ',');
    if (cols.size() != 10)
      throw SchemaError(fmt::format("expected 10 columns, found {}", cols.size()), row);

    KeystrokeEvent e;
    e.timestamp_ms = parse_double(cols[0], row, "Timestamp (ms)");
    if (e.timestamp_ms < last_ts) throw SchemaError("timestamps decrease", row);
    last_ts = e.timestamp_ms;
    try {
      e.key = Key::parse(cols[1]);
      e.action = parse_action(cols[2]);
      e.profile.keyboard = KeyboardModel::for_kind(parse_keyboard_kind(cols[3]));
      e.profile.dominant_hand = parse_hand(cols[9]);
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(ex.what(), row);
    }
    e.profile.agent_id = parse_agent_id(cols[4], row);
    e.profile.wpm = parse_double(cols[5], row, "wpm");
    e.profile.error_rate = parse_double(cols[6], row, "Error rate");
    e.profile.fatigue_factor = parse_double(cols[7], row, "Fatigue factor");
    e.profile.finger_agility = parse_double(cols[8], row, "Finger agility");

    if (e.action == Action::press) {
      if (open_presses.contains(e.key))
        throw SchemaError("press of '" + e.key.name() + "' before its previous release", row);
      open_presses[e.key] = row;
    } else {
      if (!open_presses.erase(e.key))
        throw SchemaError("release of '" + e.key.name() + "' without a press", row);
    }
    events.push_back(e);
  }
  if (events.empty()) throw SchemaError("session file has no events", row);
  if (!open_presses.empty()) {
    const auto& [key, press_row] = *std::min_element(
        open_presses.begin(), open_presses.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    throw SchemaError("press of '" + key.name() + "' is never released", press_row);
  }
  return events;
}

std::vector<KeystrokeEvent> read_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_session(in);
}

// ---------------------------------------------------------------------------

std::string SessionEntry::label() const {
  return fmt::format("U{} {}-{}", user_id, keyboard == KeyboardKind::laptop ? 'L' : 'M', session);
}

const SessionEntry* Manifest::find(int user_id, KeyboardKind keyboard, int session) const {
  for (const auto& s : sessions) {
    if (s.user_id == user_id && s.keyboard == keyboard && s.session == session) return &s;
  }
  return nullptr;
}

const SessionEntry& Manifest::at(int user_id, KeyboardKind keyboard, int session) const {
  if (const auto* e = find(user_id, keyboard, session)) return *e;
  throw ManifestError(fmt::format("manifest has no session for user {} on {} keyboard, session {}",
                                  user_id, to_string(keyboard), session));
}

std::vector<int> Manifest::user_ids() const {
  std::set<int> ids;
  for (const auto& s : sessions) ids.insert(s.user_id);
  return {ids.begin(), ids.end()};
}

namespace {

json profile_to_json(const AgentProfile& p) {
  return {{"agent_id", p.agent_id},
          {"wpm", p.wpm},
          {"error_rate", p.error_rate},
          {"keyboard", std::string(to_string(p.keyboard.kind))},
          {"fatigue_factor", p.fatigue_factor},
          {"finger_agility", p.finger_agility},
          {"dominant_hand", std::string(to_string(p.dominant_hand))}};
}

AgentProfile profile_from_json(const json& j) {
  AgentProfile p;
  p.agent_id = j.at("agent_id").get<int>();
  p.wpm = j.at("wpm").get<double>();
  p.error_rate = j.at("error_rate").get<double>();
  p.keyboard = KeyboardModel::for_kind(parse_keyboard_kind(j.at("keyboard").get<std::string>()));
  p.fatigue_factor = j.at("fatigue_factor").get<double>();
  p.finger_agility = j.at("finger_agility").get<double>();
  p.dominant_hand = parse_hand(j.at("dominant_hand").get<std::string>());
  return p;
}

}  // namespace

void Manifest::save(const std::filesystem::path& path) const {
  json sessions_json = json::array();
  for (const auto& s : sessions) {
    sessions_json.push_back({{"user_id", s.user_id},
                             {"keyboard", std::string(to_string(s.keyboard))},
                             {"session", s.session},
                             {"events", s.events_path},
                             {"features", s.features_path},
                             {"profile", profile_to_json(s.profile)}});
  }
  const json doc = {{"seed", seed},
                    {"n_chars", n_chars},
                    {"sessions_per_keyboard", sessions_per_keyboard},
                    {"sessions", sessions_json}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
    Manifest m;
    m.root = path.parent_path();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.n_chars = doc.at("n_chars").get<int>();
    m.sessions_per_keyboard = doc.at("sessions_per_keyboard").get<int>();
    for (const auto& s : doc.at("sessions")) {
      SessionEntry e;
      e.user_id = s.at("user_id").get<int>();
      e.keyboard = parse_keyboard_kind(s.at("keyboard").get<std::string>());
      e.session = s.at("session").get<int>();
      e.events_path = s.at("events").get<std::string>();
      e.features_path = s.at("features").get<std::string>();
      e.profile = profile_from_json(s.at("profile"));
      m.sessions.push_back(std::move(e));
    }
    if (m.sessions.empty()) throw ManifestError("manifest '" + path.string() + "' lists no sessions");
    return m;
  } catch (const json::exception& ex) {
    throw ManifestError("malformed manifest '" + path.string() + "': " + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ManifestError("malformed manifest '" + path.string() + "': " + ex.what());
  }
}

Manifest generate_grid(const std::vector<AgentProfile>& profiles, int sessions_per_keyboard,
                       int n_chars, std::uint64_t seed, const std::filesystem::path& out_dir) {
  if (profiles.empty()) throw std::invalid_argument("generate_grid needs at least one profile");
  if (sessions_per_keyboard < 1) throw std::invalid_argument("sessions_per_keyboard must be >= 1");

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "sessions", ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  Manifest m;
  m.seed = seed;
  m.n_chars = n_chars;
  m.sessions_per_keyboard = sessions_per_keyboard;
  m.root = out_dir;

  for (const auto& base : profiles) {
    const Agent agent = make_agent(base, seed);
    for (auto kind : {KeyboardKind::laptop, KeyboardKind::mechanical}) {
      Agent on_board = agent;
      on_board.profile.keyboard = KeyboardModel::for_kind(kind);
      for (int s = 1; s <= sessions_per_keyboard; ++s) {
        SimConfig cfg;
        cfg.seed = session_seed(seed, base.agent_id, kind, s);
        const auto events = simulate_session(on_board, n_chars, cfg);

        SessionEntry e;
        e.user_id = base.agent_id;
        e.keyboard = kind;
        e.session = s;
        e.profile = on_board.profile;
        const auto stem = fmt::format("user{}_{}_s{}", base.agent_id, to_string(kind), s);
        e.events_path = "sessions/" + stem + ".csv";
        e.features_path = "features/" + stem + ".csv";
        write_session(m.events_file(e), events);
        m.sessions.push_back(std::move(e));
      }
    }
  }
  m.save(out_dir / kManifestName);
  return m;
}

}  // namespace keydyn
