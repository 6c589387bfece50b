#include "keydyn/experiment.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace keydyn {

using nlohmann::json;

namespace {

json range_json(const Range& r) { return json::array({r.low, r.high}); }

Range range_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be [low, high]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  json users = json::array();
  for (const auto& u : profiles.users) {
    users.push_back({{"user_id", u.user_id},
                     {"wpm", range_json(u.wpm)},
                     {"error_rate", range_json(u.error_rate)},
                     {"fatigue_factor", range_json(u.fatigue_factor)},
                     {"finger_agility", range_json(u.finger_agility)},
                     {"dominant_hand", std::string(to_string(u.dominant_hand))}});
  }
  json ocsvm_json = {{"nu", ocsvm.nu},
                     {"kernel_width", ocsvm.kernel_width ? json(*ocsvm.kernel_width) : json("median")},
                     {"scaling", std::string(to_string(ocsvm.scaling))}};
  json rf_json = {{"n_estimators", rf.forest.n_estimators},
                  {"max_depth", rf.forest.max_depth},
                  {"min_samples_split", rf.forest.min_samples_split},
                  {"min_samples_leaf", rf.forest.min_samples_leaf},
                  {"max_features", rf.forest.max_features > 0 ? json(rf.forest.max_features) : json("sqrt")},
                  {"bootstrap", rf.forest.bootstrap},
                  {"folds", rf.folds},
                  {"threshold", rf.threshold}};
  const json doc = {{"seed", seed},
                    {"out", out_dir.string()},
                    {"n_chars", n_chars},
                    {"sessions_per_keyboard", sessions_per_keyboard},
                    {"profiles", users},
                    {"ocsvm", ocsvm_json},
                    {"rf", rf_json}};
  return doc.dump(2) + '\n';
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    const json doc = json::parse(text);
    reject_unknown(doc, {"seed", "out", "n_chars", "sessions_per_keyboard", "profiles", "ocsvm", "rf"}, "config");
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out")) c.out_dir = doc["out"].get<std::string>();
    if (doc.contains("n_chars")) c.n_chars = doc["n_chars"].get<int>();
    if (doc.contains("sessions_per_keyboard")) c.sessions_per_keyboard = doc["sessions_per_keyboard"].get<int>();
    if (doc.contains("profiles")) {
      c.profiles.users.clear();
      for (const auto& u : doc["profiles"]) {
        reject_unknown(u, {"user_id", "wpm", "error_rate", "fatigue_factor", "finger_agility", "dominant_hand"},
                       "profile");
        UserRange r;
        r.user_id = u.at("user_id").get<int>();
        r.wpm = range_from(u.at("wpm"));
        r.error_rate = range_from(u.at("error_rate"));
        r.fatigue_factor = range_from(u.at("fatigue_factor"));
        r.finger_agility = range_from(u.at("finger_agility"));
        r.dominant_hand = parse_hand(u.at("dominant_hand").get<std::string>());
        c.profiles.users.push_back(r);
      }
    }
    if (doc.contains("ocsvm")) {
      const auto& o = doc["ocsvm"];
      reject_unknown(o, {"nu", "kernel_width", "scaling"}, "ocsvm");
      if (o.contains("nu")) c.ocsvm.nu = o["nu"].get<double>();
      if (o.contains("kernel_width")) {
        if (o["kernel_width"].is_string()) {
          if (o["kernel_width"].get<std::string>() != "median")
            throw std::invalid_argument("kernel_width must be a number or \"median\"");
          c.ocsvm.kernel_width.reset();
        } else {
          c.ocsvm.kernel_width = o["kernel_width"].get<double>();
        }
      }
      if (o.contains("scaling")) c.ocsvm.scaling = parse_scaling_mode(o["scaling"].get<std::string>());
    }
    if (doc.contains("rf")) {
      const auto& r = doc["rf"];
      reject_unknown(r, {"n_estimators", "max_depth", "min_samples_split", "min_samples_leaf", "max_features",
                         "bootstrap", "folds", "threshold"},
                     "rf");
      if (r.contains("n_estimators")) c.rf.forest.n_estimators = r["n_estimators"].get<int>();
      if (r.contains("max_depth")) c.rf.forest.max_depth = r["max_depth"].get<int>();
      if (r.contains("min_samples_split")) c.rf.forest.min_samples_split = r["min_samples_split"].get<int>();
      if (r.contains("min_samples_leaf")) c.rf.forest.min_samples_leaf = r["min_samples_leaf"].get<int>();
      if (r.contains("max_features")) {
        if (r["max_features"].is_string()) {
          if (r["max_features"].get<std::string>() != "sqrt")
            throw std::invalid_argument("max_features must be an integer or \"sqrt\"");
          c.rf.forest.max_features = 0;
        } else {
          c.rf.forest.max_features = r["max_features"].get<int>();
        }
      }
      if (r.contains("bootstrap")) c.rf.forest.bootstrap = r["bootstrap"].get<bool>();
      if (r.contains("folds")) c.rf.folds = r["folds"].get<int>();
      if (r.contains("threshold")) c.rf.threshold = r["threshold"].get<double>();
    }
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("malformed config: ") + ex.what());
  }
  c.profiles.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_json();
}

std::vector<FeatureWindow> session_features(const std::filesystem::path& events_csv) {
  return extract_windows(pair_events(read_session(events_csv)));
}

const FeatureRows& FeatureStore::rows(const SessionEntry& entry) {
  const auto key = entry.label();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const auto path = manifest_.features_file(entry);
  const auto windows = std::filesystem::exists(path) ? read_features(path)
                                                     : session_features(manifest_.events_file(entry));
  return cache_.emplace(key, feature_matrix(windows)).first->second;
}

}  // namespace keydyn
