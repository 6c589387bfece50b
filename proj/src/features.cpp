#include "keydyn/features.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "keydyn/errors.hpp"

namespace keydyn {

std::vector<Keystroke> pair_events(const std::vector<KeystrokeEvent>& events) {
  std::vector<Keystroke> out;
  std::map<Key, std::size_t> open;  // key -> index into out
  for (const auto& e : events) {
    if (e.action == Action::press) {
      if (open.contains(e.key)) {
        throw PairingError(fmt::format("press of '{}' at {} ms while still held", e.key.name(),
                                       e.timestamp_ms),
                           e.timestamp_ms);
      }
      open[e.key] = out.size();
      out.push_back({e.key, e.timestamp_ms, e.timestamp_ms});
    } else {
      const auto it = open.find(e.key);
      if (it == open.end()) {
        throw PairingError(fmt::format("release of '{}' at {} ms without a press", e.key.name(),
                                       e.timestamp_ms),
                           e.timestamp_ms);
      }
      out[it->second].release_ms = e.timestamp_ms;
      open.erase(it);
    }
  }
  if (!open.empty()) {
    const auto& ks = out[std::min_element(open.begin(), open.end(), [](const auto& a, const auto& b) {
                           return a.second < b.second;
                         })->second];
    throw PairingError(fmt::format("press of '{}' at {} ms is never released", ks.key.name(),
                                   ks.press_ms),
                       ks.press_ms);
  }
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments population_moments(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

}  // namespace

std::vector<FeatureWindow> extract_windows(const std::vector<Keystroke>& keystrokes, WindowSpec spec) {
  std::vector<FeatureWindow> out;
  if (keystrokes.empty()) return out;

  double last_event = 0.0;
  for (const auto& k : keystrokes) last_event = std::max(last_event, k.release_ms);

  std::vector<double> dwells;
  std::vector<double> flights;
  std::size_t first = 0;  // first keystroke whose press may still fall in a window
  for (long long w = 0;; ++w) {
    const double start = static_cast<double>(w) * spec.step_ms;
    const double end = start + spec.window_ms;
    if (end > last_event) break;

    while (first < keystrokes.size() && keystrokes[first].press_ms < start) ++first;
    dwells.clear();
    flights.clear();
    std::size_t backspaces = 0;
    for (std::size_t i = first; i < keystrokes.size() && keystrokes[i].press_ms < end; ++i) {
      dwells.push_back(keystrokes[i].dwell_ms());
      if (i > 0) flights.push_back(keystrokes[i].press_ms - keystrokes[i - 1].release_ms);
      if (keystrokes[i].key.is_backspace()) ++backspaces;
    }

    FeatureWindow fw;
    fw.window_start_ms = start;
    fw.window_end_ms = end;
    const auto d = population_moments(dwells);
    const auto f = population_moments(flights);
    fw.avg_dwell = d.mean;
    fw.std_dwell = d.sd;
    fw.avg_flight = f.mean;
    fw.std_flight = f.sd;
    fw.error_rate_pct =
        dwells.empty() ? 0.0 : 100.0 * static_cast<double>(backspaces) / static_cast<double>(dwells.size());
    fw.sparse = dwells.size() < 2;
    out.push_back(fw);
  }
  return out;
}

std::vector<std::array<double, kFeatureCount>> feature_matrix(const std::vector<FeatureWindow>& windows) {
  std::vector<std::array<double, kFeatureCount>> rows;
  rows.reserve(windows.size());
  for (const auto& w : windows) {
    if (!w.sparse) rows.push_back(w.values());
  }
  return rows;
}

void write_features(std::ostream& out, const std::vector<FeatureWindow>& windows) {
  out << kFeatureHeader << '\n';
  for (const auto& w : windows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", w.window_start_ms, w.window_end_ms, w.avg_dwell,
                       w.std_dwell, w.avg_flight, w.std_flight, w.error_rate_pct, w.sparse ? 1 : 0);
  }
}

void write_features(const std::filesystem::path& path, const std::vector<FeatureWindow>& windows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_features(out, windows);
}

std::vector<FeatureWindow> read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty feature file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFeatureHeader) throw SchemaError("header does not match feature schema", 1);

  std::vector<FeatureWindow> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 8> v{};
    std::size_t col = 0;
    std::string_view rest = line;
    while (true) {
      const auto pos = rest.find(',');
      const auto cell = rest.substr(0, pos);
      if (col >= v.size()) throw SchemaError("too many columns", row);
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[col]);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw SchemaError(fmt::format("'{}' is not a number", cell), row);
      ++col;
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (col != v.size()) throw SchemaError(fmt::format("expected 8 columns, found {}", col), row);
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7] != 0.0});
  }
  return out;
}

std::vector<FeatureWindow> read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_features(in);
}

}  // namespace keydyn
