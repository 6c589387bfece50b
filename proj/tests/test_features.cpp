#include <doctest.h>

#include <cmath>
#include <sstream>

#include "keydyn/dataset.hpp"
#include "keydyn/errors.hpp"
#include "keydyn/features.hpp"

using namespace keydyn;

namespace {

KeystrokeEvent ev(double t, char c, Action a) {
  KeystrokeEvent e;
  e.timestamp_ms = t;
  e.key = c == '<' ? Key::backspace() : Key(c);
  e.action = a;
  return e;
}

Keystroke ks(char c, double press, double release) {
  return {c == '<' ? Key::backspace() : Key(c), press, release};
}

std::vector<Keystroke> simulated(int n_chars, std::uint64_t seed) {
  AgentProfile p;
  p.wpm = 65.0;
  p.error_rate = 0.03;
  p.fatigue_factor = 0.002;
  p.finger_agility = 1.05;
  SimConfig cfg;
  cfg.seed = seed;
  return pair_events(simulate_session(p, n_chars, cfg));
}

}  // namespace

TEST_CASE("pairing the sample rows") {
  const std::vector<KeystrokeEvent> events{ev(0, 'o', Action::press), ev(53.37, 'o', Action::release),
                                           ev(174, 't', Action::press), ev(220.82, 't', Action::release)};
  const auto k = pair_events(events);
  REQUIRE(k.size() == 2);
  CHECK(k[0].dwell_ms() == doctest::Approx(53.37).epsilon(1e-12));
  CHECK(k[1].dwell_ms() == doctest::Approx(46.82).epsilon(1e-12));
  CHECK(pair_events({}).empty());
}

TEST_CASE("rollover pairs by key") {
  const std::vector<KeystrokeEvent> events{ev(0, 'a', Action::press), ev(30, 'b', Action::press),
                                           ev(50, 'a', Action::release), ev(90, 'b', Action::release)};
  const auto k = pair_events(events);
  REQUIRE(k.size() == 2);
  CHECK(k[0].key == Key('a'));
  CHECK(k[0].dwell_ms() == 50.0);
  CHECK(k[1].key == Key('b'));
  CHECK(k[1].dwell_ms() == 60.0);
}

TEST_CASE("orphans are pairing errors") {
  CHECK_THROWS_AS(pair_events({ev(0, 'a', Action::press)}), PairingError);
  CHECK_THROWS_AS(pair_events({ev(5, 'a', Action::release)}), PairingError);
  try {
    pair_events({ev(0, 'a', Action::press), ev(10, 'a', Action::release), ev(12, 'q', Action::release)});
    FAIL("expected a pairing error");
  } catch (const PairingError& e) {
    CHECK(e.timestamp_ms() == 12.0);
  }
}

TEST_CASE("three backspaces in eight keystrokes") {
  std::vector<Keystroke> k;
  const char keys[] = {'a', 'b', '<', 'c', '<', 'd', '<', 'e'};
  for (int i = 0; i < 8; ++i) k.push_back(ks(keys[i], i * 500.0, i * 500.0 + 50.0));
  k.push_back(ks('z', 6000.0, 6050.0));  // pushes the last release past the first window end
  const auto w = extract_windows(k);
  REQUIRE(!w.empty());
  CHECK(w[0].error_rate_pct == 37.5);
  CHECK(w[0].std_dwell == 0.0);
  CHECK(w[0].avg_dwell == 50.0);
  CHECK(w[0].avg_flight == 450.0);
  CHECK(w[0].std_flight == 0.0);
}

TEST_CASE("hand-built six-keystroke fixture") {
  // dwell: 40, 60, 50, 70, 30, 50; flights into members: 110, 90, 200, 150, 50
  const std::vector<Keystroke> k{ks('q', 0, 40),       ks('w', 150, 210),   ks('<', 300, 350),
                                 ks('e', 550, 620),    ks('r', 770, 800),   ks('t', 850, 900),
                                 ks('y', 5400, 5450)};
  const auto w = extract_windows(k);
  REQUIRE(w.size() == 1);
  CHECK(w[0].window_start_ms == 0.0);
  CHECK(w[0].window_end_ms == 5000.0);
  CHECK(w[0].avg_dwell == doctest::Approx(50.0).epsilon(1e-15));
  // population variance of {40,60,50,70,30,50} = (100+100+0+400+400+0)/6
  CHECK(w[0].std_dwell == doctest::Approx(std::sqrt(1000.0 / 6.0)).epsilon(1e-14));
  // flights {110,90,200,150,50}: mean 120, variance (100+900+6400+900+4900)/5
  CHECK(w[0].avg_flight == doctest::Approx(120.0).epsilon(1e-15));
  CHECK(w[0].std_flight == doctest::Approx(std::sqrt(13200.0 / 5.0)).epsilon(1e-14));
  CHECK(w[0].error_rate_pct == doctest::Approx(100.0 / 6.0).epsilon(1e-15));
  CHECK_FALSE(w[0].sparse);
}

TEST_CASE("windows overlap by four seconds and respect invariants") {
  const auto k = simulated(600, 4);
  const auto w = extract_windows(k);
  REQUIRE(w.size() > 10);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i].window_start_ms == 1000.0 * double(i));
    CHECK(w[i].window_end_ms - w[i].window_start_ms == 5000.0);
    CHECK(w[i].std_dwell >= 0.0);
    CHECK(w[i].std_flight >= 0.0);
    CHECK(w[i].error_rate_pct >= 0.0);
    CHECK(w[i].error_rate_pct <= 100.0);
    if (i > 0) CHECK(w[i - 1].window_end_ms - w[i].window_start_ms == 4000.0);
  }
  CHECK(w.back().window_end_ms <= k.back().release_ms);
}

TEST_CASE("series length tracks session duration") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto k = simulated(1000, seed);
    const double duration_s = k.back().release_ms / 1000.0;
    const auto n = extract_windows(k).size();
    CHECK(std::abs(double(n) - (duration_s - 4.0)) <= 1.0);
  }
}

TEST_CASE("dilation scales timings and keeps error rates") {
  const auto k = simulated(400, 6);
  auto dilated = k;
  for (auto& s : dilated) {
    s.press_ms *= 2.0;
    s.release_ms *= 2.0;
  }
  const auto a = extract_windows(k);
  const auto b = extract_windows(dilated, {10000.0, 2000.0});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i].error_rate_pct == a[i].error_rate_pct);
    CHECK(b[i].avg_dwell == doctest::Approx(2.0 * a[i].avg_dwell).epsilon(1e-12));
    CHECK(b[i].std_dwell == doctest::Approx(2.0 * a[i].std_dwell).epsilon(1e-9));
    CHECK(b[i].avg_flight == doctest::Approx(2.0 * a[i].avg_flight).epsilon(1e-12));
    CHECK(b[i].std_flight == doctest::Approx(2.0 * a[i].std_flight).epsilon(1e-9));
    CHECK(b[i].sparse == a[i].sparse);
  }
}

TEST_CASE("windows are time-local") {
  const auto k = simulated(300, 8);
  const double last = k.back().release_ms;
  const double shift = std::ceil((last + 7000.0) / 1000.0) * 1000.0;
  auto joined = k;
  for (auto s : k) {
    s.press_ms += shift;
    s.release_ms += shift;
    joined.push_back(s);
  }
  const auto alone = extract_windows(k);
  const auto both = extract_windows(joined);
  for (std::size_t i = 0; i < alone.size(); ++i) CHECK(both[i] == alone[i]);

  // Second copy: skip windows that see the first keystroke, whose flight now
  // spans the gap between the copies.
  const auto offset = static_cast<std::size_t>(shift / 1000.0);
  for (std::size_t i = 1; i < alone.size(); ++i) {
    auto expected = alone[i];
    expected.window_start_ms += shift;
    expected.window_end_ms += shift;
    const auto& got = both.at(offset + i);
    CHECK(got.window_start_ms == expected.window_start_ms);
    CHECK(got.avg_dwell == doctest::Approx(expected.avg_dwell).epsilon(1e-12));
    CHECK(got.std_dwell == doctest::Approx(expected.std_dwell).epsilon(1e-9));
    CHECK(got.avg_flight == doctest::Approx(expected.avg_flight).epsilon(1e-12));
    CHECK(got.std_flight == doctest::Approx(expected.std_flight).epsilon(1e-9));
    CHECK(got.error_rate_pct == expected.error_rate_pct);
  }
}

TEST_CASE("sparse windows are kept but left out of the matrix") {
  const std::vector<Keystroke> k{ks('a', 0, 50), ks('b', 100, 150), ks('c', 7000, 7050)};
  const auto w = extract_windows(k);
  REQUIRE(w.size() == 3);
  CHECK_FALSE(w[0].sparse);
  CHECK(w[1].sparse);  // a and b pressed before 1000, c at 7000
  CHECK(w[2].sparse);
  CHECK(w[1].avg_dwell == 0.0);
  CHECK(feature_matrix(w).size() == 1);
}

TEST_CASE("feature CSV round trip") {
  const auto w = extract_windows(simulated(300, 12));
  std::ostringstream out;
  write_features(out, w);
  CHECK(out.str().rfind(kFeatureHeader, 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_features(in) == w);
}
