#include "keydyn/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace keydyn {

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-10) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  // Series has not settled: lambda is tiny and the tail is 1 to double precision.
  return 1.0;
}

double ks_asymptotic_p(double statistic, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n * m) / static_cast<double>(n + m);
  const double sq = std::sqrt(ne);
  return kolmogorov_tail((sq + 0.12 + 0.11 / sq) * statistic);
}

double ks_exact_p(double statistic, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw std::invalid_argument("ks_exact_p needs non-empty samples");
  // D * n * m is an integer |i m - j n| at the supremum; recover it exactly.
  const auto nm = static_cast<double>(n) * static_cast<double>(m);
  const auto threshold = static_cast<long long>(std::llround(statistic * nm));
  if (threshold <= 0) return 1.0;

  // Lattice paths from (0,0) to (n,m) that never reach |i m - j n| >= threshold.
  // Counts are carried as fractions of all paths so nothing overflows.
  std::vector<double> row(m + 1, 0.0);
  const auto inside = [&](std::size_t i, std::size_t j) {
    const long long gap = static_cast<long long>(i * m) - static_cast<long long>(j * n);
    return std::llabs(gap) < threshold;
  };
  row[0] = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    row[j] = inside(0, j) ? row[j - 1] : 0.0;
  }
  // Weighting: a path prefix ending at (i, j) carries count / C(i + j, i);
  // stepping to (i, j+1) or (i+1, j) rescales by the binomial ratio.
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (!inside(i, j)) {
        row[j] = 0.0;
        continue;
      }
      const double total = static_cast<double>(i + j);
      const double from_below = row[j] * static_cast<double>(i) / total;
      const double from_left = j > 0 ? row[j - 1] * static_cast<double>(j) / total : 0.0;
      row[j] = from_below + from_left;
    }
  }
  return std::clamp(1.0 - row[m], 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample needs non-empty samples");
  KsResult r;
  r.n = x.size();
  r.m = y.size();
  r.statistic = ks_statistic(x, y);
  r.p_value = r.n * r.m <= kKsExactLimit ? ks_exact_p(r.statistic, r.n, r.m)
                                         : ks_asymptotic_p(r.statistic, r.n, r.m);
  return r;
}

FeaturePValues compare_sessions_ks(const FeatureRows& a, const FeatureRows& b) {
  FeaturePValues p{};
  std::vector<double> xa(a.size()), xb(b.size());
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    for (std::size_t i = 0; i < a.size(); ++i) xa[i] = a[i][f];
    for (std::size_t i = 0; i < b.size(); ++i) xb[i] = b[i][f];
    p[f] = ks_two_sample(xa, xb).p_value;
  }
  return p;
}

std::string KeyboardPairing::name() const {
  if (!cross()) return std::string(to_string(reference));
  return fmt::format("{}_vs_{}", to_string(reference), to_string(other));
}

KsMatrix ks_matrix(const Manifest& manifest, KeyboardPairing pairing, const FeatureSource& features) {
  KsMatrix out;
  out.pairing = pairing;
  out.user_ids = manifest.user_ids();
  const auto n = out.user_ids.size();
  out.cells.assign(n, std::vector<FeaturePValues>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const auto& row_session = manifest.at(out.user_ids[i], pairing.reference, 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !pairing.cross()) {
        const auto& second = manifest.at(out.user_ids[i], pairing.reference, 2);
        out.cells[i][j] = compare_sessions_ks(features(row_session), features(second));
        continue;
      }
      FeaturePValues mean{};
      const int sessions = manifest.sessions_per_keyboard;
      for (int s = 1; s <= sessions; ++s) {
        const auto& col_session = manifest.at(out.user_ids[j], pairing.other, s);
        const auto p = compare_sessions_ks(features(row_session), features(col_session));
        for (std::size_t f = 0; f < kFeatureCount; ++f) mean[f] += p[f] / sessions;
      }
      out.cells[i][j] = mean;
    }
  }
  return out;
}

namespace {

std::string cell_text(const FeaturePValues& p) {
  std::string s;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (f) s += ' ';
    s += fmt::format("{}: {:.4f}", kFeatureAbbrev[f], p[f]);
  }
  return s;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

std::string ks_matrix_csv(const KsMatrix& m) {
  std::string out = "User";
  for (int id : m.user_ids) out += fmt::format(",{}", id);
  out += '\n';
  for (std::size_t i = 0; i < m.user_ids.size(); ++i) {
    out += fmt::format("{}", m.user_ids[i]);
    for (const auto& cell : m.cells[i]) out += ",\"" + cell_text(cell) + '"';
    out += '\n';
  }
  return out;
}

std::string ks_matrix_json(const KsMatrix& m) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < m.user_ids.size(); ++i) {
    for (std::size_t j = 0; j < m.user_ids.size(); ++j) {
      nlohmann::json p;
      for (std::size_t f = 0; f < kFeatureCount; ++f) p[std::string(kFeatureAbbrev[f])] = round4(m.cells[i][j][f]);
      cells.push_back({{"row_user", m.user_ids[i]}, {"col_user", m.user_ids[j]}, {"p_values", p}});
    }
  }
  const nlohmann::json doc = {{"reference_keyboard", std::string(to_string(m.pairing.reference))},
                              {"other_keyboard", std::string(to_string(m.pairing.other))},
                              {"users", m.user_ids},
                              {"cells", cells}};
  return doc.dump(2) + '\n';
}

}  // namespace keydyn
