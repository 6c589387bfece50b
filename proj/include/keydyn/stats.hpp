#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "keydyn/dataset.hpp"
#include "keydyn/features.hpp"

namespace keydyn {

struct KsResult {
  double statistic = 0.0;  ///< D in [0, 1]
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Supremum distance between the two empirical CDFs, evaluated at every
/// pooled data point so ties are handled exactly.
double ks_statistic(std::span<const double> x, std::span<const double> y);

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2), clamped to [0, 1].
double kolmogorov_tail(double lambda);

/// Q(lambda) with lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D, ne = n m / (n + m).
double ks_asymptotic_p(double statistic, std::size_t n, std::size_t m);

/// P(D >= statistic) under the null for continuous data, by counting lattice
/// paths that stay inside the band.
double ks_exact_p(double statistic, std::size_t n, std::size_t m);

/// Below this n*m the exact null distribution is used.
inline constexpr std::size_t kKsExactLimit = 10000;

/// Two-sample KS test: exact p-value when n*m <= kKsExactLimit, asymptotic
/// otherwise. Throws std::invalid_argument on an empty sample.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

using FeatureRows = std::vector<std::array<double, kFeatureCount>>;
using FeaturePValues = std::array<double, kFeatureCount>;

/// Per-feature KS p-values between two window series (sparse windows already removed).
FeaturePValues compare_sessions_ks(const FeatureRows& a, const FeatureRows& b);

/// Which keyboards a KS or OC-SVM table compares.
struct KeyboardPairing {
  KeyboardKind reference = KeyboardKind::laptop;
  KeyboardKind other = KeyboardKind::laptop;
  bool cross() const { return reference != other; }
  std::string name() const;
};

/// cells[i][j] holds the five p-values for user_ids[i] against user_ids[j].
/// Same-keyboard diagonal: session 1 against session 2 of that user. Every
/// other cell: the row user's session 1 (reference keyboard) against each of
/// the column user's sessions (other keyboard), p-values averaged.
struct KsMatrix {
  KeyboardPairing pairing;
  std::vector<int> user_ids;
  std::vector<std::vector<FeaturePValues>> cells;
};

/// Feature rows for a manifest session, supplied by the caller.
using FeatureSource = std::function<const FeatureRows&(const SessionEntry&)>;

KsMatrix ks_matrix(const Manifest& manifest, KeyboardPairing pairing, const FeatureSource& features);

/// Table layout: header "User,<ids>", each cell "ad: 0.2739 sd: ... er: ..." at 4 decimals.
std::string ks_matrix_csv(const KsMatrix& m);
std::string ks_matrix_json(const KsMatrix& m);

}  // namespace keydyn
