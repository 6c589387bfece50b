#pragma once

#include <map>
#include <vector>

#include "keydyn/keyboard.hpp"
#include "keydyn/rng.hpp"

namespace keydyn {

/// Categorical distribution over typed characters.
class FrequencyTable {
 public:
  /// Normalises the raw weights; throws std::invalid_argument on negative or
  /// all-zero weights.
  explicit FrequencyTable(const std::map<char, double>& weights);

  /// English letter frequencies plus the space bar.
  static const FrequencyTable& english();

  double probability(char c) const;
  const std::vector<Key>& symbols() const { return symbols_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::vector<Key> symbols_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;

  friend Key sample_character(const FrequencyTable&, RandomStream&);
};

/// Inverse-CDF draw; consumes exactly one uniform from the stream.
Key sample_character(const FrequencyTable& table, RandomStream& rng);

}  // namespace keydyn
