#include "keydyn/text.hpp"

#include <algorithm>
#include <stdexcept>

namespace keydyn {

FrequencyTable::FrequencyTable(const std::map<char, double>& weights) {
  double total = 0.0;
  for (const auto& [c, w] : weights) {
    if (w < 0.0) throw std::invalid_argument("negative character weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("character weights sum to zero");

  double running = 0.0;
  for (const auto& [c, w] : weights) {
    symbols_.emplace_back(c);
    probs_.push_back(w / total);
    running += w / total;
    cumulative_.push_back(running);
  }
  cumulative_.back() = 1.0;
}

const FrequencyTable& FrequencyTable::english() {
  // Letter percentages from corpus counts; space weight gives a mean word
  // length of about 5.5 characters including the separator.
  static const FrequencyTable table({
      {'a', 8.167}, {'b', 1.492}, {'c', 2.782}, {'d', 4.253}, {'e', 12.702}, {'f', 2.228},
      {'g', 2.015}, {'h', 6.094}, {'i', 6.966}, {'j', 0.153}, {'k', 0.772}, {'l', 4.025},
      {'m', 2.406}, {'n', 6.749}, {'o', 7.507}, {'p', 1.929}, {'q', 0.095}, {'r', 5.987},
      {'s', 6.327}, {'t', 9.056}, {'u', 2.758}, {'v', 0.978}, {'w', 2.360}, {'x', 0.150},
      {'y', 1.974}, {'z', 0.074}, {' ', 22.000},
  });
  return table;
}

double FrequencyTable::probability(char c) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].code() == c) return probs_[i];
  }
  return 0.0;
}

Key sample_character(const FrequencyTable& table, RandomStream& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(table.cumulative_.begin(), table.cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - table.cumulative_.begin()),
                                         table.symbols_.size() - 1);
  return table.symbols_[idx];
}

}  // namespace keydyn
