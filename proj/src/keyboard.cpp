#include "keydyn/keyboard.hpp"

#include <algorithm>
#include <cmath>

#include "keydyn/errors.hpp"

namespace keydyn {

std::string Key::name() const {
  if (code_ == '\b') return "backspace";
  if (code_ == ' ') return "space";
  return std::string(1, code_);
}

Key Key::parse(std::string_view name) {
  if (name == "backspace") return Key::backspace();
  if (name == "space") return Key::space();
  if (name.size() == 1 && name[0] > ' ' && name[0] < 127) return Key(name[0]);
  throw InvalidKey("unrecognised key '" + std::string(name) + "'");
}

std::string_view to_string(KeyboardKind kind) {
  return kind == KeyboardKind::laptop ? "laptop" : "mechanical";
}

KeyboardKind parse_keyboard_kind(std::string_view text) {
  if (text == "laptop") return KeyboardKind::laptop;
  if (text == "mechanical") return KeyboardKind::mechanical;
  throw std::invalid_argument("unknown keyboard type '" + std::string(text) + "'");
}

KeyboardModel KeyboardModel::for_kind(KeyboardKind kind) {
  if (kind == KeyboardKind::laptop) return {KeyboardKind::laptop, 120.0, 50.0};
  return {KeyboardKind::mechanical, 100.0, 60.0};
}

namespace {

constexpr int kSplitLeftCol = 5;   // T, G, B
constexpr int kSplitRightCol = 6;  // Y, H, N

}  // namespace

KeyboardGeometry::KeyboardGeometry() {
  auto place_row = [this](std::string_view chars, int row, int first_col) {
    for (std::size_t i = 0; i < chars.size(); ++i) {
      pos_[static_cast<unsigned char>(chars[i])] = GridPos{row, first_col + static_cast<int>(i)};
    }
  };
  place_row("`1234567890-=", 0, 0);
  pos_[static_cast<unsigned char>('\b')] = GridPos{0, 13};
  place_row("qwertyuiop", 1, 1);
  place_row("asdfghjkl", 2, 1);
  place_row("zxcvbnm", 3, 1);
  pos_[static_cast<unsigned char>(' ')] = GridPos{4, 6};

  const auto all = keys();
  for (auto a : all) {
    for (auto b : all) max_distance_ = std::max(max_distance_, raw_distance(a, b));
  }
}

const KeyboardGeometry& KeyboardGeometry::qwerty() {
  static const KeyboardGeometry geom;
  return geom;
}

bool KeyboardGeometry::contains(Key k) const {
  const auto c = static_cast<unsigned char>(k.code());
  return c < pos_.size() && pos_[c].has_value();
}

GridPos KeyboardGeometry::position(Key k) const {
  if (!contains(k)) throw InvalidKey("key '" + k.name() + "' has no position on the layout");
  return *pos_[static_cast<unsigned char>(k.code())];
}

double KeyboardGeometry::raw_distance(Key a, Key b) const {
  const auto pa = position(a);
  const auto pb = position(b);
  const double dr = pa.row - pb.row;
  const double dc = pa.col - pb.col;
  return std::sqrt(dr * dr + dc * dc);
}

HandSide KeyboardGeometry::side(Key k) const {
  const int col = position(k).col;
  if (col < kSplitLeftCol) return HandSide::left;
  if (col > kSplitRightCol) return HandSide::right;
  return HandSide::neutral;
}

std::vector<Key> KeyboardGeometry::neighbours(Key k, double radius, std::span<const Key> pool) const {
  std::vector<Key> out;
  for (auto other : pool) {
    if (other != k && raw_distance(k, other) <= radius) out.push_back(other);
  }
  return out;
}

std::vector<Key> KeyboardGeometry::keys() const {
  std::vector<Key> out;
  for (std::size_t c = 0; c < pos_.size(); ++c) {
    if (pos_[c]) out.emplace_back(static_cast<char>(c));
  }
  return out;
}

double key_distance(const KeyboardGeometry& geom, Key a, Key b) {
  const double raw = geom.raw_distance(a, b);  // validates both keys
  if (a == b) return kRepeatedKeyDistance;
  return raw / geom.max_distance();
}

}  // namespace keydyn
