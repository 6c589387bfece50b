#pragma once

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace keydyn {

/// One physical key. Printable keys are identified by their character,
/// backspace by '\b'.
class Key {
 public:
  constexpr Key() = default;
  constexpr explicit Key(char c) : code_(c) {}

  static constexpr Key backspace() { return Key('\b'); }
  static constexpr Key space() { return Key(' '); }

  constexpr char code() const { return code_; }
  constexpr bool is_backspace() const { return code_ == '\b'; }

  /// CSV rendering: the character itself, or "space" / "backspace".
  std::string name() const;
  /// Inverse of name(); throws InvalidKey on anything unrecognised.
  static Key parse(std::string_view name);

  constexpr auto operator<=>(const Key&) const = default;

 private:
  char code_ = '\0';
};

enum class KeyboardKind { laptop, mechanical };

std::string_view to_string(KeyboardKind kind);
KeyboardKind parse_keyboard_kind(std::string_view text);

/// Default timings of a keyboard type. Laptop (membrane) keys are held
/// shorter but travel between keys takes longer.
struct KeyboardModel {
  KeyboardKind kind = KeyboardKind::laptop;
  double base_flight_ms = 120.0;
  double base_dwell_ms = 50.0;

  static KeyboardModel for_kind(KeyboardKind kind);
};

struct GridPos {
  int row = 0;
  int col = 0;
};

enum class HandSide { left, neutral, right };

/// US QWERTY on an unstaggered unit grid: row 0 is the number row starting
/// with the backquote at (0,0) and ending with backspace at (0,13); letter
/// rows start at column 1; the space bar sits at (4,6).
class KeyboardGeometry {
 public:
  static const KeyboardGeometry& qwerty();

  bool contains(Key k) const;
  /// Throws InvalidKey naming the key when absent.
  GridPos position(Key k) const;

  double raw_distance(Key a, Key b) const;
  /// Largest raw distance over all key pairs on the layout.
  double max_distance() const { return max_distance_; }

  /// Columns left of T-G-B are left-hand, right of Y-H-N right-hand.
  HandSide side(Key k) const;

  /// Keys at raw distance <= radius from k, excluding k, restricted to `pool`.
  std::vector<Key> neighbours(Key k, double radius, std::span<const Key> pool) const;

  std::vector<Key> keys() const;

 private:
  KeyboardGeometry();
  std::array<std::optional<GridPos>, 128> pos_{};
  double max_distance_ = 0.0;
};

/// Normalised distance D in (0, 1]; identical keys give exactly 0.2.
double key_distance(const KeyboardGeometry& geom, Key a, Key b);

inline constexpr double kRepeatedKeyDistance = 0.2;

}  // namespace keydyn
