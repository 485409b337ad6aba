#pragma once

// Wall identification and the mutable erased-wall set for the whole plane.
//
// H(i,j) is the segment (i,j)-(i+1,j); V(i,j) is the segment (i,j)-(i,j+1).
// The plane starts all-solid, so only erased walls are stored. Storage is a
// sparse map of 16x16 tiles, each a pair of 256-bit masks. Each mask is laid
// out so the walls a particle crosses in a straight run (a column of H walls,
// a row of V walls) share one 16-bit lane.

#include "exactnum.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallbreak {

enum class Orientation : std::uint8_t { H = 0, V = 1 };

inline char to_char(Orientation o) { return o == Orientation::H ? 'H' : 'V'; }

struct WallId {
  Orientation orientation = Orientation::H;
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const WallId &, const WallId &) = default;
  friend auto operator<=>(const WallId &, const WallId &) = default;
};

inline WallId H(std::int64_t x, std::int64_t y) { return {Orientation::H, x, y}; }
inline WallId V(std::int64_t x, std::int64_t y) { return {Orientation::V, x, y}; }

inline std::string to_string(const WallId &w) {
  return std::string(1, to_char(w.orientation)) + "(" + std::to_string(w.x) + "," +
         std::to_string(w.y) + ")";
}

inline std::ostream &operator<<(std::ostream &os, const WallId &w) { return os << to_string(w); }

class CoordinateOverflow : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

/// Anchors are limited to |coord| < 2^34 so tile ids pack into 64 bits.
inline constexpr std::int64_t kCoordinateLimit = std::int64_t{1} << 34;

/// Inclusive integer rectangle over wall anchors.
struct IntBox {
  std::int64_t xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  friend bool operator==(const IntBox &, const IntBox &) = default;
};

class WallState {
public:
  WallState() { reset_table(64); }
  explicit WallState(const std::vector<WallId> &initially_erased) : WallState() {
    initially_erased_ = initially_erased;
    for (const auto &w : initially_erased) erase(w);
  }

  bool is_solid(const WallId &w) const { return !is_erased(w.orientation, w.x, w.y); }

  bool is_erased(Orientation o, std::int64_t x, std::int64_t y) const {
    const Tile *t = find_tile(x >> kTileShift, y >> kTileShift);
    if (!t) return false;
    unsigned bit = bit_index(o, x, y);
    return (t->mask[static_cast<int>(o)][bit >> 6] >> (bit & 63)) & 1u;
  }

  /// Number of consecutive erased walls starting at `first` and stepping by
  /// `dir` across the walls' normal (y for H, x for V), at most `limit`.
  std::uint64_t erased_run(const WallId &first, int dir, std::uint64_t limit) const {
    const bool h = first.orientation == Orientation::H;
    const std::int64_t fixed = h ? first.x : first.y;
    std::int64_t pos = h ? first.y : first.x;
    std::uint64_t count = 0;
    while (count < limit) {
      const Tile *t = h ? find_tile(fixed >> kTileShift, pos >> kTileShift)
                        : find_tile(pos >> kTileShift, fixed >> kTileShift);
      if (!t) break;
      const unsigned lane = static_cast<unsigned>(fixed & (kTileSize - 1));
      const auto bits = static_cast<std::uint16_t>(
          t->mask[static_cast<int>(first.orientation)][lane >> 2] >> ((lane & 3) * 16));
      const unsigned p = static_cast<unsigned>(pos & (kTileSize - 1));
      unsigned run, room;
      if (dir > 0) {
        run = static_cast<unsigned>(std::countr_one(static_cast<std::uint16_t>(bits >> p)));
        room = 16 - p;
      } else {
        run = static_cast<unsigned>(std::countl_one(static_cast<std::uint16_t>(bits << (15 - p))));
        room = p + 1;
      }
      run = std::min(run, room);
      count += run;
      if (run < room) break;
      pos += dir > 0 ? static_cast<std::int64_t>(run) : -static_cast<std::int64_t>(run);
    }
    return std::min(count, limit);
  }

  /// Returns true if the wall was solid before.
  bool erase(const WallId &w) {
    check_range(w.x, w.y);
    Tile &t = tile_for(w.x >> kTileShift, w.y >> kTileShift);
    unsigned bit = bit_index(w.orientation, w.x, w.y);
    std::uint64_t &word = t.mask[static_cast<int>(w.orientation)][bit >> 6];
    std::uint64_t m = std::uint64_t{1} << (bit & 63);
    if (word & m) return false;
    word |= m;
    ++count_;
    if (count_ == 1) {
      box_ = {w.x, w.y, w.x, w.y};
    } else {
      box_.xmin = std::min(box_.xmin, w.x);
      box_.ymin = std::min(box_.ymin, w.y);
      box_.xmax = std::max(box_.xmax, w.x);
      box_.ymax = std::max(box_.ymax, w.y);
    }
    return true;
  }

  template <typename Range> std::size_t erase_all(const Range &walls) {
    std::size_t fresh = 0;
    for (const WallId &w : walls) fresh += erase(w) ? 1 : 0;
    return fresh;
  }

  std::size_t erased_count() const { return count_; }

  std::optional<IntBox> erased_bounding_box() const {
    if (count_ == 0) return std::nullopt;
    return box_;
  }

  const std::vector<WallId> &initially_erased() const { return initially_erased_; }

  /// Every erased wall, sorted.
  std::vector<WallId> erased_walls() const {
    std::vector<WallId> out;
    out.reserve(count_);
    for (std::size_t s = 0; s < keys_.size(); ++s) {
      if (keys_[s] == kEmpty) continue;
      const Tile &t = tiles_[slots_[s]];
      std::int64_t tx = static_cast<std::int64_t>(keys_[s] >> 32) - kTileBias;
      std::int64_t ty = static_cast<std::int64_t>(keys_[s] & 0xffffffffu) - kTileBias;
      for (int o = 0; o < 2; ++o)
        for (unsigned bit = 0; bit < kTileSize * kTileSize; ++bit)
          if ((t.mask[o][bit >> 6] >> (bit & 63)) & 1u) {
            std::int64_t lane = bit / kTileSize, along = bit % kTileSize;
            // H lanes are columns, V lanes are rows
            std::int64_t lx = o == 0 ? lane : along, ly = o == 0 ? along : lane;
            out.push_back({static_cast<Orientation>(o), tx * kTileSize + lx, ty * kTileSize + ly});
          }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  static constexpr int kTileShift = 4;
  static constexpr std::int64_t kTileSize = std::int64_t{1} << kTileShift;
  static constexpr std::int64_t kTileBias = std::int64_t{1} << 31;
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

  struct Tile {
    std::array<std::array<std::uint64_t, 4>, 2> mask{};
  };

  // lane * 16 + position along the lane
  static unsigned bit_index(Orientation o, std::int64_t x, std::int64_t y) {
    std::int64_t lx = x & (kTileSize - 1), ly = y & (kTileSize - 1);
    return static_cast<unsigned>(o == Orientation::H ? (lx << kTileShift) | ly
                                                     : (ly << kTileShift) | lx);
  }

  static std::uint64_t tile_key(std::int64_t tx, std::int64_t ty) {
    return (static_cast<std::uint64_t>(tx + kTileBias) << 32) |
           static_cast<std::uint64_t>(ty + kTileBias);
  }

  static std::size_t mix(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }

  static void check_range(std::int64_t x, std::int64_t y) {
    if (x <= -kCoordinateLimit || x >= kCoordinateLimit || y <= -kCoordinateLimit ||
        y >= kCoordinateLimit)
      throw CoordinateOverflow("wall anchor (" + std::to_string(x) + "," + std::to_string(y) +
                               ") outside supported range");
  }

  const Tile *find_tile(std::int64_t tx, std::int64_t ty) const {
    std::uint64_t key = tile_key(tx, ty);
    if (key == last_key_) return last_tile_;
    std::size_t mask = keys_.size() - 1;
    for (std::size_t s = mix(key) & mask;; s = (s + 1) & mask) {
      if (keys_[s] == key) {
        last_key_ = key;
        last_tile_ = &tiles_[slots_[s]];
        return last_tile_;
      }
      if (keys_[s] == kEmpty) return nullptr;
    }
  }

  Tile &tile_for(std::int64_t tx, std::int64_t ty) {
    if (const Tile *t = find_tile(tx, ty)) return const_cast<Tile &>(*t);
    if ((tiles_.size() + 1) * 2 > keys_.size()) reset_table(keys_.size() * 2);
    std::uint64_t key = tile_key(tx, ty);
    std::size_t mask = keys_.size() - 1;
    std::size_t s = mix(key) & mask;
    while (keys_[s] != kEmpty) s = (s + 1) & mask;
    keys_[s] = key;
    slots_[s] = static_cast<std::uint32_t>(tiles_.size());
    tiles_.emplace_back();
    last_key_ = kEmpty; // tiles_ may have reallocated
    return tiles_.back();
  }

  void reset_table(std::size_t capacity) {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<std::uint32_t> old_slots = std::move(slots_);
    keys_.assign(capacity, kEmpty);
    slots_.assign(capacity, 0);
    std::size_t mask = capacity - 1;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == kEmpty) continue;
      std::size_t s = mix(old_keys[i]) & mask;
      while (keys_[s] != kEmpty) s = (s + 1) & mask;
      keys_[s] = old_keys[i];
      slots_[s] = old_slots[i];
    }
    last_key_ = kEmpty;
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> slots_;
  std::vector<Tile> tiles_;
  mutable std::uint64_t last_key_ = kEmpty;
  mutable const Tile *last_tile_ = nullptr;
  std::size_t count_ = 0;
  IntBox box_{};
  std::vector<WallId> initially_erased_;

public:
  // The one-entry cache holds a pointer into tiles_, so copies must drop it.
  WallState(const WallState &o)
      : keys_(o.keys_), slots_(o.slots_), tiles_(o.tiles_), count_(o.count_), box_(o.box_),
        initially_erased_(o.initially_erased_) {}
  WallState &operator=(const WallState &o) {
    if (this != &o) {
      keys_ = o.keys_;
      slots_ = o.slots_;
      tiles_ = o.tiles_;
      count_ = o.count_;
      box_ = o.box_;
      initially_erased_ = o.initially_erased_;
      last_key_ = kEmpty;
      last_tile_ = nullptr;
    }
    return *this;
  }
  WallState(WallState &&o) noexcept { *this = std::move(o); }
  WallState &operator=(WallState &&o) noexcept {
    keys_ = std::move(o.keys_);
    slots_ = std::move(o.slots_);
    tiles_ = std::move(o.tiles_);
    count_ = o.count_;
    box_ = o.box_;
    initially_erased_ = std::move(o.initially_erased_);
    last_key_ = kEmpty;
    last_tile_ = nullptr;
    o.reset_table(64);
    o.tiles_.clear();
    o.count_ = 0;
    return *this;
  }
};

// ---------------------------------------------------------------------------
// Wall list text format: one `H i j` / `V i j` per line. `#` starts a
// comment; blank lines are ignored.

struct ParsedWallLine {
  Orientation orientation;
  BigInt x, y;
};

inline std::int64_t narrow_coordinate(const BigInt &v, std::size_t line) {
  if (v <= -kCoordinateLimit || v >= kCoordinateLimit)
    throw CoordinateOverflow("line " + std::to_string(line) + ": coordinate " + v.str() +
                             " outside supported range");
  return static_cast<std::int64_t>(v);
}

/// Calls `fn(orientation, x, y, line_number)` for each wall line.
template <typename Fn> void parse_wall_lines(std::istream &in, Fn &&fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string o, xs, ys, extra;
    if (!(ls >> o)) continue;
    if (!(ls >> xs >> ys) || (ls >> extra) || (o != "H" && o != "V"))
      throw ParseError("line " + std::to_string(number) + ": expected `H i j` or `V i j`");
    BigInt x, y;
    try {
      x = detail::parse_integer(xs);
      y = detail::parse_integer(ys);
    } catch (const ParseError &) {
      throw ParseError("line " + std::to_string(number) + ": expected integer coordinates");
    }
    fn(o == "H" ? Orientation::H : Orientation::V, x, y, number);
  }
}

inline std::vector<WallId> parse_wall_list(std::istream &in) {
  std::vector<WallId> out;
  parse_wall_lines(in, [&](Orientation o, const BigInt &x, const BigInt &y, std::size_t n) {
    out.push_back({o, narrow_coordinate(x, n), narrow_coordinate(y, n)});
  });
  return out;
}

inline void write_wall_list(std::ostream &out, const std::vector<WallId> &walls) {
  for (const auto &w : walls) out << to_char(w.orientation) << ' ' << w.x << ' ' << w.y << '\n';
}

} // namespace wallbreak
