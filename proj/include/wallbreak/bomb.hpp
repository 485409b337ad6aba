#pragma once

// Bomb patterns. A bomb is stored in a canonical frame where the marked edge
// is H(0,0) hit from below; at each collision the pattern is rotated (never
// reflected) so the marked edge lands on the wall just hit.

#include "grid.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallbreak {

enum class ApproachSide : std::uint8_t { Below = 0, Above = 1, Left = 2, Right = 3 };

inline const char *to_string(ApproachSide s) {
  switch (s) {
  case ApproachSide::Below: return "below";
  case ApproachSide::Above: return "above";
  case ApproachSide::Left: return "left";
  case ApproachSide::Right: return "right";
  }
  return "?";
}

/// Wall offset in the canonical frame.
struct BombWall {
  Orientation orientation = Orientation::H;
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const BombWall &, const BombWall &) = default;
  friend auto operator<=>(const BombWall &, const BombWall &) = default;
};

class InvalidBomb : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class BombPattern {
public:
  /// Throws InvalidBomb unless `walls` contains the marked edge H(0,0).
  explicit BombPattern(std::vector<BombWall> walls) : walls_(std::move(walls)) {
    std::sort(walls_.begin(), walls_.end());
    walls_.erase(std::unique(walls_.begin(), walls_.end()), walls_.end());
    if (!std::binary_search(walls_.begin(), walls_.end(), BombWall{Orientation::H, 0, 0}))
      throw InvalidBomb("bomb pattern is missing its marked edge H 0 0");
  }

  const std::vector<BombWall> &walls() const { return walls_; }
  std::size_t size() const { return walls_.size(); }

  friend bool operator==(const BombPattern &, const BombPattern &) = default;

private:
  std::vector<BombWall> walls_;
};

inline BombPattern single_wall() { return BombPattern({{Orientation::H, 0, 0}}); }

/// Where the two extra edges of a winged wedge go. The row-end reading is the
/// one the slope-3 wedge traces confirm; the others are kept for comparison.
enum class WingPlacement : std::uint8_t {
  /// Wings are the two outermost walls of the top row, H(-n,n) and H(n,n).
  /// The unwinged wedge drops them, so its top row has 2n-1 walls.
  RowEnds,
  /// V(-n,n-1), V(n+1,n-1): outer sides of the top row of squares.
  CornerSides,
  /// V(-n,n), V(n+1,n): verticals standing on the ends of the top row.
  CornerPosts,
  /// H(-n-1,n), H(n+1,n): the top row extended by one wall on each side.
  RowExtension,
};

inline constexpr WingPlacement kDefaultWings = WingPlacement::RowEnds;

/// Triangular wedge of size n: rows j = 0..n of horizontals H(i,j), |i| <= j,
/// and every vertical whose ends both touch a cleared horizontal.
inline BombPattern wedge(std::int64_t n, bool winged, WingPlacement wings = kDefaultWings) {
  if (n < 1) throw InvalidBomb("wedge size must be at least 1");
  std::vector<BombWall> w;
  for (std::int64_t j = 0; j <= n; ++j)
    for (std::int64_t i = -j; i <= j; ++i) w.push_back({Orientation::H, i, j});
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = -j; i <= j + 1; ++i) w.push_back({Orientation::V, i, j});
  switch (wings) {
  case WingPlacement::RowEnds:
    if (!winged)
      std::erase_if(w, [n](const BombWall &x) {
        return x.orientation == Orientation::H && x.b == n && (x.a == n || x.a == -n);
      });
    break;
  case WingPlacement::CornerSides:
    if (winged) {
      w.push_back({Orientation::V, -n, n - 1});
      w.push_back({Orientation::V, n + 1, n - 1});
    }
    break;
  case WingPlacement::CornerPosts:
    if (winged) {
      w.push_back({Orientation::V, -n, n});
      w.push_back({Orientation::V, n + 1, n});
    }
    break;
  case WingPlacement::RowExtension:
    if (winged) {
      w.push_back({Orientation::H, -n - 1, n});
      w.push_back({Orientation::H, n + 1, n});
    }
    break;
  }
  return BombPattern(std::move(w));
}

/// A bomb's four rotations, as offsets from the hit wall's anchor.
class PlacedBomb {
public:
  explicit PlacedBomb(const BombPattern &bomb) {
    for (int s = 0; s < 4; ++s) {
      auto side = static_cast<ApproachSide>(s);
      for (const auto &bw : bomb.walls()) rotations_[s].push_back(rotate(bw, side));
    }
  }

  /// The offset list for hits from `side`: wall = (o, i + dx, j + dy).
  const std::vector<WallId> &offsets(ApproachSide side) const {
    return rotations_[static_cast<int>(side)];
  }

  /// Canonical wall (o,a,b) placed for a hit on the wall anchored at the
  /// origin from `side`.
  static WallId rotate(const BombWall &bw, ApproachSide side) {
    const auto a = bw.a, b = bw.b;
    const bool h = bw.orientation == Orientation::H;
    switch (side) {
    case ApproachSide::Below: // identity
      return {bw.orientation, a, b};
    case ApproachSide::Above: // half turn about the marked edge's midpoint
      return h ? H(-a, -b) : V(1 - a, -b - 1);
    case ApproachSide::Left: // quarter turn clockwise
      return h ? V(b, -a) : H(b, 1 - a);
    case ApproachSide::Right: // quarter turn counterclockwise
      return h ? V(-b, a) : H(-b - 1, a);
    }
    return {};
  }

private:
  std::array<std::vector<WallId>, 4> rotations_;
};

inline void check_side(const WallId &hit, ApproachSide side) {
  bool horizontal_side = side == ApproachSide::Below || side == ApproachSide::Above;
  if (horizontal_side != (hit.orientation == Orientation::H))
    throw std::invalid_argument(std::string("cannot hit ") + to_string(hit) + " from " +
                                wallbreak::to_string(side));
}

/// Walls erased when `hit` is struck from `side`.
inline std::vector<WallId> overlay(const BombPattern &bomb, const WallId &hit, ApproachSide side) {
  check_side(hit, side);
  std::vector<WallId> out;
  out.reserve(bomb.size());
  for (const auto &bw : bomb.walls()) {
    WallId r = PlacedBomb::rotate(bw, side);
    out.push_back({r.orientation, hit.x + r.x, hit.y + r.y});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form: the wall list format with canonical-frame offsets.

inline BombPattern parse_bomb(std::istream &in) {
  std::vector<BombWall> walls;
  parse_wall_lines(in, [&](Orientation o, const BigInt &a, const BigInt &b, std::size_t n) {
    walls.push_back({o, narrow_coordinate(a, n), narrow_coordinate(b, n)});
  });
  return BombPattern(std::move(walls));
}

inline BombPattern parse_bomb(const std::string &text) {
  std::istringstream in(text);
  return parse_bomb(in);
}

inline std::string serialize_bomb(const BombPattern &bomb) {
  std::ostringstream out;
  for (const auto &w : bomb.walls()) out << to_char(w.orientation) << ' ' << w.a << ' ' << w.b << '\n';
  return out.str();
}

inline const char *to_string(WingPlacement w) {
  switch (w) {
  case WingPlacement::RowEnds: return "rowends";
  case WingPlacement::CornerSides: return "cornersides";
  case WingPlacement::CornerPosts: return "cornerposts";
  case WingPlacement::RowExtension: return "rowextension";
  }
  return "?";
}

inline WingPlacement parse_wing_placement(std::string_view s) {
  for (auto w : {WingPlacement::RowEnds, WingPlacement::CornerSides, WingPlacement::CornerPosts,
                 WingPlacement::RowExtension})
    if (s == to_string(w)) return w;
  throw ParseError("unknown wing placement '" + std::string(s) + "'");
}

/// `single`, `wedge:N`, `wingedwedge:N` (optionally `@placement`), or
/// `file:PATH` holding a wall list.
inline BombPattern parse_bomb_spec(std::string_view spec) {
  if (spec == "single") return single_wall();
  auto starts = [&](std::string_view p) { return spec.substr(0, p.size()) == p; };
  if (starts("file:")) {
    std::string path(spec.substr(5));
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open bomb file " + path);
    return parse_bomb(in);
  }
  bool winged = starts("wingedwedge:");
  if (!winged && !starts("wedge:")) throw ParseError("unknown bomb '" + std::string(spec) + "'");
  std::string_view rest = spec.substr(winged ? 12 : 6);
  WingPlacement wings = kDefaultWings;
  if (auto at = rest.find('@'); at != std::string_view::npos) {
    wings = parse_wing_placement(rest.substr(at + 1));
    rest = rest.substr(0, at);
  }
  BigInt n = detail::parse_integer(rest);
  if (n < 1 || n > 100000) throw ParseError("wedge size out of range: " + std::string(rest));
  return wedge(static_cast<std::int64_t>(n), winged, wings);
}

/// Mirror image across the marked edge's perpendicular bisector.
inline BombPattern mirrored(const BombPattern &bomb) {
  std::vector<BombWall> out;
  for (const auto &w : bomb.walls())
    out.push_back(w.orientation == Orientation::H ? BombWall{Orientation::H, -w.a, w.b}
                                                  : BombWall{Orientation::V, 1 - w.a, w.b});
  return BombPattern(std::move(out));
}

} // namespace wallbreak
