#pragma once

// Encounter words: the H/V sequence of grid-line crossings along the
// unfolded straight path. Reflections off walls are grid symmetries, so the
// bouncing particle sees exactly the cutting sequence of the straight line.

#include "exactnum.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wallbreak {

enum class Symbol : std::uint8_t { H = 0, V = 1 };

inline char to_char(Symbol s) { return s == Symbol::H ? 'H' : 'V'; }

inline std::string to_string(const std::vector<Symbol> &w) {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(to_char(s));
  return out;
}

inline std::vector<Symbol> parse_word(std::string_view text) {
  std::vector<Symbol> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == 'H' || ch == 'h')
      out.push_back(Symbol::H);
    else if (ch == 'V' || ch == 'v')
      out.push_back(Symbol::V);
    else if (ch == ' ' || ch == '\t')
      continue;
    else
      throw ParseError("invalid word character '" + std::string(1, ch) + "' at position " +
                       std::to_string(i));
  }
  return out;
}

/// Strictly positive slope magnitude; the particle's signs are kept separately.
struct SlopeSpec {
  QuadraticValue value;

  SlopeSpec() : value(1) {}
  explicit SlopeSpec(QuadraticValue v) : value(std::move(v)) {
    if (compare_exact(value, QuadraticValue(0)) != std::strong_ordering::greater)
      throw std::invalid_argument("slope must be positive (horizontal and vertical motion "
                                  "are degenerate)");
  }
  static SlopeSpec parse(std::string_view text) { return SlopeSpec(parse_quadratic(text)); }

  bool is_rational() const { return value.is_rational(); }
  BigRational rational() const { return value.as_rational(); }
  std::string str() const { return value.str(); }
};

struct LaunchSpec {
  BigRational x = 0, y = 0; // in [0,1)^2
  int sx = 1, sy = 1;       // direction signs
  SlopeSpec slope;

  /// Throws std::invalid_argument unless the start lies in [0,1)^2 and the
  /// particle moves into the open unit square.
  void validate() const {
    if (x < 0 || x >= 1 || y < 0 || y >= 1)
      throw std::invalid_argument("start must lie in [0,1) x [0,1)");
    if ((sx != 1 && sx != -1) || (sy != 1 && sy != -1))
      throw std::invalid_argument("direction signs must be +1 or -1");
    if ((x == 0 && sx < 0) || (y == 0 && sy < 0))
      throw std::invalid_argument("a start on the cell boundary must move into the cell");
  }

  /// Start coordinates reflected so the motion is up and to the right.
  BigRational x_forward() const { return sx > 0 ? x : BigRational(1 - x); }
  BigRational y_forward() const { return sy > 0 ? y : BigRational(1 - y); }
};

class CornerHit : public std::runtime_error {
public:
  CornerHit(std::uint64_t index, std::vector<Symbol> prefix)
      : std::runtime_error("path hits a lattice corner at encounter " + std::to_string(index)),
        index_(index), prefix_(std::move(prefix)) {}
  /// 1-based encounter at which the corner is reached (0: the start itself).
  std::uint64_t index() const { return index_; }
  const std::vector<Symbol> &prefix() const { return prefix_; }

private:
  std::uint64_t index_;
  std::vector<Symbol> prefix_;
};

/// Finite, periodic, or streamed (Beatty) H/V sequence.
class EncounterWord {
public:
  enum class Kind { Finite, Periodic, Streamed };

  static EncounterWord finite(std::vector<Symbol> symbols) {
    EncounterWord w;
    w.kind_ = Kind::Finite;
    w.symbols_ = std::move(symbols);
    return w;
  }
  static EncounterWord periodic(std::vector<Symbol> period, std::size_t phase = 0) {
    if (period.empty()) throw std::invalid_argument("periodic word needs a non-empty period");
    EncounterWord w;
    w.kind_ = Kind::Periodic;
    w.symbols_ = std::move(period);
    w.phase_ = phase % w.symbols_.size();
    return w;
  }
  /// Symbols H^(N1) V H^(N2-N1) V ... with N_k = floor(intercept + k*slope).
  static EncounterWord beatty(QuadraticValue slope, QuadraticValue intercept) {
    EncounterWord w;
    w.kind_ = Kind::Streamed;
    w.slope_ = std::move(slope);
    w.intercept_ = std::move(intercept);
    return w;
  }

  Kind kind() const { return kind_; }
  /// The finite word, or one period of a periodic word.
  const std::vector<Symbol> &symbols() const { return symbols_; }
  std::size_t phase() const { return phase_; }
  const QuadraticValue &slope() const { return slope_; }
  const QuadraticValue &intercept() const { return intercept_; }

  class Cursor {
  public:
    explicit Cursor(const EncounterWord &w) : word_(&w), pos_(w.phase_) {}
    std::optional<Symbol> next() {
      switch (word_->kind_) {
      case Kind::Finite:
        if (pos_ >= word_->symbols_.size()) return std::nullopt;
        return word_->symbols_[pos_++];
      case Kind::Periodic: {
        Symbol s = word_->symbols_[pos_];
        if (++pos_ == word_->symbols_.size()) pos_ = 0;
        return s;
      }
      case Kind::Streamed:
        if (pending_h_ == 0 && !in_block_) {
          ++k_;
          BigInt n = floor_exact(word_->intercept_ + QuadraticValue(k_) * word_->slope_);
          BigInt diff = n - last_;
          last_ = n;
          pending_h_ = diff < 0 ? 0 : static_cast<std::uint64_t>(diff);
          in_block_ = true;
        }
        if (pending_h_ > 0) {
          --pending_h_;
          return Symbol::H;
        }
        in_block_ = false;
        return Symbol::V;
      }
      return std::nullopt;
    }

  private:
    const EncounterWord *word_;
    std::size_t pos_;
    std::int64_t k_ = 0;
    BigInt last_ = 0;
    std::uint64_t pending_h_ = 0;
    bool in_block_ = false;
  };

  Cursor cursor() const { return Cursor(*this); }

  std::vector<Symbol> prefix(std::size_t n) const {
    std::vector<Symbol> out;
    out.reserve(n);
    auto c = cursor();
    while (out.size() < n) {
      auto s = c.next();
      if (!s) break;
      out.push_back(*s);
    }
    return out;
  }

private:
  Kind kind_ = Kind::Finite;
  std::vector<Symbol> symbols_;
  std::size_t phase_ = 0;
  QuadraticValue slope_, intercept_;
};

/// Cutting word of a launch, or the prefix up to the corner it runs into.
struct CuttingTrace {
  EncounterWord word;
  std::optional<std::uint64_t> corner; // 1-based encounter index of the corner
};

namespace detail {

// Symbols of the rational line through (x, y) heading up-right, stopping after
// `limit` symbols or at a corner.
inline CuttingTrace rational_trace(const BigRational &x, const BigRational &y, const BigRational &s,
                                   std::size_t limit) {
  std::vector<Symbol> out;
  out.reserve(limit);
  if (x == 0 && y == 0) return {EncounterWord::finite({}), 0};
  BigInt prev = 0; // H crossings so far
  for (std::int64_t k = 1; out.size() < limit; ++k) {
    // H crossings at heights j >= 1 with j < level come before the k-th V.
    BigRational level = y + s * (BigRational(k) - x);
    BigInt n = floor_of(level);
    bool corner = denominator(level) == 1;
    BigInt count = corner ? BigInt(n - 1) : n;
    for (BigInt j = prev; j < count && out.size() < limit; ++j) out.push_back(Symbol::H);
    if (corner && out.size() < limit) {
      auto index = static_cast<std::uint64_t>(out.size() + 1);
      return {EncounterWord::finite(std::move(out)), index};
    }
    prev = count;
    if (out.size() < limit) out.push_back(Symbol::V);
  }
  return {EncounterWord::finite(std::move(out)), std::nullopt};
}

} // namespace detail

/// Cutting word of `launch`. Rational slopes give a periodic word (period
/// p+q for slope p/q); quadratic slopes give a streamed Beatty word.
inline CuttingTrace trace_cutting_word(const LaunchSpec &launch) {
  launch.validate();
  BigRational x = launch.x_forward(), y = launch.y_forward();
  if (launch.slope.is_rational()) {
    BigRational s = launch.slope.rational();
    auto period = static_cast<std::size_t>(numerator(s) + denominator(s));
    CuttingTrace t = detail::rational_trace(x, y, s, period);
    if (t.corner) return t;
    return {EncounterWord::periodic(t.word.symbols()), std::nullopt};
  }
  if (x == 0 && y == 0) return {EncounterWord::finite({}), 0};
  const QuadraticValue &s = launch.slope.value;
  QuadraticValue intercept = QuadraticValue(y) - s * QuadraticValue(x);
  return {EncounterWord::beatty(s, intercept), std::nullopt};
}

/// Throws CornerHit when the launch line passes through a lattice point.
inline EncounterWord cutting_word(const LaunchSpec &launch) {
  CuttingTrace t = trace_cutting_word(launch);
  if (t.corner) throw CornerHit(*t.corner, t.word.symbols());
  return std::move(t.word);
}

/// Horizontal crossings since the last vertical crossing, looking backwards
/// from the start. A start on the left wall has just had its vertical.
inline std::int64_t stage_of(const LaunchSpec &launch) {
  launch.validate();
  BigRational x = launch.x_forward(), y = launch.y_forward();
  if (x == 0) {
    if (y == 0) throw CornerHit(0, {});
    return 0;
  }
  QuadraticValue back = QuadraticValue(y) - launch.slope.value * QuadraticValue(x);
  if (back.is_rational() && denominator(back.as_rational()) == 1) throw CornerHit(0, {});
  return static_cast<std::int64_t>(-floor_exact(back));
}

inline std::uint64_t region_count(const BigRational &slope) {
  if (slope <= 0) throw std::invalid_argument("slope must be positive");
  return static_cast<std::uint64_t>(numerator(slope) + denominator(slope));
}

/// The word seen from just above the origin: phase 0 follows a vertical
/// crossing, and each later phase is one symbol further along.
inline std::vector<Symbol> canonical_period(const BigRational &slope) {
  BigRational eps(1, 2 * denominator(slope));
  return detail::rational_trace(0, eps, slope, region_count(slope)).word.symbols();
}

/// Index r such that the launch's word is the canonical period rotated left
/// by r. Throws CornerHit for starts on a corner line.
inline std::size_t region_of(const LaunchSpec &launch) {
  if (!launch.slope.is_rational()) throw std::invalid_argument("regions need a rational slope");
  std::vector<Symbol> word = cutting_word(launch).symbols();
  std::vector<Symbol> doubled = canonical_period(launch.slope.rational());
  const std::size_t n = doubled.size();
  doubled.insert(doubled.end(), doubled.begin(), doubled.end());
  auto it = std::search(doubled.begin(), doubled.end(), word.begin(), word.end());
  if (it == doubled.end() || static_cast<std::size_t>(it - doubled.begin()) >= n)
    throw std::logic_error("cutting word is not a rotation of the canonical period");
  return static_cast<std::size_t>(it - doubled.begin());
}

namespace detail {

struct Point {
  BigRational x, y;
};

// Clip a convex polygon to the half-plane q*y - p*x >= bound (or <= if !ge).
inline std::vector<Point> clip(const std::vector<Point> &poly, const BigRational &p,
                               const BigRational &q, const BigRational &bound, bool ge) {
  std::vector<Point> out;
  auto value = [&](const Point &pt) {
    BigRational v = q * pt.y - p * pt.x - bound;
    return ge ? v : BigRational(-v);
  };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point &a = poly[i];
    const Point &b = poly[(i + 1) % poly.size()];
    BigRational va = value(a), vb = value(b);
    if (va >= 0) out.push_back(a);
    if ((va > 0 && vb < 0) || (va < 0 && vb > 0)) {
      BigRational t = va / (va - vb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

inline Point centroid(const std::vector<Point> &poly) {
  BigRational area2 = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point &a = poly[i];
    const Point &b = poly[(i + 1) % poly.size()];
    BigRational cross = a.x * b.y - b.x * a.y;
    area2 += cross;
    cx += (a.x + b.x) * cross;
    cy += (a.y + b.y) * cross;
  }
  return {cx / (3 * area2), cy / (3 * area2)};
}

} // namespace detail

/// One interior point per region (the centroid of the strip of the unit
/// square between consecutive corner lines), indexed by region.
inline std::vector<LaunchSpec> representative_points(const BigRational &slope) {
  const std::uint64_t count = region_count(slope);
  const BigRational p = numerator(slope), q = denominator(slope);
  const std::vector<detail::Point> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<LaunchSpec> out(count);
  std::vector<bool> seen(count, false);
  // Corner lines are q*y - p*x = m for integer m; the open square meets the
  // strips m < q*y - p*x < m+1 for m = -p .. q-1.
  for (BigInt m = -numerator(slope); m < denominator(slope); ++m) {
    auto poly = detail::clip(square, p, q, BigRational(m), true);
    poly = detail::clip(poly, p, q, BigRational(m + 1), false);
    detail::Point c = detail::centroid(poly);
    LaunchSpec launch{c.x, c.y, 1, 1, SlopeSpec(QuadraticValue(slope))};
    std::size_t r = region_of(launch);
    if (seen[r]) throw std::logic_error("two strips share region " + std::to_string(r));
    seen[r] = true;
    out[r] = launch;
  }
  return out;
}

inline LaunchSpec representative_point(const BigRational &slope, std::uint64_t region) {
  if (region >= region_count(slope))
    throw std::out_of_range("region " + std::to_string(region) + " out of range for slope " +
                            to_string(slope) + " (" + std::to_string(region_count(slope)) +
                            " regions)");
  return representative_points(slope)[region];
}

inline EncounterWord word_from_chunks(const std::vector<std::string> &chunks) {
  std::vector<Symbol> out;
  for (const auto &c : chunks) {
    auto part = parse_word(c);
    out.insert(out.end(), part.begin(), part.end());
  }
  return EncounterWord::finite(std::move(out));
}

} // namespace wallbreak
