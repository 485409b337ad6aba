#pragma once

// Closed-form predictions: the slope of the near-3 reorganizing tunnel, the
// integer slopes whose fresh-column bounce lands on a free slot, the
// fresh-column encounter schedule, and wedge-bomb tunnel periods for slope 3.

#include "exactnum.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallbreak {

inline const BigRational &reorg_slope_upper_bound() {
  static const BigRational bound = BigRational(3) + BigRational(1, 17);
  return bound;
}

/// Tunnel slope 1 + (3s-9)/(25-8s) for 3 <= s <= 3+1/17.
inline BigRational predicted_reorg_slope(const BigRational &s) {
  if (s < 3 || s > reorg_slope_upper_bound())
    throw std::domain_error("reorganization slope is defined for 3 <= s <= 3+1/17, got " +
                            to_string(s));
  return BigRational(1) + (3 * s - 9) / (25 - 8 * s);
}

struct SlopeSequenceTerm {
  BigInt s, x, y;
};

/// s_1 = 3, s_{n+1} = 6s^2 - 8s + 3, with x_1 = 1, y_1 = 2,
/// x_{n+1} = 2xy, y_{n+1} = 6x^2 + 1. Throws std::logic_error if any of
/// s = 2x^2+1, 3s = 2y^2+1, s = 3 (mod 10) fails.
inline std::vector<SlopeSequenceTerm> s_sequence(std::size_t count) {
  if (count == 0) throw std::invalid_argument("count must be at least 1");
  std::vector<SlopeSequenceTerm> out;
  BigInt s = 3, x = 1, y = 2;
  for (std::size_t n = 1; n <= count; ++n) {
    if (s != 2 * x * x + 1 || 3 * s != 2 * y * y + 1 || s % 10 != 3)
      throw std::logic_error("slope sequence identity fails at n=" + std::to_string(n));
    out.push_back({s, x, y});
    BigInt s_next = 6 * s * s - 8 * s + 3;
    BigInt x_next = 2 * x * y;
    BigInt y_next = 6 * x * x + 1;
    s = s_next;
    x = x_next;
    y = y_next;
  }
  return out;
}

/// Entry times into one square in one direction, with the quadratic fit
/// 2k^2 + bk + c taken from the first two terms.
struct SquareSchedule {
  std::vector<std::uint64_t> times; // times[k-1] = k-th entry
  BigInt b = 0, c = 0;

  bool fits() const {
    for (std::size_t i = 0; i < times.size(); ++i) {
      BigInt k = static_cast<std::int64_t>(i + 1);
      if (BigInt(times[i]) != 2 * k * k + b * k + c) return false;
    }
    return true;
  }
  std::vector<std::int64_t> second_differences() const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 2; i < times.size(); ++i)
      out.push_back(static_cast<std::int64_t>(times[i]) - 2 * static_cast<std::int64_t>(times[i - 1]) +
                    static_cast<std::int64_t>(times[i - 2]));
    return out;
  }
};

struct ColumnProfile {
  std::map<std::int64_t, SquareSchedule> down; // d(n)
  std::map<std::int64_t, SquareSchedule> up;   // u(n)
};

/// Bounce model of a fresh column: horizontal walls only, single-wall bomb,
/// starting in square 0 heading up. Time n is the n-th horizontal encounter.
inline ColumnProfile column_profile(std::int64_t lo, std::int64_t hi, std::size_t k_max) {
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  if (lo > hi) throw std::invalid_argument("empty square range");
  ColumnProfile prof;
  for (std::int64_t n = lo; n <= hi; ++n) {
    prof.down[n];
    prof.up[n];
  }
  std::map<std::int64_t, bool> erased;
  std::int64_t square = 0;
  int dir = 1;
  auto done = [&] {
    for (std::int64_t n = lo; n <= hi; ++n)
      if (prof.down[n].times.size() < k_max || prof.up[n].times.size() < k_max) return false;
    return true;
  };
  for (std::uint64_t t = 1; !done(); ++t) {
    std::int64_t wall = dir > 0 ? square + 1 : square;
    if (!erased[wall]) {
      erased[wall] = true;
      dir = -dir;
    } else {
      square += dir;
    }
    if (square >= lo && square <= hi) {
      auto &sched = dir > 0 ? prof.up[square] : prof.down[square];
      if (sched.times.size() < k_max) sched.times.push_back(t);
    }
  }
  for (auto *side : {&prof.down, &prof.up})
    for (auto &[n, sched] : *side) {
      BigInt t1 = sched.times[0], t2 = sched.times[1];
      sched.b = t2 - t1 - 6;
      sched.c = t1 - 2 - sched.b;
    }
  return prof;
}

/// n + 2 = 3 (2k+1) 2^p for wedge sizes n = 1 (mod 3).
struct WedgeDecomposition {
  std::int64_t k = 0, p = 0;
};

inline std::optional<WedgeDecomposition> decompose_wedge_size(std::int64_t n) {
  if (n < 1 || n % 3 != 1) return std::nullopt;
  std::int64_t m = (n + 2) / 3, p = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++p;
  }
  return WedgeDecomposition{(m - 1) / 2, p};
}

struct WedgePrediction {
  std::optional<std::uint64_t> period; // collisions per period
  bool conjectural = false;            // sizes 2 mod 3 are not covered by a proof
  std::string reason;
};

/// Tunnel period for slope 3 started on the left wall with a wedge of size n.
inline WedgePrediction predict_wedge_period(std::int64_t n, bool winged) {
  if (n < 1) throw std::invalid_argument("wedge size must be at least 1");
  if (n % 3 == 0) return {14, false, "size divisible by 3"};
  if (n % 3 == 2) return {std::nullopt, true, "size 2 mod 3 is open"};
  auto [k, p] = *decompose_wedge_size(n);
  std::string form = "n+2 = 3*" + std::to_string(2 * k + 1) + "*2^" + std::to_string(p);
  auto period = static_cast<std::uint64_t>(6 + 2 * p);
  if (winged) return {period, false, form};
  if (k > 0) return {period, false, form + ", k>0"};
  return {std::nullopt, false, form + ", k=0 blocks the unwinged path"};
}

} // namespace wallbreak
