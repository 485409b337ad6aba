#pragma once

// Periodic tunnel detection over the collision stream, plus a least-squares
// band estimator for runs that dig without repeating exactly.
//
// A run is reported as a periodic tunnel with period k once the newest
// window of collisions each repeat collision t-k in wall orientation,
// direction after the bounce, and stage, with the anchor displacement taking
// one nonzero value (or two antiparallel values for a tunnel dug in both
// directions). This is confirmation over a finite window, not a proof.

#include "exactnum.hpp"
#include "grid.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallbreak {

struct CollisionRecord {
  std::uint64_t collision = 0; // 1-based collision ordinal
  std::uint64_t encounter = 0; // 1-based encounter ordinal
  WallId wall;
  std::int8_t sx = 1, sy = 1; // direction after the bounce
  std::int64_t stage = 0;

  bool same_type(const CollisionRecord &o) const {
    return wall.orientation == o.wall.orientation && sx == o.sx && sy == o.sy && stage == o.stage;
  }
};

struct Displacement {
  std::int64_t dx = 0, dy = 0;
  friend bool operator==(const Displacement &, const Displacement &) = default;
  bool is_zero() const { return dx == 0 && dy == 0; }
};

inline std::string to_string(const Displacement &d) {
  return "(" + std::to_string(d.dx) + "," + std::to_string(d.dy) + ")";
}

inline bool antiparallel(const Displacement &a, const Displacement &b) {
  // cross product zero and opposite directions
  return static_cast<__int128>(a.dx) * b.dy == static_cast<__int128>(a.dy) * b.dx &&
         static_cast<__int128>(a.dx) * b.dx + static_cast<__int128>(a.dy) * b.dy < 0;
}

struct DetectorConfig {
  std::uint32_t max_period = 4096;   // largest candidate period K
  std::uint32_t confirmations = 3;   // periods C that must repeat
  std::uint32_t history = 0;         // records kept M; 0 sizes it automatically
  std::uint64_t min_collisions = 0;  // no report before this many collisions
  std::uint32_t min_window = 64;     // window never shorter than this
  std::uint32_t check_interval = 128;
  // The window must also cover this many encounters. A run driven by a
  // periodic word can only repeat after whole word periods, so the engine
  // raises this to C word periods.
  std::uint64_t min_span_encounters = 0;
  // Band estimation for runs that never repeat exactly.
  double band_tolerance = 3.0;    // epsilon: allowed distance from the ray
  double exclusion_radius = 0.0;  // r: collisions closer to the start are ignored
  std::size_t band_min_points = 32;

  std::uint32_t window(std::uint64_t period) const {
    auto w = static_cast<std::uint64_t>(confirmations) * period;
    return static_cast<std::uint32_t>(std::max<std::uint64_t>(w, min_window));
  }
  std::uint32_t history_size() const {
    std::uint64_t need = static_cast<std::uint64_t>(confirmations + 1) * max_period + min_window +
                         check_interval + 1;
    if (history != 0) {
      if (history < need) throw std::invalid_argument("detector history shorter than (C+1)K");
      return history;
    }
    return static_cast<std::uint32_t>(need);
  }
};

/// Exact |dy/dx|; `vertical` when dx == 0.
struct BandSlope {
  BigRational value = 0;
  bool vertical = false;
  friend bool operator==(const BandSlope &, const BandSlope &) = default;
};

inline std::string to_string(const BandSlope &s) { return s.vertical ? "vertical" : to_string(s.value); }

inline BandSlope band_slope_of(const Displacement &d) {
  if (d.dx == 0) return {0, true};
  return {BigRational(d.dy < 0 ? -d.dy : d.dy, d.dx < 0 ? -d.dx : d.dx), false};
}

struct TunnelReport {
  std::uint64_t period = 0;                  // collisions per period
  std::vector<Displacement> classes;         // one, or two antiparallel
  std::uint64_t onset = 0;                   // first collision of the periodic regime
  std::uint64_t detected_at = 0;             // collision count at confirmation
  std::uint32_t confirmations = 0;           // periods covered by the window
  std::optional<std::uint64_t> period_encounters; // constant encounter gap, if any
  BandSlope band_slope;
  bool periodic = true;

  bool bidirectional() const { return classes.size() == 2; }
};

/// Streaming detector; feed it every collision in order.
class TunnelDetector {
public:
  explicit TunnelDetector(DetectorConfig cfg = {})
      : cfg_(cfg), ring_(cfg_.history_size()) {}

  const DetectorConfig &config() const { return cfg_; }

  /// Returns true once a tunnel has been confirmed.
  bool observe(const CollisionRecord &r) {
    ring_[r.collision % ring_.size()] = r;
    newest_ = r.collision;
    if (report_) return true;
    if (newest_ < cfg_.min_collisions || newest_ % cfg_.check_interval != 0) return false;
    return check();
  }

  /// Runs the candidate search now, regardless of the check interval.
  bool check() {
    if (report_) return true;
    for (std::uint64_t k = 1; k <= cfg_.max_period; ++k) {
      std::uint64_t w = cfg_.window(k);
      if (newest_ < w + k || w + k > ring_.size()) break;
      if (try_period(k, w)) return true;
    }
    return false;
  }

  const std::optional<TunnelReport> &report() const { return report_; }
  std::uint64_t collisions_seen() const { return newest_; }

private:
  const CollisionRecord &at(std::uint64_t t) const { return ring_[t % ring_.size()]; }

  static Displacement delta(const CollisionRecord &a, const CollisionRecord &b) {
    return {b.wall.x - a.wall.x, b.wall.y - a.wall.y};
  }

  // Matches pair (t-k, t) against the class list; may add a class.
  static bool accept(const Displacement &d, std::vector<Displacement> &classes) {
    if (d.is_zero()) return false;
    for (const auto &c : classes)
      if (c == d) return true;
    if (classes.size() == 1 && antiparallel(classes[0], d)) {
      classes.push_back(d);
      return true;
    }
    return classes.empty() ? (classes.push_back(d), true) : false;
  }

  bool try_period(std::uint64_t k, std::uint64_t w) {
    while (at(newest_).encounter - at(newest_ - w + 1).encounter < cfg_.min_span_encounters) {
      w += k;
      if (newest_ < w + k || w + k > ring_.size()) return false;
    }
    std::vector<Displacement> classes;
    std::optional<std::uint64_t> gap;
    bool gap_constant = true;
    const std::uint64_t first = newest_ - w + 1;
    for (std::uint64_t t = newest_; t >= first; --t) {
      const CollisionRecord &cur = at(t), &old = at(t - k);
      if (!cur.same_type(old) || !accept(delta(old, cur), classes)) return false;
      std::uint64_t g = cur.encounter - old.encounter;
      if (!gap)
        gap = g;
      else if (*gap != g)
        gap_constant = false;
    }
    // Walk back to where the match starts.
    std::uint64_t start = first;
    const std::uint64_t oldest = newest_ >= ring_.size() ? newest_ - ring_.size() + 1 : 1;
    while (start > oldest + k) {
      const CollisionRecord &cur = at(start - 1), &old = at(start - 1 - k);
      std::vector<Displacement> probe = classes;
      if (!cur.same_type(old) || !accept(delta(old, cur), probe) || probe.size() != classes.size())
        break;
      --start;
    }
    TunnelReport rep;
    rep.period = k;
    rep.classes = classes;
    rep.onset = start - k;
    rep.detected_at = newest_;
    rep.confirmations = static_cast<std::uint32_t>(w / k);
    if (gap_constant && classes.size() == 1) rep.period_encounters = gap;
    rep.band_slope = band_slope_of(classes.front());
    if (classes.size() > 2 || (classes.size() == 2 && !antiparallel(classes[0], classes[1])))
      throw std::logic_error("tunnel report violates the two-band limit");
    report_ = std::move(rep);
    return true;
  }

  DetectorConfig cfg_;
  std::vector<CollisionRecord> ring_;
  std::uint64_t newest_ = 0;
  std::optional<TunnelReport> report_;
};

/// Batch form over a complete collision log (ordinals must run 1..n).
inline std::optional<TunnelReport> detect_tunnel(std::span<const CollisionRecord> log,
                                                 DetectorConfig cfg = {}) {
  TunnelDetector det(cfg);
  for (const auto &r : log)
    if (det.observe(r)) return det.report();
  if (log.size() >= cfg.min_collisions) det.check();
  return det.report();
}

// ---------------------------------------------------------------------------
// Band estimation

struct PlanePoint {
  double x = 0, y = 0;
};

/// Midpoint of a wall segment.
inline PlanePoint midpoint(const WallId &w) {
  double x = static_cast<double>(w.x), y = static_cast<double>(w.y);
  return w.orientation == Orientation::H ? PlanePoint{x + 0.5, y} : PlanePoint{x, y + 0.5};
}

struct BandEstimate {
  PlanePoint origin;     // a point on the fitted line
  PlanePoint direction;  // unit vector pointing away from the start
  double max_deviation = 0;
  std::size_t points = 0;
};

/// Total-least-squares ray through the points lying outside the exclusion
/// radius around `center`.
inline std::optional<BandEstimate> estimate_band(std::span<const PlanePoint> positions,
                                                 const DetectorConfig &cfg,
                                                 PlanePoint center = {0.5, 0.5}) {
  std::vector<PlanePoint> pts;
  for (const auto &p : positions)
    if (std::hypot(p.x - center.x, p.y - center.y) > cfg.exclusion_radius) pts.push_back(p);
  if (pts.size() < cfg.band_min_points || pts.empty()) return std::nullopt;
  double mx = 0, my = 0;
  for (const auto &p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto &p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  // principal axis of the scatter matrix
  double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
  PlanePoint dir{std::cos(theta), std::sin(theta)};
  if ((mx - center.x) * dir.x + (my - center.y) * dir.y < 0) dir = {-dir.x, -dir.y};
  BandEstimate est{{mx, my}, dir, 0, pts.size()};
  for (const auto &p : pts) {
    double dev = std::abs((p.x - mx) * dir.y - (p.y - my) * dir.x);
    est.max_deviation = std::max(est.max_deviation, dev);
  }
  return est;
}

/// Aperiodic tunnel test: fit the band on growing prefixes whose extent
/// doubles and require the deviation to plateau (within band_tolerance).
inline bool deviation_plateaus(std::span<const PlanePoint> positions, const DetectorConfig &cfg,
                               PlanePoint center = {0.5, 0.5}) {
  if (positions.size() < 4 * cfg.band_min_points) return false;
  std::vector<double> devs;
  const std::size_t total = positions.size();
  for (std::size_t n : {total / 4, total / 2, total}) {
    auto est = estimate_band(positions.first(n), cfg, center);
    if (!est) return false;
    devs.push_back(est->max_deviation);
  }
  if (devs.size() < 2) return false;
  double last = devs.back(), prev = devs[devs.size() - 2];
  return last <= cfg.band_tolerance || last <= prev + cfg.band_tolerance;
}

} // namespace wallbreak
