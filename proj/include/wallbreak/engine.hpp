#pragma once

// The step loop. Each encounter is either a pass through an erased wall or a
// collision: the particle reflects, and the bomb rotated onto the hit wall is
// erased. Symbols come from an encounter word (symbolic mode) or from exact
// line/grid intersection (geometric mode); both give identical event logs on
// corner-free launches.

#include "bomb.hpp"
#include "driver.hpp"
#include "grid.hpp"
#include "tunnel.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wallbreak {

struct ParticleState {
  std::int64_t cx = 0, cy = 0; // cell [cx,cx+1] x [cy,cy+1]
  int sx = 1, sy = 1;
  std::int64_t stage = 0; // H encounters since the last V encounter
  friend bool operator==(const ParticleState &, const ParticleState &) = default;
};

enum class EventKind : std::uint8_t { Collision, Pass };

struct Event {
  std::uint64_t encounter = 0; // 1-based
  std::uint64_t collision = 0; // collisions so far, including this one
  EventKind kind = EventKind::Pass;
  WallId wall;
  std::int64_t cell_x = 0, cell_y = 0; // before the encounter
  std::int8_t sx = 1, sy = 1;          // after
  std::int64_t stage = 0;              // after
  friend bool operator==(const Event &, const Event &) = default;
};

inline void write_event_jsonl(std::ostream &out, const Event &e) {
  out << "{\"i\":" << e.encounter << ",\"kind\":\""
      << (e.kind == EventKind::Collision ? "collision" : "pass") << "\",\"wall\":{\"o\":\""
      << to_char(e.wall.orientation) << "\",\"x\":" << e.wall.x << ",\"y\":" << e.wall.y
      << "},\"cell\":[" << e.cell_x << ',' << e.cell_y << "],\"dir\":[" << int(e.sx) << ','
      << int(e.sy) << "],\"stage\":" << e.stage << "}\n";
}

inline std::ostream &operator<<(std::ostream &os, const Event &e) {
  write_event_jsonl(os, e);
  return os;
}

/// One encounter: the wall ahead in the symbol's direction is hit if solid
/// (bomb erased, sign flipped) or passed if already erased.
inline Event step_symbolic(ParticleState &st, WallState &walls, const PlacedBomb &bomb, Symbol sym) {
  Event e;
  e.cell_x = st.cx;
  e.cell_y = st.cy;
  ApproachSide side;
  if (sym == Symbol::H) {
    e.wall = H(st.cx, st.sy > 0 ? st.cy + 1 : st.cy);
    side = st.sy > 0 ? ApproachSide::Below : ApproachSide::Above;
  } else {
    e.wall = V(st.sx > 0 ? st.cx + 1 : st.cx, st.cy);
    side = st.sx > 0 ? ApproachSide::Left : ApproachSide::Right;
  }
  if (walls.is_solid(e.wall)) {
    e.kind = EventKind::Collision;
    for (const WallId &off : bomb.offsets(side))
      walls.erase({off.orientation, e.wall.x + off.x, e.wall.y + off.y});
    if (sym == Symbol::H)
      st.sy = -st.sy;
    else
      st.sx = -st.sx;
  } else {
    e.kind = EventKind::Pass;
    if (sym == Symbol::H)
      st.cy += st.sy;
    else
      st.cx += st.sx;
  }
  st.stage = sym == Symbol::H ? st.stage + 1 : 0;
  e.sx = static_cast<std::int8_t>(st.sx);
  e.sy = static_cast<std::int8_t>(st.sy);
  e.stage = st.stage;
  return e;
}

/// An explicit word driving the particle from a given state.
struct InjectedWord {
  EncounterWord word;
  ParticleState start;
};

struct RunConfig {
  std::variant<LaunchSpec, InjectedWord> source;
  BombPattern bomb = single_wall();
  std::vector<WallId> initially_erased;
  std::uint64_t max_collisions = 1'000'000; // 0: unlimited
  std::uint64_t max_encounters = 0;         // 0: unlimited
  std::optional<DetectorConfig> detector;
  bool stop_on_tunnel = true;
  bool record_events = false;
  std::function<void(const Event &)> sink;
};

enum class OutcomeKind { Tunnel, Corner, CapReached, WordExhausted };

inline const char *to_string(OutcomeKind k) {
  switch (k) {
  case OutcomeKind::Tunnel: return "tunnel";
  case OutcomeKind::Corner: return "corner";
  case OutcomeKind::CapReached: return "cap";
  case OutcomeKind::WordExhausted: return "word-exhausted";
  }
  return "?";
}

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::CapReached;
  std::optional<TunnelReport> tunnel;
  std::optional<std::uint64_t> corner_encounter;
  std::uint64_t encounters = 0;
  std::uint64_t collisions = 0;
  std::size_t walls_erased = 0;
  std::optional<IntBox> bounding_box;
  ParticleState final_state;
};

struct RunResult {
  RunOutcome outcome;
  std::vector<Event> events;
  WallState walls;
};

/// A run that can be advanced in stages.
class Simulation {
public:
  enum class Mode { Symbolic, Geometric };

  explicit Simulation(RunConfig cfg, Mode mode = Mode::Symbolic)
      : cfg_(std::move(cfg)), placed_(cfg_.bomb), walls_(cfg_.initially_erased) {
    if (auto *launch = std::get_if<LaunchSpec>(&cfg_.source)) {
      launch->validate();
      state_ = {0, 0, launch->sx, launch->sy, 0};
      if (mode == Mode::Geometric) {
        if (!launch->slope.is_rational())
          throw std::invalid_argument("geometric mode needs a rational slope");
        source_ = Source::Geometric;
        px_ = launch->x;
        py_ = launch->y;
        slope_ = launch->slope.rational();
        if (px_ == 0 && py_ == 0) pending_corner_ = 0;
      } else {
        CuttingTrace trace = trace_cutting_word(*launch);
        pending_corner_ = trace.corner;
        word_ = std::move(trace.word);
      }
      if (!pending_corner_ || *pending_corner_ > 0) {
        try {
          state_.stage = stage_of(*launch);
        } catch (const CornerHit &) {
          // The line runs through a lattice point behind the start; the
          // stage count is still the number of H crossings since the last V.
          state_.stage = corner_line_stage(*launch);
        }
      }
    } else {
      if (mode == Mode::Geometric) throw std::invalid_argument("geometric mode needs a launch");
      auto &inj = std::get<InjectedWord>(cfg_.source);
      word_ = inj.word;
      state_ = inj.start;
    }
    if (source_ != Source::Geometric) {
      if (word_.kind() == EncounterWord::Kind::Periodic) {
        source_ = Source::Periodic;
        period_ = word_.symbols();
        pos_ = word_.phase();
        const std::size_t len = period_.size();
        run_length_.assign(len, 1);
        // runs of equal symbols, allowed to wrap around the period
        for (std::size_t i = 2 * len; i-- > 0;) {
          std::size_t at = i % len, nxt = (i + 1) % len;
          if (i + 1 < 2 * len && period_[at] == period_[nxt])
            run_length_[at] = std::min<std::uint64_t>(run_length_[nxt] + 1, len);
          else if (i + 1 < 2 * len)
            run_length_[at] = 1;
        }
      } else {
        source_ = Source::Cursor;
        cursor_.emplace(word_.cursor());
      }
    }
    if (cfg_.detector) {
      DetectorConfig dc = *cfg_.detector;
      std::uint64_t word_period = 0;
      if (auto *launch = std::get_if<LaunchSpec>(&cfg_.source); launch && launch->slope.is_rational())
        word_period = region_count(launch->slope.rational());
      else if (source_ == Source::Periodic)
        word_period = period_.size();
      dc.min_span_encounters = std::max(dc.min_span_encounters, dc.confirmations * word_period);
      detector_.emplace(dc);
    }
  }

  Simulation(const Simulation &) = delete;
  Simulation &operator=(const Simulation &) = delete;

  /// Advances until the collision count reaches `collision_cap` (0: no cap)
  /// or the run terminates.
  const RunOutcome &advance(std::uint64_t collision_cap) {
    if (done_) return outcome_;
    const std::uint64_t encounter_cap = cfg_.max_encounters;
    const bool observe = cfg_.record_events || static_cast<bool>(cfg_.sink);
    for (;;) {
      if (collision_cap != 0 && collisions_ >= collision_cap) {
        finish(OutcomeKind::CapReached, false);
        break;
      }
      if (encounter_cap != 0 && encounters_ >= encounter_cap) {
        finish(OutcomeKind::CapReached, true);
        break;
      }
      Symbol sym;
      if (source_ == Source::Periodic) {
        sym = period_[pos_];
        if (!observe && run_length_[pos_] >= 3) {
          // Skip a run of passes through erased walls in one go.
          std::uint64_t run = run_length_[pos_];
          if (encounter_cap != 0) run = std::min(run, encounter_cap - encounters_);
          const bool h = sym == Symbol::H;
          const WallId ahead = h ? H(state_.cx, state_.sy > 0 ? state_.cy + 1 : state_.cy)
                                 : V(state_.sx > 0 ? state_.cx + 1 : state_.cx, state_.cy);
          const std::uint64_t n = walls_.erased_run(ahead, h ? state_.sy : state_.sx, run);
          if (n > 0) {
            const auto step = static_cast<std::int64_t>(n);
            if (h) {
              state_.cy += state_.sy > 0 ? step : -step;
              state_.stage += step;
            } else {
              state_.cx += state_.sx > 0 ? step : -step;
              state_.stage = 0;
            }
            encounters_ += n;
            pos_ = static_cast<std::size_t>((pos_ + n) % period_.size());
            continue;
          }
        }
        if (++pos_ == period_.size()) pos_ = 0;
      } else if (source_ == Source::Cursor) {
        auto s = cursor_->next();
        if (!s) {
          if (pending_corner_) {
            outcome_.corner_encounter = pending_corner_;
            finish(OutcomeKind::Corner, true);
          } else {
            finish(OutcomeKind::WordExhausted, true);
          }
          break;
        }
        sym = *s;
      } else {
        auto s = geometric_next();
        if (!s) {
          outcome_.corner_encounter = encounters_ + 1;
          finish(OutcomeKind::Corner, true);
          break;
        }
        sym = *s;
      }
      Event e = step_symbolic(state_, walls_, placed_, sym);
      e.encounter = ++encounters_;
      if (e.kind == EventKind::Collision) ++collisions_;
      e.collision = collisions_;
      if (observe) {
        if (cfg_.record_events) events_.push_back(e);
        if (cfg_.sink) cfg_.sink(e);
      }
      if (e.kind == EventKind::Collision && detector_) {
        CollisionRecord rec{e.collision, e.encounter, e.wall, e.sx, e.sy, e.stage};
        if (detector_->observe(rec) && cfg_.stop_on_tunnel) {
          outcome_.tunnel = detector_->report();
          finish(OutcomeKind::Tunnel, true);
          break;
        }
      }
    }
    return outcome_;
  }

  /// Advances to the configured cap, then gives the detector a last look:
  /// the cap may fall between its periodic checks.
  const RunOutcome &conclude() {
    advance(cfg_.max_collisions);
    if (!done_ && detector_ && (detector_->report() || detector_->check())) {
      outcome_.tunnel = detector_->report();
      if (cfg_.stop_on_tunnel) outcome_.kind = OutcomeKind::Tunnel;
    }
    return outcome_;
  }

  /// Runs to the configured cap and hands back everything.
  RunResult finish_run() {
    conclude();
    return {outcome_, std::move(events_), std::move(walls_)};
  }

  const RunOutcome &outcome() const { return outcome_; }
  bool done() const { return done_; }
  const WallState &walls() const { return walls_; }
  const ParticleState &state() const { return state_; }
  std::uint64_t collisions() const { return collisions_; }
  std::uint64_t encounters() const { return encounters_; }
  const std::optional<TunnelDetector> &detector() const { return detector_; }
  const std::vector<Event> &events() const { return events_; }

private:
  enum class Source { Periodic, Cursor, Geometric };

  static std::int64_t corner_line_stage(const LaunchSpec &launch) {
    BigRational x = launch.x_forward(), y = launch.y_forward();
    if (x == 0) return 0;
    QuadraticValue back = QuadraticValue(y) - launch.slope.value * QuadraticValue(x);
    // Only crossings strictly after the lattice point are counted.
    return static_cast<std::int64_t>(-floor_exact(back));
  }

  // Next crossing of the exact straight path, or nullopt at a corner.
  std::optional<Symbol> geometric_next() {
    if (pending_corner_) return std::nullopt;
    BigRational bx = state_.sx > 0 ? BigRational(state_.cx + 1) : BigRational(state_.cx);
    BigRational by = state_.sy > 0 ? BigRational(state_.cy + 1) : BigRational(state_.cy);
    BigRational dx = state_.sx > 0 ? BigRational(bx - px_) : BigRational(px_ - bx);
    BigRational dy = state_.sy > 0 ? BigRational(by - py_) : BigRational(py_ - by);
    BigRational rise = dx * slope_; // vertical travel needed to reach bx
    if (rise == dy) return std::nullopt;
    if (rise < dy) {
      px_ = bx;
      py_ += state_.sy > 0 ? rise : BigRational(-rise);
      return Symbol::V;
    }
    BigRational run = dy / slope_;
    px_ += state_.sx > 0 ? run : BigRational(-run);
    py_ = by;
    return Symbol::H;
  }

  void finish(OutcomeKind kind, bool terminal) {
    outcome_.kind = kind;
    outcome_.encounters = encounters_;
    outcome_.collisions = collisions_;
    outcome_.walls_erased = walls_.erased_count();
    outcome_.bounding_box = walls_.erased_bounding_box();
    outcome_.final_state = state_;
    if (!outcome_.tunnel && detector_ && detector_->report()) outcome_.tunnel = detector_->report();
    done_ = terminal;
  }

  RunConfig cfg_;
  PlacedBomb placed_;
  WallState walls_;
  ParticleState state_;
  EncounterWord word_;
  Source source_ = Source::Cursor;
  std::vector<Symbol> period_;
  std::vector<std::uint64_t> run_length_;
  std::size_t pos_ = 0;
  std::optional<EncounterWord::Cursor> cursor_;
  std::optional<std::uint64_t> pending_corner_;
  BigRational px_, py_, slope_;
  std::optional<TunnelDetector> detector_;
  std::vector<Event> events_;
  std::uint64_t encounters_ = 0, collisions_ = 0;
  RunOutcome outcome_;
  bool done_ = false;
};

inline RunResult run(RunConfig cfg) {
  Simulation sim(std::move(cfg), Simulation::Mode::Symbolic);
  return sim.finish_run();
}

inline RunResult run_geometric(RunConfig cfg) {
  Simulation sim(std::move(cfg), Simulation::Mode::Geometric);
  return sim.finish_run();
}

inline std::vector<CollisionRecord> collision_records(const std::vector<Event> &events) {
  std::vector<CollisionRecord> out;
  for (const auto &e : events)
    if (e.kind == EventKind::Collision)
      out.push_back({e.collision, e.encounter, e.wall, e.sx, e.sy, e.stage});
  return out;
}

} // namespace wallbreak
