#pragma once

// Hand-traced reference runs and the verifier that replays them.
//
// Chunk traces (table1..table4) start just after the particle has cleared the
// previous column in the slope-3 way and passed through V(0,0) into cell
// (0,0) heading up-right; every encounter is compared.
//
// Wedge traces start on the left wall of a fresh plane with slope 3 (word
// HHHV, stage 0, heading up-right) and list collisions only, plus the closing
// pass that shows the period; passes are skipped unless they are the next
// expected step.

#include "bomb.hpp"
#include "driver.hpp"
#include "engine.hpp"

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallbreak {

struct ExpectedStep {
  EventKind kind = EventKind::Collision;
  WallId wall;
  std::optional<std::int8_t> sx, sy;   // direction afterwards
  std::optional<std::int64_t> stage;   // stage afterwards
};

struct TraceFixture {
  std::string id;
  std::string description;
  std::vector<WallId> initially_erased;
  ParticleState start;
  std::vector<Symbol> setup_word; // replayed before comparison starts
  std::vector<Symbol> word;       // one period if `periodic`
  bool periodic = false;
  BombPattern bomb = single_wall();
  std::vector<ExpectedStep> expected;
  bool collisions_only = false;
  std::uint64_t max_encounters = 100000;
};

struct TraceResult {
  bool passed = false;
  std::size_t steps_matched = 0;
  std::optional<std::size_t> divergent_step; // 1-based
  std::string message;
};

class UnknownScenario : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::optional<std::pair<std::int8_t, std::int8_t>> parse_dir(std::string_view d) {
  if (d.empty()) return std::nullopt;
  if (d.size() != 2) throw std::invalid_argument("bad direction " + std::string(d));
  std::int8_t sy = d[0] == 'U' ? 1 : -1;
  std::int8_t sx = d[1] == 'R' ? 1 : -1;
  return std::pair{sx, sy};
}

inline ExpectedStep hit(WallId w, std::string_view dir, std::optional<std::int64_t> stage = {}) {
  ExpectedStep s{EventKind::Collision, w, {}, {}, stage};
  if (auto d = parse_dir(dir)) {
    s.sx = d->first;
    s.sy = d->second;
  }
  return s;
}

inline ExpectedStep pass(WallId w, std::string_view dir = "", std::optional<std::int64_t> stage = {}) {
  ExpectedStep s = hit(w, dir, stage);
  s.kind = EventKind::Pass;
  return s;
}

// State after the previous column was cleared by slope-3 digging.
inline TraceFixture chunk_setup(std::string id, std::string description, std::string_view word) {
  TraceFixture f;
  f.id = std::move(id);
  f.description = std::move(description);
  f.initially_erased = {V(-1, -2), V(-1, -1), H(-1, -2), H(-1, -1), H(-1, 0), H(-1, 1), V(0, 0)};
  f.start = {0, 0, 1, 1, 0};
  f.word = parse_word(word);
  return f;
}

// The case with HHHHV first, shared by the setup of the eleven-chunk trace.
inline std::vector<ExpectedStep> first_chunk_long() {
  return {hit(H(0, 1), "DR"),  hit(H(0, 0), "UR"),   pass(H(0, 1), "UR"), hit(H(0, 2), "DR"),
          hit(V(1, 1), "DL"),  pass(H(0, 1), "DL"),  pass(H(0, 0), "DL"), hit(H(0, -1), "UL"),
          hit(V(0, -1), "UR"), pass(H(0, 0), "UR"),  pass(H(0, 1), "UR"), pass(H(0, 2), "UR"),
          hit(V(1, 2), "UL")};
}

inline TraceFixture wedge_setup(std::string id, std::string description, BombPattern bomb) {
  TraceFixture f;
  f.id = std::move(id);
  f.description = std::move(description);
  f.start = {0, 0, 1, 1, 0};
  f.word = parse_word("HHHV");
  f.periodic = true;
  f.bomb = std::move(bomb);
  f.collisions_only = true;
  return f;
}

// Slope 3, wedge of size 3k.
inline TraceFixture wedge_0mod3(std::int64_t k, bool winged) {
  auto f = wedge_setup("table6-k" + std::to_string(k) + (winged ? "-winged" : "-unwinged"),
                       "slope 3, " + std::string(winged ? "winged" : "unwinged") + " wedge of size " +
                           std::to_string(3 * k),
                       wedge(3 * k, winged));
  f.expected = {
      hit(H(0, 1), "DR", 1),
      hit(H(0, 0), "UR", 2),
      hit(V(k + 1, 3 * k + 1), "UL", 0),
      hit(H(k, 3 * k + 2), "DL", 1),
      hit(V(-k, -3 * k - 1), "DR", 0),
      hit(H(-k, -3 * k - 1), "UR", 1),
      hit(H(2 * k + 1, 6 * k + 3), "DR", 2),
      hit(H(4 * k + 1, 4), "UR", 1),
      hit(H(4 * k + 1, 5), "DR", 2),
      hit(V(5 * k + 2, -3 * k + 3), "DL", 0),
      hit(H(5 * k + 1, -3 * k + 3), "UL", 1),
      hit(V(2 * k + 2, 6 * k + 2), "UR", 0),
      hit(H(2 * k + 2, 6 * k + 3), "DR", 1),
      hit(H(6 * k + 2, -6 * k + 2), "UR", 2),
      hit(H(8 * k + 2, 1), "DR", 1),
      hit(H(8 * k + 2, 0), "UR", 2),
  };
  return f;
}

// Slope 3, winged wedge of size 3(2k+1)2^p - 2. With p = 0 this is the
// size 6k+1 case.
inline TraceFixture wedge_1mod3(std::int64_t k, std::int64_t p, bool winged = true) {
  const std::int64_t m = 2 * k + 1, P = std::int64_t{1} << p, Y = 3 * m * P;
  const std::int64_t n = Y - 2;
  auto f = wedge_setup((p == 0 ? "table7-k" + std::to_string(k)
                               : "table8-k" + std::to_string(k) + "-p" + std::to_string(p)) +
                           (winged ? "" : "-unwinged"),
                       "slope 3, " + std::string(winged ? "winged" : "unwinged") + " wedge of size " +
                           std::to_string(n),
                       wedge(n, winged));
  f.expected = {hit(H(0, 1), "DR", 1), hit(H(0, 0), "UR", 2)};
  std::int64_t offset = P; // (2^p + 2*2^(p-1) + ... ) in units of m
  for (std::int64_t i = 0; i <= p; ++i) {
    f.expected.push_back(hit(H(m * offset, Y), "DR", 2));
    if (i == p) break;
    std::int64_t half = std::int64_t{1} << (p - 1 - i);
    f.expected.push_back(hit(H(m * (offset + half), 3 * m * (P - half)), "UR", 2));
    offset += 2 * half;
  }
  f.expected.push_back(hit(V(Y - 3 * k - 1, Y - 3 * k - 2), "DL", 0));
  f.expected.push_back(hit(H(Y - 3 * k - 2, Y - 3 * k - 2), "UL", 1));
  f.expected.push_back(hit(H(2 * m * P - 4 * k - 2, 2 * Y - 1), "DL", 2));
  f.expected.push_back(hit(V(m * P - 3 * k - 1, Y + 3 * k), "DR", 0));
  f.expected.push_back(hit(H(m * P - 3 * k - 1, Y + 3 * k), "UR", 1));
  f.expected.push_back(pass(H(2 * m * P - 4 * k - 2, 2 * Y - 2), "UR", 2));
  return f;
}

} // namespace detail

/// Every reference trace, in a fixed order.
inline std::vector<TraceFixture> table_fixtures() {
  using namespace detail;
  std::vector<TraceFixture> out;

  auto t1 = chunk_setup("table1", "chunk HHHHV first", "HHHHVHHHVHHHV");
  t1.expected = first_chunk_long();
  out.push_back(t1);

  auto t2 = chunk_setup("table2", "chunk HHHHV second", "HHHVHHHHVHHHV");
  t2.expected = {hit(H(0, 1), "DR"),  hit(H(0, 0), "UR"),  pass(H(0, 1), "UR"), hit(V(1, 1), "UL"),
                 hit(H(0, 2), "DL"),  pass(H(0, 1), "DL"), pass(H(0, 0), "DL"), hit(H(0, -1), "UL"),
                 hit(V(0, -1), "UR"), pass(H(0, 0), "UR"), pass(H(0, 1), "UR"), pass(H(0, 2), "UR"),
                 hit(V(1, 2), "UL")};
  out.push_back(t2);

  auto t3 = chunk_setup("table3", "chunk HHHHV third", "HHHVHHHVHHHHV");
  t3.expected = {hit(H(0, 1), "DR"),  hit(H(0, 0), "UR"),  pass(H(0, 1), "UR"), hit(V(1, 1), "UL"),
                 hit(H(0, 2), "DL"),  pass(H(0, 1), "DL"), pass(H(0, 0), "DL"), hit(V(0, -1), "DR"),
                 hit(H(0, -1), "UR"), pass(H(0, 0), "UR"), pass(H(0, 1), "UR"), pass(H(0, 2), "UR"),
                 hit(V(1, 2), "UL")};
  out.push_back(t3);

  auto t4 = chunk_setup("table4", "eleven HHHV chunks after reconvergence", "");
  t4.setup_word = t1.word;
  for (int i = 0; i < 11; ++i) {
    auto c = parse_word("HHHV");
    t4.word.insert(t4.word.end(), c.begin(), c.end());
  }
  t4.expected = {
      hit(H(0, 3), "DL"),   pass(H(0, 2), "DL"),  pass(H(0, 1), "DL"),   pass(V(0, 0), "DL"),
      pass(H(-1, 0), "DL"), pass(H(-1, -1), "DL"), pass(H(-1, -2), "DL"), hit(V(-1, -3), "DR"),
      hit(H(-1, -3), "UR"), pass(H(-1, -2), "UR"), pass(H(-1, -1), "UR"), pass(V(0, -1), "UR"),
      pass(H(0, 0), "UR"),  pass(H(0, 1), "UR"),  pass(H(0, 2), "UR"),   pass(V(1, 2), "UR"),
      hit(H(1, 3), "DR"),   hit(H(1, 2), "UR"),   pass(H(1, 3), "UR"),   hit(V(2, 3), "UL"),
      hit(H(1, 4), "DL"),   pass(H(1, 3), "DL"),  pass(H(1, 2), "DL"),   pass(V(1, 1), "DL"),
      pass(H(0, 1), "DL"),  pass(H(0, 0), "DL"),  pass(H(0, -1), "DL"),  hit(V(0, -2), "DR"),
      hit(H(0, -2), "UR"),  pass(H(0, -1), "UR"), pass(H(0, 0), "UR"),   hit(V(1, 0), "UL"),
      pass(H(0, 1), "UL"),  pass(H(0, 2), "UL"),  pass(H(0, 3), "UL"),   hit(V(0, 3), "UR"),
      hit(H(0, 4), "DR"),   pass(H(0, 3), "DR"),  pass(H(0, 2), "DR"),   pass(V(1, 1), "DR"),
      hit(H(1, 1), "UR"),   pass(H(1, 2), "UR"),  pass(H(1, 3), "UR"),   pass(V(2, 3), "UR"),
  };
  out.push_back(t4);

  for (std::int64_t k : {1, 2})
    for (bool winged : {true, false}) out.push_back(wedge_0mod3(k, winged));
  for (std::int64_t k : {0, 1, 2}) out.push_back(wedge_1mod3(k, 0));
  for (auto [k, p] : {std::pair<std::int64_t, std::int64_t>{0, 1}, {0, 2}, {1, 1}})
    out.push_back(wedge_1mod3(k, p));
  return out;
}

inline std::string describe(const ExpectedStep &s) {
  std::ostringstream o;
  o << (s.kind == EventKind::Collision ? "hit " : "pass ") << to_string(s.wall);
  if (s.sx) o << ' ' << (*s.sy > 0 ? 'U' : 'D') << (*s.sx > 0 ? 'R' : 'L');
  if (s.stage) o << " stage " << *s.stage;
  return o.str();
}

inline std::string describe(const Event &e) {
  std::ostringstream o;
  o << (e.kind == EventKind::Collision ? "hit " : "pass ") << to_string(e.wall) << ' '
    << (e.sy > 0 ? 'U' : 'D') << (e.sx > 0 ? 'R' : 'L') << " stage " << e.stage;
  return o.str();
}

inline bool matches(const ExpectedStep &s, const Event &e) {
  return s.kind == e.kind && s.wall == e.wall && (!s.sx || (*s.sx == e.sx && *s.sy == e.sy)) &&
         (!s.stage || *s.stage == e.stage);
}

inline TraceResult verify_trace(const TraceFixture &f) {
  ParticleState st = f.start;
  WallState walls(f.initially_erased);
  PlacedBomb bomb(f.bomb);
  for (Symbol s : f.setup_word) step_symbolic(st, walls, bomb, s);

  TraceResult res;
  std::size_t next = 0, pos = 0;
  for (std::uint64_t enc = 1; next < f.expected.size(); ++enc) {
    if (enc > f.max_encounters || (!f.periodic && pos >= f.word.size())) {
      res.divergent_step = next + 1;
      res.message = "run ended before step " + std::to_string(next + 1) + " (" +
                    describe(f.expected[next]) + ")";
      return res;
    }
    Symbol sym = f.word[pos++];
    if (f.periodic && pos == f.word.size()) pos = 0;
    Event e = step_symbolic(st, walls, bomb, sym);
    const ExpectedStep &want = f.expected[next];
    if (f.collisions_only && e.kind == EventKind::Pass && !matches(want, e)) continue;
    if (!matches(want, e)) {
      res.divergent_step = next + 1;
      res.message = "step " + std::to_string(next + 1) + ": expected " + describe(want) + ", got " +
                    describe(e) + " at encounter " + std::to_string(enc);
      return res;
    }
    ++next;
    res.steps_matched = next;
  }
  res.passed = true;
  res.message = std::to_string(res.steps_matched) + " steps match";
  return res;
}

inline TraceResult verify_trace(const std::string &id) {
  for (const auto &f : table_fixtures())
    if (f.id == id) return verify_trace(f);
  throw UnknownScenario("unknown scenario " + id);
}

/// FNV-1a digest of every fixture's content, for version reporting.
inline std::uint64_t fixture_digest() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::string &s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto &f : table_fixtures()) {
    mix(f.id);
    for (const auto &w : f.initially_erased) mix(to_string(w));
    mix(to_string(f.setup_word));
    mix(to_string(f.word));
    mix(serialize_bomb(f.bomb));
    for (const auto &s : f.expected) mix(describe(s));
  }
  return h;
}

} // namespace wallbreak
