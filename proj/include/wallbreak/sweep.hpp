#pragma once

// Batch runs over slopes x start regions x bombs, with an append-style
// checkpoint so an interrupted sweep resumes where it stopped. Records depend
// only on their own configuration, so the final CSV is identical whatever the
// worker count or interruption pattern.

#include "bomb.hpp"
#include "driver.hpp"
#include "engine.hpp"
#include "exactnum.hpp"
#include "tunnel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wallbreak {

class SweepError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct StartChoice {
  std::optional<std::uint64_t> region; // region index, or
  BigRational x = 0, y = 0;            // an explicit start point
  std::string label() const {
    if (region) return std::to_string(*region);
    return to_string(x) + ":" + to_string(y);
  }
};

struct RegionSelector {
  bool all = false;
  std::vector<StartChoice> starts;

  /// `all`, or a comma list of region indices and `X:Y` points; `center`
  /// is shorthand for 1/2:1/2.
  static RegionSelector parse(std::string_view text) {
    RegionSelector sel;
    if (detail::trim(text) == "all") {
      sel.all = true;
      return sel;
    }
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
      std::string_view t = detail::trim(item);
      if (t.empty()) throw ParseError("empty region entry");
      StartChoice c;
      if (t == "center") {
        c.x = BigRational(1, 2);
        c.y = BigRational(1, 2);
      } else if (auto colon = t.find(':'); colon != std::string_view::npos) {
        c.x = parse_rational(t.substr(0, colon));
        c.y = parse_rational(t.substr(colon + 1));
      } else {
        BigInt r = detail::parse_integer(t);
        if (r < 0) throw ParseError("negative region index");
        c.region = static_cast<std::uint64_t>(r);
      }
      sel.starts.push_back(c);
    }
    if (sel.starts.empty()) throw ParseError("no regions given");
    return sel;
  }
};

struct BombChoice {
  std::string label;
  BombPattern pattern;
};

inline BombChoice bomb_choice(std::string_view spec) { return {std::string(spec), parse_bomb_spec(spec)}; }

struct SweepSpec {
  std::vector<SlopeSpec> slopes;
  RegionSelector regions;
  std::vector<BombChoice> bombs;
  std::uint64_t cap = 1'000'000;
  DetectorConfig detector;
  std::string out;
  std::uint64_t checkpoint_interval = 1; // records between checkpoint writes
  unsigned jobs = 1;
  std::optional<std::uint64_t> max_runs; // stop early after this many runs
};

/// Slope list: comma separated slopes (`quad:a,b,d,c` takes its own commas),
/// `even:A..B`, `odd:A..B`, or `A..B:STEP` over exact rationals.
inline std::vector<SlopeSpec> parse_slope_list(std::string_view text) {
  std::vector<std::string> tokens;
  {
    std::string tok;
    std::istringstream in{std::string(text)};
    while (std::getline(in, tok, ',')) tokens.emplace_back(detail::trim(tok));
  }
  std::vector<SlopeSpec> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string_view t = tokens[i];
    if (t.empty()) throw ParseError("empty slope entry");
    if (t.substr(0, 5) == "quad:") {
      if (i + 3 >= tokens.size()) throw ParseError("quad: needs four comma separated integers");
      out.push_back(SlopeSpec::parse(tokens[i] + "," + tokens[i + 1] + "," + tokens[i + 2] + "," +
                                     tokens[i + 3]));
      i += 3;
      continue;
    }
    auto dots = t.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(SlopeSpec::parse(t));
      continue;
    }
    bool even = t.substr(0, 5) == "even:", odd = t.substr(0, 4) == "odd:";
    if (even || odd) {
      std::string_view body = t.substr(even ? 5 : 4);
      dots = body.find("..");
      if (dots == std::string_view::npos) throw ParseError("expected A..B in '" + std::string(t) + "'");
      BigInt a = detail::parse_integer(body.substr(0, dots));
      BigInt b = detail::parse_integer(body.substr(dots + 2));
      for (BigInt v = a; v <= b; ++v)
        if (v > 0 && (v % 2 == 0) == even) out.emplace_back(QuadraticValue(BigRational(v)));
      continue;
    }
    auto colon = t.find(':', dots);
    if (colon == std::string_view::npos) throw ParseError("range '" + std::string(t) + "' needs :STEP");
    BigRational a = parse_rational(t.substr(0, dots));
    BigRational b = parse_rational(t.substr(dots + 2, colon - dots - 2));
    BigRational step = parse_rational(t.substr(colon + 1));
    if (step <= 0) throw ParseError("range step must be positive");
    if ((b - a) / step > 100000) throw ParseError("range has too many slopes");
    for (BigRational v = a; v <= b; v += step) out.emplace_back(QuadraticValue(v));
  }
  if (out.empty()) throw ParseError("no slopes given");
  return out;
}

// ---------------------------------------------------------------------------

struct SweepRecord {
  std::size_t slope_index = 0, start_index = 0, bomb_index = 0; // position in sorted order
  std::string slope, region, bomb;
  std::string outcome; // tunnel | corner | cap | blob
  std::optional<std::uint64_t> period;
  std::optional<Displacement> disp1, disp2;
  std::optional<std::uint64_t> onset;
  std::optional<BandSlope> tunnel_slope;
  std::uint64_t total_collisions = 0;
  std::uint64_t walls_erased = 0;
  std::optional<IntBox> bbox;
};

inline constexpr const char *kSweepCsvHeader =
    "slope,region,bomb,outcome,period,disp1_dx,disp1_dy,disp2_dx,disp2_dy,onset_collisions,"
    "tunnel_slope_num,tunnel_slope_den,total_collisions,walls_erased,bbox_xmin,bbox_ymin,"
    "bbox_xmax,bbox_ymax";

namespace detail {

inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

template <typename T> std::string opt_str(const std::optional<T> &v) {
  return v ? std::to_string(*v) : std::string();
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Mixed radicands have no exact order; fall back to a float comparison,
// then the text form, which is still deterministic.
inline bool slope_less(const SlopeSpec &a, const SlopeSpec &b) {
  try {
    return compare_exact(a.value, b.value) == std::strong_ordering::less;
  } catch (const UnsupportedComparison &) {
    auto approx = [](const QuadraticValue &v) {
      return (v.a().convert_to<long double>() +
              v.b().convert_to<long double>() * std::sqrt(v.d().convert_to<long double>())) /
             v.c().convert_to<long double>();
    };
    long double x = approx(a.value), y = approx(b.value);
    if (x != y) return x < y;
    return a.str() < b.str();
  }
}

} // namespace detail

inline std::string to_csv_line(const SweepRecord &r) {
  using detail::csv_field;
  using detail::opt_str;
  std::ostringstream o;
  auto d = [](const std::optional<Displacement> &v, bool x) {
    return v ? std::to_string(x ? v->dx : v->dy) : std::string();
  };
  o << csv_field(r.slope) << ',' << csv_field(r.region) << ',' << csv_field(r.bomb) << ','
    << r.outcome << ',' << opt_str(r.period) << ',' << d(r.disp1, true) << ',' << d(r.disp1, false)
    << ',' << d(r.disp2, true) << ',' << d(r.disp2, false) << ',' << opt_str(r.onset) << ',';
  if (r.tunnel_slope) {
    if (r.tunnel_slope->vertical)
      o << "1,0";
    else
      o << numerator(r.tunnel_slope->value).str() << ',' << denominator(r.tunnel_slope->value).str();
  } else {
    o << ',';
  }
  o << ',' << r.total_collisions << ',' << r.walls_erased << ',';
  if (r.bbox)
    o << r.bbox->xmin << ',' << r.bbox->ymin << ',' << r.bbox->xmax << ',' << r.bbox->ymax;
  else
    o << ",,,";
  return o.str();
}

/// One work unit: where it sits in the output order and what to run.
struct SweepItem {
  std::size_t slope_index, start_index, bomb_index;
  std::string key() const {
    return std::to_string(slope_index) + "/" + std::to_string(start_index) + "/" +
           std::to_string(bomb_index);
  }
};

class Sweep {
public:
  explicit Sweep(SweepSpec spec) : spec_(std::move(spec)) {
    if (spec_.cap == 0) throw std::invalid_argument("collision cap must be positive");
    if (spec_.bombs.empty()) throw std::invalid_argument("no bombs given");
    if (spec_.slopes.empty()) throw std::invalid_argument("no slopes given");
    std::stable_sort(spec_.slopes.begin(), spec_.slopes.end(), detail::slope_less);
    spec_.slopes.erase(std::unique(spec_.slopes.begin(), spec_.slopes.end(),
                                   [](const SlopeSpec &a, const SlopeSpec &b) { return a.value == b.value; }),
                       spec_.slopes.end());
    for (std::size_t si = 0; si < spec_.slopes.size(); ++si) {
      std::vector<StartChoice> starts;
      if (spec_.regions.all) {
        if (!spec_.slopes[si].is_rational())
          throw std::invalid_argument("region 'all' needs rational slopes; give explicit points for " +
                                      spec_.slopes[si].str());
        std::uint64_t n = region_count(spec_.slopes[si].rational());
        for (std::uint64_t r = 0; r < n; ++r) starts.push_back({r});
      } else {
        starts = spec_.regions.starts;
        for (const auto &c : starts)
          if (c.region && !spec_.slopes[si].is_rational())
            throw std::invalid_argument("region indices need rational slopes");
      }
      bool indexed = std::any_of(starts.begin(), starts.end(), [](const StartChoice &c) { return c.region; });
      representatives_.push_back(indexed ? representative_points(spec_.slopes[si].rational())
                                         : std::vector<LaunchSpec>{});
      starts_.push_back(starts);
      for (std::size_t ri = 0; ri < starts.size(); ++ri)
        for (std::size_t bi = 0; bi < spec_.bombs.size(); ++bi) items_.push_back({si, ri, bi});
    }
  }

  const SweepSpec &spec() const { return spec_; }
  const std::vector<SweepItem> &items() const { return items_; }

  /// Digest of everything that affects the records.
  std::string spec_digest() const {
    std::ostringstream o;
    for (const auto &s : spec_.slopes) o << s.str() << ';';
    o << '|' << (spec_.regions.all ? "all" : "");
    for (const auto &c : spec_.regions.starts) o << c.label() << ';';
    o << '|';
    for (const auto &b : spec_.bombs) o << b.label << '=' << serialize_bomb(b.pattern) << ';';
    const auto &d = spec_.detector;
    o << '|' << spec_.cap << '|' << d.max_period << ',' << d.confirmations << ',' << d.history << ','
      << d.min_collisions << ',' << d.min_window << ',' << d.check_interval << ',' << d.min_span_encounters;
    return detail::hex64(detail::fnv1a(o.str()));
  }

  LaunchSpec launch_for(const SweepItem &item) const {
    const SlopeSpec &slope = spec_.slopes[item.slope_index];
    const StartChoice &c = starts_[item.slope_index][item.start_index];
    if (c.region) {
      const auto &reps = representatives_[item.slope_index];
      if (*c.region >= reps.size())
        throw std::out_of_range("region " + std::to_string(*c.region) + " out of range for slope " +
                                slope.str() + " (" + std::to_string(reps.size()) + " regions)");
      return reps[*c.region];
    }
    LaunchSpec l{c.x, c.y, 1, 1, slope};
    l.validate();
    return l;
  }

  /// Runs one work unit. Blob: cap reached without a tunnel while the erased
  /// region kept growing on all four sides over the second half of the run.
  SweepRecord run_item(const SweepItem &item) const {
    SweepRecord rec;
    rec.slope_index = item.slope_index;
    rec.start_index = item.start_index;
    rec.bomb_index = item.bomb_index;
    rec.slope = spec_.slopes[item.slope_index].str();
    rec.region = starts_[item.slope_index][item.start_index].label();
    rec.bomb = spec_.bombs[item.bomb_index].label;

    RunConfig cfg;
    cfg.source = launch_for(item);
    cfg.bomb = spec_.bombs[item.bomb_index].pattern;
    cfg.max_collisions = spec_.cap;
    cfg.detector = spec_.detector;
    Simulation sim(std::move(cfg));
    const RunOutcome &half = sim.advance(std::max<std::uint64_t>(1, spec_.cap / 2));
    std::optional<IntBox> mid = half.bounding_box;
    const RunOutcome &out = sim.done() ? sim.outcome() : sim.conclude();

    rec.total_collisions = out.collisions;
    rec.walls_erased = out.walls_erased;
    rec.bbox = out.bounding_box;
    switch (out.kind) {
    case OutcomeKind::Tunnel: {
      const TunnelReport &t = *out.tunnel;
      rec.outcome = "tunnel";
      rec.period = t.period;
      rec.disp1 = t.classes[0];
      if (t.classes.size() > 1) rec.disp2 = t.classes[1];
      rec.onset = t.onset;
      rec.tunnel_slope = t.band_slope;
      break;
    }
    case OutcomeKind::Corner:
      rec.outcome = "corner";
      break;
    default: {
      bool grew = mid && out.bounding_box && out.bounding_box->xmin < mid->xmin &&
                  out.bounding_box->ymin < mid->ymin && out.bounding_box->xmax > mid->xmax &&
                  out.bounding_box->ymax > mid->ymax;
      rec.outcome = grew ? "blob" : "cap";
    }
    }
    return rec;
  }

  std::filesystem::path checkpoint_path() const { return spec_.out + ".ckpt"; }

  struct Progress {
    std::size_t total = 0, completed = 0, ran_now = 0;
    bool finished = false;
  };

  /// Runs all pending work. With `resume`, completed units are read back from
  /// the checkpoint; otherwise any old checkpoint is discarded.
  Progress run(bool resume = false) {
    std::map<std::string, std::string> done; // item key -> csv line
    if (resume) done = load_checkpoint();
    std::vector<SweepItem> pending;
    for (const auto &it : items_)
      if (!done.count(it.key())) pending.push_back(it);
    if (spec_.max_runs && pending.size() > *spec_.max_runs) pending.resize(*spec_.max_runs);

    std::mutex mu;
    std::size_t since_write = 0;
    write_checkpoint(done);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        try {
          SweepRecord rec = run_item(pending[i]);
          std::lock_guard lock(mu);
          done[pending[i].key()] = to_csv_line(rec);
          if (++since_write >= spec_.checkpoint_interval) {
            write_checkpoint(done);
            since_write = 0;
          }
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next.store(pending.size());
          return;
        }
      }
    };
    unsigned jobs = std::max(1u, spec_.jobs);
    std::vector<std::thread> threads;
    for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
    for (auto &t : threads) t.join();
    write_checkpoint(done);
    if (failure) std::rethrow_exception(failure);

    Progress p;
    p.total = items_.size();
    p.completed = done.size();
    p.ran_now = pending.size();
    p.finished = done.size() == items_.size();
    if (p.finished) write_csv(done);
    return p;
  }

private:
  // Keys in output order.
  std::vector<std::string> ordered_keys() const {
    std::vector<std::string> keys;
    for (const auto &it : items_) keys.push_back(it.key());
    return keys;
  }

  static void atomic_write(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw SweepError("cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) throw SweepError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw SweepError("cannot replace " + path.string() + ": " + ec.message());
  }

  void write_checkpoint(const std::map<std::string, std::string> &done) const {
    std::ostringstream body;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto &key : ordered_keys()) {
      auto it = done.find(key);
      if (it == done.end()) continue;
      std::string line = key + "|" + it->second + "\n";
      h = detail::fnv1a(line, h);
      body << line;
    }
    std::ostringstream o;
    o << "#wallbreak-checkpoint spec=" << spec_digest() << '\n'
      << body.str() << "#end count=" << done.size() << " digest=" << detail::hex64(h) << '\n';
    atomic_write(checkpoint_path(), o.str());
  }

  std::map<std::string, std::string> load_checkpoint() const {
    std::map<std::string, std::string> done;
    std::ifstream in(checkpoint_path());
    if (!in) return done; // nothing to resume
    std::string line;
    if (!std::getline(in, line) || line.rfind("#wallbreak-checkpoint spec=", 0) != 0)
      throw SweepError("corrupt checkpoint: bad header");
    if (line.substr(27) != spec_digest())
      throw SweepError("checkpoint was written for a different sweep specification");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    bool ended = false;
    while (std::getline(in, line)) {
      if (line.rfind("#end ", 0) == 0) {
        std::ostringstream want;
        want << "#end count=" << done.size() << " digest=" << detail::hex64(h);
        if (line != want.str()) throw SweepError("corrupt checkpoint: count or digest mismatch");
        ended = true;
        break;
      }
      auto bar = line.find('|');
      if (bar == std::string::npos) throw SweepError("corrupt checkpoint: bad record line");
      h = detail::fnv1a(line + "\n", h);
      done[line.substr(0, bar)] = line.substr(bar + 1);
    }
    if (!ended) throw SweepError("corrupt checkpoint: missing end marker");
    std::set<std::string> known;
    for (const auto &k : ordered_keys()) known.insert(k);
    for (const auto &[k, v] : done)
      if (!known.count(k)) throw SweepError("corrupt checkpoint: unknown record " + k);
    return done;
  }

  void write_csv(const std::map<std::string, std::string> &done) const {
    std::ostringstream o;
    o << kSweepCsvHeader << '\n';
    for (const auto &key : ordered_keys()) o << done.at(key) << '\n';
    atomic_write(spec_.out, o.str());
  }

  SweepSpec spec_;
  std::vector<std::vector<StartChoice>> starts_;
  std::vector<std::vector<LaunchSpec>> representatives_;
  std::vector<SweepItem> items_;
};

/// Default worker count: $WALLBREAK_JOBS, else the hardware thread count.
inline unsigned default_jobs() {
  if (const char *env = std::getenv("WALLBREAK_JOBS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace wallbreak
