// wallbreak: command line front end.
//
// Exit status: 0 success (a corner stop is a result, not a failure),
// 1 domain error, 2 usage error.

#include "wallbreak/analysis.hpp"
#include "wallbreak/bomb.hpp"
#include "wallbreak/driver.hpp"
#include "wallbreak/engine.hpp"
#include "wallbreak/render.hpp"
#include "wallbreak/sweep.hpp"
#include "wallbreak/tables.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace wallbreak;

constexpr const char *kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<BigRational, BigRational> parse_point(const std::string &text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("expected X,Y but got '" + text + "'");
  return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
}

std::pair<int, int> parse_dir(const std::string &d) {
  if (d == "UR") return {1, 1};
  if (d == "UL") return {-1, 1};
  if (d == "DR") return {1, -1};
  if (d == "DL") return {-1, -1};
  throw UsageError("direction must be one of UR, UL, DR, DL");
}

std::vector<WallId> read_erased(const std::string &path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_wall_list(in);
}

std::string box_str(const std::optional<IntBox> &b) {
  if (!b) return "none";
  return std::to_string(b->xmin) + "," + std::to_string(b->ymin) + "," + std::to_string(b->xmax) +
         "," + std::to_string(b->ymax);
}

struct RunArgs {
  std::string slope, start, dir = "UR", bomb = "single", events, erased, word;
  std::optional<std::uint64_t> region;
  std::uint64_t max_collisions = 1'000'000, max_encounters = 0;
  bool geometric = false, no_detect = false;
};

int cmd_run(const RunArgs &a) {
  RunConfig cfg;
  cfg.bomb = parse_bomb_spec(a.bomb);
  cfg.initially_erased = read_erased(a.erased);
  cfg.max_collisions = a.max_collisions;
  cfg.max_encounters = a.max_encounters;
  if (!a.no_detect) cfg.detector = DetectorConfig{};
  auto [sx, sy] = parse_dir(a.dir);
  if (!a.word.empty()) {
    if (a.geometric) throw UsageError("--word and --geometric are exclusive");
    cfg.source = InjectedWord{EncounterWord::finite(parse_word(a.word)), {0, 0, sx, sy, 0}};
  } else {
    if (a.slope.empty()) throw UsageError("--slope is required unless --word is given");
    SlopeSpec slope = SlopeSpec::parse(a.slope);
    LaunchSpec launch;
    if (a.region) {
      if (!a.start.empty()) throw UsageError("--start and --region are exclusive");
      if (!slope.is_rational()) throw UsageError("--region needs a rational slope");
      launch = representative_point(slope.rational(), *a.region);
    } else if (!a.start.empty()) {
      auto [x, y] = parse_point(a.start);
      launch = {x, y, 1, 1, slope};
    } else {
      throw UsageError("give --start X,Y or --region R");
    }
    launch.sx = sx;
    launch.sy = sy;
    cfg.source = launch;
  }
  std::ofstream events;
  if (!a.events.empty()) {
    events.open(a.events, std::ios::binary | std::ios::trunc);
    if (!events) throw std::runtime_error("cannot write " + a.events);
    cfg.sink = [&events](const Event &e) { write_event_jsonl(events, e); };
  }
  RunResult r = a.geometric ? run_geometric(std::move(cfg)) : run(std::move(cfg));
  const RunOutcome &o = r.outcome;
  std::cout << "outcome=" << to_string(o.kind);
  if (o.kind == OutcomeKind::Tunnel && o.tunnel) {
    const TunnelReport &t = *o.tunnel;
    std::cout << " period=" << t.period << " displacement=" << to_string(t.classes[0]);
    if (t.classes.size() > 1) std::cout << ',' << to_string(t.classes[1]);
    std::cout << " onset=" << t.onset << " tunnel_slope=" << to_string(t.band_slope);
    if (t.period_encounters) std::cout << " period_encounters=" << *t.period_encounters;
  }
  if (o.corner_encounter) std::cout << " corner_encounter=" << *o.corner_encounter;
  std::cout << " collisions=" << o.collisions << " encounters=" << o.encounters
            << " walls_erased=" << o.walls_erased << " bbox=" << box_str(o.bounding_box) << '\n';
  return 0;
}

struct SweepArgs {
  std::string slopes, regions = "all", out;
  std::vector<std::string> bombs;
  std::uint64_t cap = 1'000'000, checkpoint_every = 1;
  std::optional<std::uint64_t> max_runs;
  std::optional<unsigned> jobs;
  bool resume = false;
};

int cmd_sweep(const SweepArgs &a) {
  SweepSpec spec;
  spec.slopes = parse_slope_list(a.slopes);
  spec.regions = RegionSelector::parse(a.regions);
  for (const auto &b : a.bombs.empty() ? std::vector<std::string>{"single"} : a.bombs)
    spec.bombs.push_back(bomb_choice(b));
  spec.cap = a.cap;
  spec.out = a.out;
  spec.checkpoint_interval = std::max<std::uint64_t>(1, a.checkpoint_every);
  spec.jobs = a.jobs ? *a.jobs : default_jobs();
  spec.max_runs = a.max_runs;
  Sweep sweep(std::move(spec));
  auto p = sweep.run(a.resume);
  std::cout << (p.finished ? "complete" : "interrupted") << ": " << p.completed << "/" << p.total
            << " runs done (" << p.ran_now << " this invocation)";
  if (p.finished) std::cout << ", wrote " << a.out;
  std::cout << '\n';
  return 0;
}

struct RenderArgs {
  std::string events, out, viewport, bomb = "single", erased;
  bool path = false;
};

int cmd_render(const RenderArgs &a) {
  std::ifstream in(a.events);
  if (!in) throw std::runtime_error("cannot open " + a.events);
  Scene scene = scene_from_events(read_events(in), parse_bomb_spec(a.bomb), read_erased(a.erased), a.path);
  if (!a.viewport.empty()) {
    std::vector<std::int64_t> v;
    std::istringstream vs(a.viewport);
    std::string tok;
    while (std::getline(vs, tok, ',')) {
      BigInt n = detail::parse_integer(tok);
      v.push_back(narrow_coordinate(n, 0));
    }
    if (v.size() != 4) throw UsageError("--viewport needs x0,y0,x1,y1");
    scene.viewport = Viewport{v[0], v[1], v[2], v[3]};
  }
  std::string svg = render_svg(scene);
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  out << svg;
  return 0;
}

int cmd_verify(const std::string &id) {
  bool ok = true;
  for (const auto &f : table_fixtures()) {
    if (!id.empty() && f.id != id) continue;
    TraceResult r = verify_trace(f);
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << f.id << ": " << r.message << '\n';
  }
  if (!id.empty() && ok) {
    bool found = false;
    for (const auto &f : table_fixtures()) found = found || f.id == id;
    if (!found) throw UnknownScenario("unknown scenario " + id);
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bouncing particle that erases the walls it hits"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "Print version and table-fixture digest");

  RunArgs ra;
  auto *run_cmd = app.add_subcommand("run", "Run one particle");
  run_cmd->add_option("--slope", ra.slope, "Slope magnitude: p/q, decimal, 3+1/17 or quad:a,b,d,c");
  run_cmd->add_option("--start", ra.start, "Start point X,Y in [0,1)^2 (exact)");
  run_cmd->add_option("--region", ra.region, "Start at a region's representative point");
  run_cmd->add_option("--dir", ra.dir, "Initial direction UR, UL, DR or DL")->capture_default_str();
  run_cmd->add_option("--bomb", ra.bomb, "single, wedge:N, wingedwedge:N or file:PATH")->capture_default_str();
  run_cmd->add_option("--max-collisions", ra.max_collisions, "Collision cap (0: none)")->capture_default_str();
  run_cmd->add_option("--max-encounters", ra.max_encounters, "Encounter cap (0: none)")->capture_default_str();
  run_cmd->add_option("--events", ra.events, "Write the event log as JSON lines");
  run_cmd->add_flag("--geometric", ra.geometric, "Compute encounters by exact line stepping");
  run_cmd->add_option("--erased", ra.erased, "Wall list erased before the run");
  run_cmd->add_option("--word", ra.word, "Drive the particle with this H/V word from cell (0,0)");
  run_cmd->add_flag("--no-detect", ra.no_detect, "Disable tunnel detection");

  SweepArgs sa;
  auto *sweep_cmd = app.add_subcommand("sweep", "Run a batch of slopes, regions and bombs");
  sweep_cmd->add_option("--slopes", sa.slopes, "Slope list, e.g. 3,5/3 or even:2..50 or 3..31/10:1/100")
      ->required();
  sweep_cmd->add_option("--regions", sa.regions, "all, or indices and X:Y points")->capture_default_str();
  sweep_cmd->add_option("--bomb", sa.bombs, "Bomb spec (repeatable)");
  sweep_cmd->add_option("--cap", sa.cap, "Collision cap per run")->capture_default_str();
  sweep_cmd->add_option("--out", sa.out, "Output CSV path")->required();
  sweep_cmd->add_flag("--resume", sa.resume, "Continue from <out>.ckpt");
  sweep_cmd->add_option("--jobs", sa.jobs, "Worker threads (default $WALLBREAK_JOBS or all cores)");
  sweep_cmd->add_option("--max-runs", sa.max_runs, "Stop after this many runs (for staged work)");
  sweep_cmd->add_option("--checkpoint-every", sa.checkpoint_every, "Runs between checkpoint writes")
      ->capture_default_str();

  RenderArgs rd;
  auto *render_cmd = app.add_subcommand("render", "Draw an event log as SVG");
  render_cmd->add_option("--events", rd.events, "Event log (JSON lines)")->required();
  render_cmd->add_option("--out", rd.out, "SVG output path")->required();
  render_cmd->add_option("--viewport", rd.viewport, "Cells x0,y0,x1,y1 (default: erased area + margin)");
  render_cmd->add_flag("--path", rd.path, "Draw the particle path through encounter points");
  render_cmd->add_option("--bomb", rd.bomb, "Bomb used by the run")->capture_default_str();
  render_cmd->add_option("--erased", rd.erased, "Wall list erased before the run");

  std::string verify_id;
  auto *verify_cmd = app.add_subcommand("verify-tables", "Replay the reference traces");
  verify_cmd->add_option("--id", verify_id, "Only this scenario");

  std::string predict_slope;
  auto *predict_cmd = app.add_subcommand("predict", "Tunnel slope after reorganization, 3 <= s <= 3+1/17");
  predict_cmd->add_option("--slope", predict_slope, "Exact slope")->required();

  std::int64_t wedge_n = 0;
  bool unwinged = false;
  auto *wedge_cmd = app.add_subcommand("predict-wedge", "Slope-3 tunnel period for a wedge bomb");
  wedge_cmd->add_option("--n", wedge_n, "Wedge size")->required();
  wedge_cmd->add_flag("--unwinged", unwinged, "Unwinged wedge");

  std::string regions_slope;
  auto *regions_cmd = app.add_subcommand("regions", "Regions of the unit square for a rational slope");
  regions_cmd->add_option("--slope", regions_slope, "Exact rational slope")->required();

  std::string word_slope, word_start, word_dir = "UR";
  std::size_t word_count = 0;
  auto *word_cmd = app.add_subcommand("word", "Print the start of an encounter word");
  word_cmd->add_option("--slope", word_slope, "Slope")->required();
  word_cmd->add_option("--start", word_start, "Start X,Y")->required();
  word_cmd->add_option("--count", word_count, "Number of symbols")->required();
  word_cmd->add_option("--dir", word_dir, "Initial direction")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (version) {
      std::cout << "wallbreak " << kVersion << " fixtures=" << detail::hex64(fixture_digest()) << '\n';
      return 0;
    }
    if (*run_cmd) return cmd_run(ra);
    if (*sweep_cmd) return cmd_sweep(sa);
    if (*render_cmd) return cmd_render(rd);
    if (*verify_cmd) return cmd_verify(verify_id);
    if (*predict_cmd) {
      std::cout << to_string(predicted_reorg_slope(parse_rational(predict_slope))) << '\n';
      return 0;
    }
    if (*wedge_cmd) {
      WedgePrediction p = predict_wedge_period(wedge_n, !unwinged);
      if (p.period)
        std::cout << "period=" << *p.period;
      else
        std::cout << "period=none";
      std::cout << (p.conjectural ? " (conjectural)" : "") << " # " << p.reason << '\n';
      return 0;
    }
    if (*regions_cmd) {
      BigRational s = parse_rational(regions_slope);
      auto pts = representative_points(s);
      std::cout << "regions=" << pts.size() << '\n';
      for (std::size_t r = 0; r < pts.size(); ++r)
        std::cout << r << ' ' << to_string(pts[r].x) << ',' << to_string(pts[r].y)
                  << " stage=" << stage_of(pts[r]) << '\n';
      return 0;
    }
    if (*word_cmd) {
      auto [x, y] = parse_point(word_start);
      auto [sx, sy] = parse_dir(word_dir);
      LaunchSpec l{x, y, sx, sy, SlopeSpec::parse(word_slope)};
      CuttingTrace t = trace_cutting_word(l);
      auto w = t.word.prefix(word_count);
      std::cout << to_string(w);
      if (t.corner && *t.corner <= word_count)
        std::cout << " corner at encounter " << *t.corner;
      std::cout << '\n';
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
