#include "wallbreak/render.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>

using namespace wallbreak;

namespace {

std::string path_data(const std::string &svg, const std::string &cls) {
  std::smatch m;
  std::regex re("class=\"" + cls + "\" d=\"([^\"]*)\"");
  if (!std::regex_search(svg, m, re)) return "<missing>";
  return m[1];
}

// Expands the run-length path data back into single walls.
std::set<WallId> drawn_walls(const std::string &svg) {
  std::set<WallId> out;
  std::regex seg(R"(M(-?\d+) (-?\d+)([hv])(\d+))");
  for (const char *cls : {"walls-h", "walls-v"}) {
    std::string d = path_data(svg, cls);
    for (std::sregex_iterator it(d.begin(), d.end(), seg), end; it != end; ++it) {
      std::int64_t x = std::stoll((*it)[1]), y = -std::stoll((*it)[2]), n = std::stoll((*it)[4]);
      for (std::int64_t k = 0; k < n; ++k)
        out.insert((*it)[3] == "h" ? H(x + k, y) : V(x, y - n + k));
    }
  }
  return out;
}

std::set<WallId> solid_in(const WallState &w, const Viewport &v) {
  std::set<WallId> out;
  for (std::int64_t i = v.x0; i <= v.x1; ++i)
    for (std::int64_t j = v.y0; j <= v.y1; ++j) {
      if (i < v.x1 && w.is_solid(H(i, j))) out.insert(H(i, j));
      if (j < v.y1 && w.is_solid(V(i, j))) out.insert(V(i, j));
    }
  return out;
}

} // namespace

TEST(Render, FreshViewportCounts) {
  Scene s;
  s.viewport = Viewport{0, 0, 3, 3};
  EXPECT_EQ(drawn_walls(render_svg(s)).size(), 24u);
  s.viewport = Viewport{5, -2, 6, -1};
  auto unit = drawn_walls(render_svg(s));
  EXPECT_EQ(unit, (std::set<WallId>{H(5, -2), H(5, -1), V(5, -2), V(6, -2)}));
}

TEST(Render, DrawsExactlyTheSolidWalls) {
  std::mt19937_64 rng(2);
  Scene s;
  for (int i = 0; i < 300; ++i) {
    int x = static_cast<int>(rng() % 20) - 10, y = static_cast<int>(rng() % 20) - 10;
    s.walls.erase(rng() % 2 ? H(x, y) : V(x, y));
  }
  s.viewport = Viewport{-8, -9, 7, 6};
  EXPECT_EQ(drawn_walls(render_svg(s)), solid_in(s.walls, *s.viewport));
  s.viewport.reset();
  Viewport auto_v = resolve_viewport(s);
  EXPECT_EQ(drawn_walls(render_svg(s)), solid_in(s.walls, auto_v));
}

TEST(Render, Deterministic) {
  Scene s;
  s.walls.erase_all(overlay(wedge(3, true), H(0, 1), ApproachSide::Below));
  s.start = PlanePoint{0.5, 0.5};
  s.tail = {{0.5, 0.5}, {0.5, 1}};
  EXPECT_EQ(render_svg(s), render_svg(s));
  std::string svg = render_svg(s);
  EXPECT_NE(svg.find("class=\"start\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"tail\""), std::string::npos);
  EXPECT_EQ(svg.find("class=\"path\""), std::string::npos);
}

TEST(Render, OversizedViewportRejected) {
  Scene s;
  s.viewport = Viewport{0, 0, kMaxViewportSide + 1, 3};
  EXPECT_THROW(render_svg(s), std::invalid_argument);
  s.viewport = Viewport{0, 0, 0, 3};
  EXPECT_THROW(render_svg(s), std::invalid_argument);
}

TEST(Render, SceneFromEventLog) {
  RunConfig cfg;
  cfg.source = LaunchSpec{BigRational(1, 9), BigRational(2, 3), 1, 1, SlopeSpec(QuadraticValue(3))};
  cfg.bomb = wedge(1, true);
  cfg.max_collisions = 200;
  std::ostringstream jsonl;
  cfg.sink = [&](const Event &e) { write_event_jsonl(jsonl, e); };
  auto result = run(cfg);
  std::istringstream in(jsonl.str());
  auto events = read_events(in);
  ASSERT_EQ(events.size(), result.outcome.encounters);
  auto scene = scene_from_events(events, wedge(1, true), {}, true);
  EXPECT_EQ(scene.walls.erased_walls(), result.walls.erased_walls());
  EXPECT_EQ(scene.path.size(), events.size() + 1);
  EXPECT_EQ(scene.tail.size(), 3u);
}

TEST(Render, EventParseErrors) {
  std::istringstream bad("{\"i\":1,\"kind\":\"collision\"}\n");
  EXPECT_THROW(read_events(bad), ParseError);
  std::istringstream junk("\n\nnot json\n");
  try {
    read_events(junk);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}
