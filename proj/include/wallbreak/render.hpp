#pragma once

// SVG snapshots of the plane. Solid walls are drawn and erased walls left out,
// so cleared space reads as white. One user unit is one cell; y is flipped so
// the picture has y pointing up.

#include "bomb.hpp"
#include "engine.hpp"
#include "grid.hpp"

#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace wallbreak {

/// Cells [x0,x1) x [y0,y1).
struct Viewport {
  std::int64_t x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  std::int64_t width() const { return x1 - x0; }
  std::int64_t height() const { return y1 - y0; }
};

inline constexpr std::int64_t kMaxViewportSide = 10000;

struct Scene {
  WallState walls;
  std::optional<Viewport> viewport; // default: erased bounding box plus margin
  std::int64_t margin = 2;
  std::vector<PlanePoint> path;     // drawn when non-empty
  std::optional<PlanePoint> start;  // blue dot
  std::vector<PlanePoint> tail;     // red direction tail, oldest point first
};

inline Viewport resolve_viewport(const Scene &scene) {
  Viewport v;
  if (scene.viewport) {
    v = *scene.viewport;
  } else if (auto box = scene.walls.erased_bounding_box()) {
    v = {box->xmin - scene.margin, box->ymin - scene.margin, box->xmax + 1 + scene.margin,
         box->ymax + 1 + scene.margin};
  } else {
    v = {-scene.margin, -scene.margin, 1 + scene.margin, 1 + scene.margin};
  }
  if (v.width() <= 0 || v.height() <= 0) throw std::invalid_argument("empty viewport");
  if (v.width() > kMaxViewportSide || v.height() > kMaxViewportSide)
    throw std::invalid_argument("viewport larger than " + std::to_string(kMaxViewportSide) +
                                " cells on a side");
  return v;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string polyline(const std::vector<PlanePoint> &pts) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i)
    d += (i ? " " : "") + num(pts[i].x) + "," + num(-pts[i].y);
  return d;
}

} // namespace detail

/// Solid walls inside the viewport, as maximal straight runs. Each run is
/// written `M x y h n` (horizontal) or `M x y v n` (vertical) with n cells.
inline std::string render_svg(const Scene &scene) {
  const Viewport v = resolve_viewport(scene);
  std::ostringstream h, vert;
  // Horizontal walls H(i,j): i in [x0,x1), j in [y0,y1].
  for (std::int64_t j = v.y0; j <= v.y1; ++j) {
    std::int64_t run_start = 0, run = 0;
    for (std::int64_t i = v.x0; i <= v.x1; ++i) {
      bool solid = i < v.x1 && scene.walls.is_solid(H(i, j));
      if (solid) {
        if (run++ == 0) run_start = i;
      } else if (run) {
        h << 'M' << run_start << ' ' << -j << 'h' << run;
        run = 0;
      }
    }
  }
  // Vertical walls V(i,j): i in [x0,x1], j in [y0,y1). Drawn downward in SVG.
  for (std::int64_t i = v.x0; i <= v.x1; ++i) {
    std::int64_t run_start = 0, run = 0;
    for (std::int64_t j = v.y0; j <= v.y1; ++j) {
      bool solid = j < v.y1 && scene.walls.is_solid(V(i, j));
      if (solid) {
        if (run++ == 0) run_start = j;
      } else if (run) {
        vert << 'M' << i << ' ' << -(run_start + run) << 'v' << run;
        run = 0;
      }
    }
  }
  const double pad = 0.5;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << detail::num(v.x0 - pad) << ' '
      << detail::num(-v.y1 - pad) << ' ' << detail::num(v.width() + 2 * pad) << ' '
      << detail::num(v.height() + 2 * pad) << "\" width=\""
      << std::min<std::int64_t>(2000, 20 * (v.width() + 1)) << "\">\n"
      << "<rect x=\"" << detail::num(v.x0 - pad) << "\" y=\"" << detail::num(-v.y1 - pad)
      << "\" width=\"" << detail::num(v.width() + 2 * pad) << "\" height=\""
      << detail::num(v.height() + 2 * pad) << "\" fill=\"white\"/>\n"
      << "<g stroke=\"black\" stroke-width=\"0.08\" stroke-linecap=\"square\" fill=\"none\">\n"
      << "<path class=\"walls-h\" d=\"" << h.str() << "\"/>\n"
      << "<path class=\"walls-v\" d=\"" << vert.str() << "\"/>\n"
      << "</g>\n";
  if (!scene.path.empty())
    svg << "<polyline class=\"path\" points=\"" << detail::polyline(scene.path)
        << "\" stroke=\"#888888\" stroke-width=\"0.03\" fill=\"none\"/>\n";
  if (scene.tail.size() >= 2)
    svg << "<polyline class=\"tail\" points=\"" << detail::polyline(scene.tail)
        << "\" stroke=\"red\" stroke-width=\"0.1\" fill=\"none\"/>\n";
  if (scene.start)
    svg << "<circle class=\"start\" cx=\"" << detail::num(scene.start->x) << "\" cy=\""
        << detail::num(-scene.start->y) << "\" r=\"0.2\" fill=\"blue\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

/// Parses one JSONL event line as written by write_event_jsonl.
inline Event parse_event_json(const std::string &line, std::size_t line_no) {
  try {
    auto j = nlohmann::json::parse(line);
    Event e;
    e.encounter = j.at("i").get<std::uint64_t>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "collision" && kind != "pass") throw std::invalid_argument("bad kind");
    e.kind = kind == "collision" ? EventKind::Collision : EventKind::Pass;
    const auto &w = j.at("wall");
    std::string o = w.at("o").get<std::string>();
    if (o != "H" && o != "V") throw std::invalid_argument("bad orientation");
    e.wall = {o == "H" ? Orientation::H : Orientation::V, w.at("x").get<std::int64_t>(),
              w.at("y").get<std::int64_t>()};
    e.cell_x = j.at("cell").at(0).get<std::int64_t>();
    e.cell_y = j.at("cell").at(1).get<std::int64_t>();
    e.sx = static_cast<std::int8_t>(j.at("dir").at(0).get<int>());
    e.sy = static_cast<std::int8_t>(j.at("dir").at(1).get<int>());
    e.stage = j.at("stage").get<std::int64_t>();
    return e;
  } catch (const std::exception &ex) {
    throw ParseError("events line " + std::to_string(line_no) + ": " + ex.what());
  }
}

inline std::vector<Event> read_events(std::istream &in) {
  std::vector<Event> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_event_json(line, n));
  }
  return out;
}

/// Rebuilds the wall state from an event log; the log records only the hit
/// walls, so the bomb has to be supplied.
inline Scene scene_from_events(const std::vector<Event> &events, const BombPattern &bomb,
                               const std::vector<WallId> &initially_erased = {}, bool with_path = false) {
  Scene scene;
  scene.walls = WallState(initially_erased);
  std::vector<PlanePoint> points;
  if (!events.empty())
    points.push_back({static_cast<double>(events.front().cell_x) + 0.5,
                      static_cast<double>(events.front().cell_y) + 0.5});
  for (const Event &e : events) {
    if (e.kind == EventKind::Collision) {
      ApproachSide side = e.wall.orientation == Orientation::H
                              ? (e.sy < 0 ? ApproachSide::Below : ApproachSide::Above)
                              : (e.sx < 0 ? ApproachSide::Left : ApproachSide::Right);
      scene.walls.erase_all(overlay(bomb, e.wall, side));
    }
    points.push_back(midpoint(e.wall));
  }
  if (!points.empty()) scene.start = points.front();
  if (points.size() >= 2)
    scene.tail.assign(points.end() - std::min<std::size_t>(points.size(), 3), points.end());
  if (with_path) scene.path = std::move(points);
  return scene;
}

} // namespace wallbreak
