#include "cdplan/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace cdplan {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string outline(const Shape& s, const std::string& style) {
  if (const auto* c = std::get_if<Circle>(&s)) {
    return "<circle cx=\"" + fmt(c->center().x) + "\" cy=\"" + fmt(c->center().y) + "\" r=\"" +
           fmt(c->radius()) + "\" " + style + "/>\n";
  }
  std::string pts;
  for (Point2 p : std::get<ConvexPolygon>(s).vertices()) {
    if (!pts.empty()) pts += ' ';
    pts += fmt(p.x) + "," + fmt(p.y);
  }
  return "<polygon points=\"" + pts + "\" " + style + "/>\n";
}

}  // namespace

std::string render_svg(const RunReport& report) {
  const Scenario& sc = report.scenario;
  const Bounds& d = sc.domain;
  const double w = d.xmax - d.xmin;
  const double h = d.ymax - d.ymin;
  const double stroke = 0.003 * std::max(w, h);
  const double pad = 0.02 * std::max(w, h);
  const std::string sw = "stroke-width=\"" + fmt(stroke) + "\"";

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fmt(d.xmin - pad) + " " +
         fmt(-d.ymax - pad) + " " + fmt(w + 2 * pad) + " " + fmt(h + 2 * pad) + "\" width=\"" +
         fmt(800.0) + "\" height=\"" + fmt(800.0 * h / w) + "\">\n";
  out += "<g transform=\"scale(1,-1)\">\n";
  out += "<rect x=\"" + fmt(d.xmin) + "\" y=\"" + fmt(d.ymin) + "\" width=\"" + fmt(w) +
         "\" height=\"" + fmt(h) + "\" fill=\"white\" stroke=\"black\" " + sw + "/>\n";

  out += "<g id=\"obstacles\">\n";
  for (const Obstacle& o : sc.obstacles) {
    out += outline(o.shape, std::string("fill=\"") + (o.movable ? "#e0e0e0" : "#707070") +
                                "\" stroke=\"gray\" " + sw);
  }
  out += "</g>\n";

  out += "<g id=\"footprints\">\n";
  const auto& states = report.trajectory.states;
  const std::size_t every = std::max<std::size_t>(1, states.size() / 80);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k % every != 0 && k + 1 != states.size()) continue;
    for (const Shape& part : footprint_parts(sc.robot.body, states[k])) {
      out += outline(part, "fill=\"none\" stroke=\"#3050c0\" stroke-opacity=\"0.35\" " + sw);
    }
  }
  if (states.size() > 1) {
    std::string pts;
    for (const RobotState& x : states) {
      if (!pts.empty()) pts += ' ';
      pts += fmt(x.x) + "," + fmt(x.y);
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#3050c0\" " + sw + "/>\n";
  }
  out += "</g>\n";

  out += "<g id=\"displaced\">\n";
  for (const ObstacleResolution& r : report.obstacles) {
    out += outline(r.solution.new_shape, "fill=\"none\" stroke=\"cyan\" " + sw);
  }
  out += "</g>\n";

  const double marker = 4.0 * stroke;
  const RobotState& s = sc.robot.start;
  const RobotState& g = sc.robot.goal;
  out += "<circle id=\"start\" cx=\"" + fmt(s.x) + "\" cy=\"" + fmt(s.y) + "\" r=\"" + fmt(marker) +
         "\" fill=\"green\"/>\n";
  out += "<circle id=\"goal\" cx=\"" + fmt(g.x) + "\" cy=\"" + fmt(g.y) + "\" r=\"" + fmt(marker) +
         "\" fill=\"red\"/>\n";
  out += "</g>\n</svg>\n";
  return out;
}

void render_svg(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_svg(report);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace cdplan
