#include "vrrt/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vrrt {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct Mapper {
  double x0, y1, scale;  // y1 = world top, SVG y grows downward
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return (y1 - y) * scale; }
  std::string pt(const Eigen::Vector2d& p) const {
    return fmt(px(p.x())) + "," + fmt(py(p.y()));
  }
};

void emit_polyline(std::ostringstream& os, const Mapper& m,
                   const std::vector<Eigen::Vector2d>& pts, const char* cls,
                   const char* stroke, double width, const char* extra = "") {
  os << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
     << "\" stroke-width=\"" << fmt(width) << "\"" << extra << " points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    os << m.pt(pts[i]);
  }
  os << "\"/>\n";
}

void emit_sector(std::ostringstream& os, const Mapper& m, const Footprint& fp) {
  const double half = fp.spec.fov / 2.0;
  const Eigen::Vector2d a =
      fp.position + fp.spec.range * Eigen::Vector2d{std::cos(fp.heading - half),
                                                    std::sin(fp.heading - half)};
  const Eigen::Vector2d b =
      fp.position + fp.spec.range * Eigen::Vector2d{std::cos(fp.heading + half),
                                                    std::sin(fp.heading + half)};
  const double r = fp.spec.range * m.scale;
  const int large_arc = fp.spec.fov > M_PI ? 1 : 0;
  // world CCW becomes sweep=0 in the flipped SVG frame
  os << "<path class=\"footprint\" fill=\"gray\" fill-opacity=\"0.08\" stroke=\"none\" d=\"M "
     << m.pt(fp.position) << " L " << m.pt(a) << " A " << fmt(r) << " " << fmt(r) << " 0 "
     << large_arc << " 0 " << m.pt(b) << " Z\"/>\n";
}

void emit_square(std::ostringstream& os, const Mapper& m, const Eigen::Vector2d& c,
                 double side_m, const char* cls, const char* fill) {
  const double s = side_m * m.scale;
  os << "<rect class=\"" << cls << "\" x=\"" << fmt(m.px(c.x()) - s / 2.0) << "\" y=\""
     << fmt(m.py(c.y()) - s / 2.0) << "\" width=\"" << fmt(s) << "\" height=\"" << fmt(s)
     << "\" fill=\"" << fill << "\"/>\n";
}

}  // namespace

std::string render_svg(const PlanResult& plan, const WorldModel& world,
                       const SensorSpec& sensor, const RunMetrics* metrics,
                       const std::vector<State>* trace, const SvgOptions& opt) {
  const Bounds& b = world.bounds;
  const Mapper m{b.x_min - opt.margin, b.y_max + opt.margin, opt.scale};
  const double w = (b.width() + 2.0 * opt.margin) * opt.scale;
  const double h = (b.height() + 2.0 * opt.margin) * opt.scale;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
     << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
  os << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\""
     << fmt(h) << "\" fill=\"white\"/>\n";
  os << "<rect class=\"bounds\" x=\"" << fmt(m.px(b.x_min)) << "\" y=\"" << fmt(m.py(b.y_max))
     << "\" width=\"" << fmt(b.width() * opt.scale) << "\" height=\""
     << fmt(b.height() * opt.scale) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // sensed region: footprints along the executed trace, or predicted along
  // the reference path
  std::vector<Footprint> fps;
  if (trace) {
    for (const auto& s : *trace) fps.push_back({s.position(), s.theta, sensor});
  } else {
    for (const auto& s : plan.path) fps.push_back({s.state.position(), s.state.theta, sensor});
  }
  if (!fps.empty()) {
    const size_t stride = std::max<size_t>(1, (fps.size() + opt.max_footprints - 1) /
                                                  opt.max_footprints);
    for (size_t i = 0; i < fps.size(); i += stride) emit_sector(os, m, fps[i]);
  }

  for (const auto& o : world.known_obstacles)
    os << "<circle class=\"obstacle\" cx=\"" << fmt(m.px(o.center.x())) << "\" cy=\""
       << fmt(m.py(o.center.y())) << "\" r=\"" << fmt(o.radius * opt.scale)
       << "\" fill=\"black\"/>\n";
  for (const auto& o : world.hidden_obstacles)
    os << "<circle class=\"hidden\" cx=\"" << fmt(m.px(o.center.x())) << "\" cy=\""
       << fmt(m.py(o.center.y())) << "\" r=\"" << fmt(o.radius * opt.scale)
       << "\" fill=\"orange\"/>\n";

  for (const auto& node : plan.tree.nodes) {
    if (node.parent < 0 || node.segment.samples.empty()) continue;
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(node.segment.samples.size());
    for (const auto& s : node.segment.samples) pts.push_back(s.state.position());
    emit_polyline(os, m, pts, "tree-edge", "green", 0.8, " stroke-opacity=\"0.5\"");
  }

  if (!plan.path.empty()) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(plan.path.size());
    for (const auto& s : plan.path) pts.push_back(s.state.position());
    emit_polyline(os, m, pts, "path", "red", 2.0);
  }

  if (trace && trace->size() > 1) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(trace->size());
    for (const auto& s : *trace) pts.push_back(s.position());
    emit_polyline(os, m, pts, "trace", "blue", 1.2);
  }

  if (metrics) {
    for (const auto& d : metrics->detections)
      os << "<circle class=\"detection\" cx=\"" << fmt(m.px(d.point.x())) << "\" cy=\""
         << fmt(m.py(d.point.y())) << "\" r=\"3\" fill=\"red\"/>\n";
  }

  emit_square(os, m, world.start.position(), 0.16, "start", "blue");
  emit_square(os, m, world.goal, 0.16, "goal", "yellow");
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << text;
}

}  // namespace vrrt
