#pragma once

#include "vrrt/sim.hpp"

namespace vrrt {

struct SvgOptions {
  double scale = 120.0;     // px per meter
  double margin = 0.4;      // m of padding around the bounds
  int max_footprints = 150; // sensed-region sectors drawn along the path
};

/// Deterministic SVG of a planning/run result: known obstacles black,
/// hidden orange, tree edges green, reference path red, sensed footprints
/// translucent gray, detections red dots, start/goal blue/yellow squares.
/// `trace` (the executed trajectory) is drawn as a thin blue line and used
/// as the footprint source when given; otherwise footprints follow the
/// reference path.
std::string render_svg(const PlanResult& plan, const WorldModel& world,
                       const SensorSpec& sensor, const RunMetrics* metrics = nullptr,
                       const std::vector<State>* trace = nullptr,
                       const SvgOptions& opt = {});

void write_text_file(const std::string& path, const std::string& text);

}  // namespace vrrt
