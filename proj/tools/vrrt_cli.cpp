#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "vrrt/svg.hpp"

namespace {

using namespace vrrt;

struct EnvBundle {
  WorldModel world;
  SensorSpec sensor;
  Limits limits;
  PlannerParams planner;
  SimParams sim;
};

Limits limits_from_config(const Config& cfg) {
  Limits lim;
  lim.v_min = cfg.number_or("v_min", lim.v_min);
  lim.v_max = cfg.number_or("v_max", lim.v_max);
  lim.a_min = cfg.number_or("a_min", lim.a_min);
  lim.a_max = cfg.number_or("a_max", lim.a_max);
  lim.omega_min = cfg.number_or("omega_min", lim.omega_min);
  lim.omega_max = cfg.number_or("omega_max", lim.omega_max);
  lim.dt = cfg.number_or("dt", lim.dt);
  return lim;
}

EnvBundle load_env(const std::string& path) {
  const Config cfg = Config::load_file(path);
  EnvBundle env{load_world(cfg), sensor_from_config(cfg), limits_from_config(cfg),
                planner_from_config(cfg), sim_from_config(cfg)};
  return env;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct BenchRun {
  std::string env_file;
  std::string variant;     // ours | no-visibility
  std::string controller;  // cbf-qp | gatekeeper
  std::uint64_t seed = 0;
  int max_iter = 0;
  std::string tag;
};

int run_plan(const std::string& env_file, int max_iter, std::int64_t seed,
             const std::string& out, bool no_visibility, const std::string& svg_out) {
  EnvBundle env = load_env(env_file);
  if (max_iter > 0) env.planner.max_iter = max_iter;
  if (seed >= 0) env.planner.seed = static_cast<std::uint64_t>(seed);
  env.planner.enable_visibility = !no_visibility;

  const PlanResult result = plan(env.world.without_hidden(), env.sensor, env.limits, env.planner);
  write_text_file(out, plan_to_json(result));
  if (!svg_out.empty())
    write_text_file(svg_out, render_svg(result, env.world, env.sensor));
  std::cout << (result.success ? "success" : "failure") << " cost=" << result.cost
            << " iterations=" << result.iterations << " nodes=" << result.tree.nodes.size()
            << "\n";
  return result.success ? 0 : 1;
}

int run_simulate(const std::string& env_file, const std::string& plan_file,
                 const std::string& controller, double backup_decel, double k_v,
                 double k_omega, bool no_visibility, const std::string& out,
                 const std::string& svg_out) {
  EnvBundle env = load_env(env_file);
  env.sim.controller =
      controller == "gatekeeper" ? ControllerKind::kGatekeeper : ControllerKind::kCbfQp;
  if (backup_decel > 0.0) env.sim.backup_decel = backup_decel;
  if (k_v > 0.0) env.sim.gains.k_v = k_v;
  if (k_omega > 0.0) env.sim.gains.k_omega = k_omega;
  env.planner.enable_visibility = !no_visibility;

  const PlanResult ref = plan_from_json(read_file(plan_file));
  const RunResult run = closed_loop(env.world, env.sensor, env.limits, ref, env.planner, env.sim);
  if (!out.empty()) write_metrics(run.metrics, out);
  if (!svg_out.empty())
    write_text_file(svg_out,
                    render_svg(run.plan, env.world, env.sensor, &run.metrics, &run.trace));
  std::cout << metrics_to_json(run.metrics);
  return 0;
}

BenchRun parse_bench_run(const ConfigValue& v) {
  if (!v.is_array() || v.items.size() != 5)
    throw ConfigError("run entries must be [env, variant, controller, seed, max_iter]");
  BenchRun r;
  r.env_file = v.items[0].as_string();
  r.variant = v.items[1].as_string();
  r.controller = v.items[2].as_string();
  r.seed = static_cast<std::uint64_t>(v.items[3].as_number());
  r.max_iter = static_cast<int>(v.items[4].as_number());
  if (r.variant != "ours" && r.variant != "no-visibility")
    throw ConfigError("variant must be ours | no-visibility");
  if (r.controller != "cbf-qp" && r.controller != "gatekeeper")
    throw ConfigError("controller must be cbf-qp | gatekeeper");
  return r;
}

int run_bench(const std::string& suite_file, const std::string& out_dir) {
  const Config suite = Config::load_file(suite_file);
  const auto base = std::filesystem::path(suite_file).parent_path();

  std::vector<BenchRun> runs;
  for (const ConfigValue* v : suite.get_all("run")) {
    BenchRun r = parse_bench_run(*v);
    std::ostringstream tag;
    tag << std::filesystem::path(r.env_file).stem().string() << "_" << r.variant << "_"
        << r.controller << "_s" << r.seed;
    r.tag = tag.str();
    if (!base.empty()) r.env_file = (base / r.env_file).string();
    runs.push_back(r);
  }
  if (runs.empty()) throw ConfigError("suite has no run entries");

  std::filesystem::create_directories(out_dir);

  auto execute = [&](const BenchRun& r) -> RunResult {
    EnvBundle env = load_env(r.env_file);
    env.planner.seed = r.seed;
    env.planner.max_iter = r.max_iter;
    env.planner.enable_visibility = (r.variant == "ours");
    env.sim.controller =
        r.controller == "gatekeeper" ? ControllerKind::kGatekeeper : ControllerKind::kCbfQp;
    RunResult run = run_experiment(env.world, env.sensor, env.limits, env.planner, env.sim);
    const auto stem = std::filesystem::path(out_dir) / r.tag;
    write_metrics(run.metrics, stem.string() + ".json");
    write_text_file(stem.string() + ".svg",
                    render_svg(run.plan, env.world, env.sensor, &run.metrics, &run.trace));
    return run;
  };

  std::vector<std::future<RunResult>> futures;
  futures.reserve(runs.size());
  for (const auto& r : runs)
    futures.push_back(std::async(std::launch::async, execute, std::cref(r)));

  struct Cell {
    int n = 0, success = 0, replans = 0;
    double length = 0.0;
  };
  std::map<std::string, Cell> cells;
  std::ostringstream table;
  table << "run, outcome, path_length, replans, backups, detections\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    const RunResult run = futures[i].get();
    const RunMetrics& m = run.metrics;
    table << runs[i].tag << ", " << outcome_name(m.outcome) << ", " << m.path_length << ", "
          << m.replans << ", " << m.backup_activations << ", " << m.detections.size() << "\n";
    Cell& c = cells[runs[i].variant + " x " + runs[i].controller];
    ++c.n;
    if (m.outcome == Outcome::kReachedGoal) ++c.success;
    c.replans += m.replans;
    c.length += m.path_length;
  }
  table << "\nvariant x controller, success_rate, mean_path_length, mean_replans\n";
  for (const auto& [key, c] : cells) {
    table << key << ", " << (static_cast<double>(c.success) / c.n) << ", " << (c.length / c.n)
          << ", " << (static_cast<double>(c.replans) / c.n) << "\n";
  }
  const std::string text = table.str();
  write_text_file((std::filesystem::path(out_dir) / "summary.txt").string(), text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visibility-aware RRT* planning and safety-critical tracking"};
  app.require_subcommand(1);

  auto* plan_cmd = app.add_subcommand("plan", "Grow a global reference path");
  std::string env_file, out_file = "plan.json", svg_file;
  int max_iter = 0;
  std::int64_t seed = -1;
  bool no_visibility = false;
  plan_cmd->add_option("--env", env_file, "environment config file")->required();
  plan_cmd->add_option("--max-iter", max_iter, "planner iterations (config overrides)");
  plan_cmd->add_option("--seed", seed, "RNG seed (config overrides)");
  plan_cmd->add_option("--out", out_file, "plan JSON output path");
  plan_cmd->add_option("--svg", svg_file, "optional SVG rendering");
  plan_cmd->add_flag("--no-visibility", no_visibility,
                     "ablation: drop the visibility constraint");

  auto* sim_cmd = app.add_subcommand("simulate", "Track a planned path with a safety filter");
  std::string sim_env, plan_file, controller = "cbf-qp", metrics_out, sim_svg;
  double backup_decel = 0.0, k_v = 0.0, k_omega = 0.0;
  bool sim_no_visibility = false;
  sim_cmd->add_option("--env", sim_env, "environment config file")->required();
  sim_cmd->add_option("--plan", plan_file, "plan JSON to track")->required();
  sim_cmd->add_option("--controller", controller, "cbf-qp | gatekeeper")
      ->check(CLI::IsMember({"cbf-qp", "gatekeeper"}));
  sim_cmd->add_option("--backup-decel", backup_decel, "gatekeeper braking deceleration");
  sim_cmd->add_option("--k-v", k_v, "tracker speed gain");
  sim_cmd->add_option("--k-omega", k_omega, "tracker heading gain");
  sim_cmd->add_option("--out", metrics_out, "metrics JSON output path");
  sim_cmd->add_option("--svg", sim_svg, "optional SVG rendering");
  sim_cmd->add_flag("--no-visibility", sim_no_visibility,
                    "ablation variant (affects gatekeeper replanning)");

  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment suite");
  std::string suite_file, bench_out = "results";
  bench_cmd->add_option("--suite", suite_file, "suite config file")->required();
  bench_cmd->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(plan_cmd))
      return run_plan(env_file, max_iter, seed, out_file, no_visibility, svg_file);
    if (app.got_subcommand(sim_cmd))
      return run_simulate(sim_env, plan_file, controller, backup_decel, k_v, k_omega,
                          sim_no_visibility, metrics_out, sim_svg);
    if (app.got_subcommand(bench_cmd)) return run_bench(suite_file, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
