// Command-line harness: synthetic-scenario simulation, recorded-frame
// replay, order sweeps, and mesh export for estimated shapes.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shtrack/shtrack.hpp"

namespace fs = std::filesystem;
using namespace shtrack;

namespace {

ScenarioConfig load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  in >> j;
  return j.get<ScenarioConfig>();
}

struct OutputStream {
  explicit OutputStream(const std::string& out_path) {
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    }
  }
  std::ostream& get() { return file.is_open() ? file : std::cout; }
  std::ofstream file;
};

fs::path mesh_snapshot_path(const fs::path& dir, int k) {
  char name[32];
  std::snprintf(name, sizeof(name), "mesh_%06d.obj", k);
  return dir / name;
}

void write_state(const GaussianBelief& belief, int degree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open state output file: " + path);
  out << belief_to_json(belief, degree).dump(2) << '\n';
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

double converged_iou(const std::vector<StepReport>& reports, int tail = 5) {
  std::vector<double> values;
  const size_t start = reports.size() > size_t(tail) ? reports.size() - tail : 0;
  for (size_t i = start; i < reports.size(); ++i) {
    if (reports[i].iou) values.push_back(*reports[i].iou);
  }
  return median(std::move(values));
}

int run_simulate(const fs::path& config_path, std::optional<std::uint64_t> seed,
                 std::optional<int> steps, const std::string& out_path, int mesh_every,
                 const std::string& mesh_dir_opt, const std::string& state_out) {
  ScenarioConfig config = load_scenario(config_path);
  if (seed) config.seed = *seed;
  if (steps) config.frame_count = *steps;

  OutputStream out(out_path);
  fs::path mesh_dir = mesh_dir_opt.empty()
                          ? (out_path.empty() ? fs::path(".") : fs::path(out_path).parent_path())
                          : fs::path(mesh_dir_opt);
  if (mesh_dir.empty()) mesh_dir = ".";
  if (mesh_every > 0) fs::create_directories(mesh_dir);

  const auto sink = [&](const StepReport& report) {
    out.get() << nlohmann::json(report).dump() << '\n';
    if (mesh_every > 0 && (report.k % mesh_every == 0 || report.k == config.frame_count)) {
      const ShCoefficients coeffs{config.tracker.degree, report.coefficients};
      export_mesh(coeffs, report.position, mesh_snapshot_path(mesh_dir, report.k));
    }
  };
  const auto result = run_simulation(config, sink, config_path.parent_path());
  out.get().flush();
  if (!state_out.empty()) write_state(result.final_belief, result.degree, state_out);

  double total_ms = 0.0;
  for (const auto& r : result.reports) total_ms += r.wall_ms;
  std::cerr << "simulate: " << result.reports.size() << " steps in " << total_ms / 1000.0
            << " s; final IoU "
            << (result.reports.back().iou ? std::to_string(*result.reports.back().iou) : "n/a")
            << '\n';
  return 0;
}

int run_replay(const fs::path& frames_dir, const fs::path& config_path, std::optional<int> steps,
               const std::string& out_path, int mesh_every, const std::string& mesh_dir_opt,
               const std::string& state_out) {
  const ScenarioConfig config = load_scenario(config_path);

  OutputStream out(out_path);
  fs::path mesh_dir = mesh_dir_opt.empty()
                          ? (out_path.empty() ? fs::path(".") : fs::path(out_path).parent_path())
                          : fs::path(mesh_dir_opt);
  if (mesh_dir.empty()) mesh_dir = ".";
  if (mesh_every > 0) fs::create_directories(mesh_dir);

  const auto sink = [&](const StepReport& report) {
    out.get() << nlohmann::json(report).dump() << '\n';
    if (mesh_every > 0 && report.k % mesh_every == 0) {
      const ShCoefficients coeffs{config.tracker.degree, report.coefficients};
      export_mesh(coeffs, report.position, mesh_snapshot_path(mesh_dir, report.k));
    }
  };
  const auto result = replay(frames_dir, config.tracker, sink, steps.value_or(0));
  out.get().flush();
  if (!state_out.empty()) write_state(result.final_belief, result.degree, state_out);
  std::cerr << "replay: " << result.reports.size() << " frames processed\n";
  return 0;
}

int run_export_mesh(const fs::path& state_path, const fs::path& out_path, int resolution) {
  std::ifstream in(state_path);
  if (!in) throw std::runtime_error("cannot open state file: " + state_path.string());
  nlohmann::json j;
  in >> j;
  const auto [belief, degree] = belief_from_json(j);
  export_mesh(state_coefficients(belief.mean, degree), state_position(belief.mean), out_path,
              resolution);
  std::cerr << "export-mesh: wrote " << out_path.string() << '\n';
  return 0;
}

int run_sweep(const fs::path& config_path, const std::vector<int>& orders, int seeds,
              std::optional<int> steps, const std::string& out_path) {
  ScenarioConfig base = load_scenario(config_path);
  if (steps) base.frame_count = *steps;

  OutputStream out(out_path);
  for (const int order : orders) {
    std::vector<double> finals;
    for (int s = 0; s < seeds; ++s) {
      ScenarioConfig config = base;
      config.tracker.degree = order;
      config.seed = base.seed + std::uint64_t(s);
      const auto result = run_simulation(config, {}, config_path.parent_path());
      const double converged = converged_iou(result.reports);
      nlohmann::json line{{"L", order},
                          {"seed", config.seed},
                          {"final_iou", result.reports.back().iou.value_or(0.0)},
                          {"converged_iou", converged}};
      out.get() << line.dump() << '\n';
      finals.push_back(converged);
    }
    std::cerr << "sweep: L=" << order << " median converged IoU " << median(finals) << '\n';
  }
  out.get().flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-convex 3D shape tracking with spherical-harmonics state"};
  app.require_subcommand(1);

  std::string config_path, frames_dir, out_path, mesh_dir, state_out, state_path, obj_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  int mesh_every = 0;
  int resolution = 64;
  int seeds = 1;
  std::vector<int> orders = {1, 2, 4, 6, 8};

  auto* simulate = app.add_subcommand("simulate", "run a synthetic scenario from a config file");
  simulate->add_option("config", config_path, "scenario config (JSON)")->required();
  simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--steps", steps, "override the frame count");
  simulate->add_option("--out", out_path, "JSONL report output (default stdout)");
  simulate->add_option("--mesh-every", mesh_every, "export the estimate as OBJ every k steps");
  simulate->add_option("--mesh-dir", mesh_dir, "directory for mesh snapshots");
  simulate->add_option("--state-out", state_out, "write the final belief as JSON");

  auto* rep = app.add_subcommand("replay", "replay recorded point-cloud frames");
  rep->add_option("frames", frames_dir, "directory of frame files (*.txt or *.ply)")->required();
  rep->add_option("config", config_path, "config with tracker settings (JSON)")->required();
  rep->add_option("--steps", steps, "process at most this many frames");
  rep->add_option("--out", out_path, "JSONL report output (default stdout)");
  rep->add_option("--mesh-every", mesh_every, "export the estimate as OBJ every k steps");
  rep->add_option("--mesh-dir", mesh_dir, "directory for mesh snapshots");
  rep->add_option("--state-out", state_out, "write the final belief as JSON");

  auto* exp = app.add_subcommand("export-mesh", "tessellate a belief snapshot into an OBJ");
  exp->add_option("state", state_path, "belief snapshot JSON")->required();
  exp->add_option("out", obj_path, "output OBJ path")->required();
  exp->add_option("--resolution", resolution, "tessellation rings (default 64)");

  auto* sweep = app.add_subcommand("sweep", "run the scenario across series orders");
  sweep->add_option("config", config_path, "scenario config (JSON)")->required();
  sweep->add_option("--orders", orders, "orders L to sweep")->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeds per order (seed, seed+1, ...)");
  sweep->add_option("--steps", steps, "override the frame count");
  sweep->add_option("--out", out_path, "JSONL output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(config_path, seed, steps, out_path, mesh_every, mesh_dir, state_out);
    }
    if (rep->parsed()) {
      return run_replay(frames_dir, config_path, steps, out_path, mesh_every, mesh_dir, state_out);
    }
    if (exp->parsed()) {
      return run_export_mesh(state_path, obj_path, resolution);
    }
    if (sweep->parsed()) {
      return run_sweep(config_path, orders, seeds, steps, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
