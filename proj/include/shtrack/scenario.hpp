#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "shtrack/frame.hpp"
#include "shtrack/frame_io.hpp"
#include "shtrack/shape.hpp"
#include "shtrack/tracker.hpp"
#include "shtrack/voxel.hpp"

namespace shtrack {

struct CuboidTruth {
  Eigen::Vector3d half_extents{1.5, 0.5, 0.5};
};
struct SphereTruth {
  double radius{1.0};
};
struct MeshTruth {
  std::filesystem::path path;
  double scale{1.0};
};
using GroundTruthSpec = std::variant<CuboidTruth, SphereTruth, MeshTruth>;

/// Full description of a simulation run: ground truth, motion schedule,
/// measurement generation, filter settings, and the IoU grid.
struct ScenarioConfig {
  GroundTruthSpec ground_truth{CuboidTruth{}};
  std::optional<RotationInput> motion;  // absent = static
  int measurements_per_frame{60};
  double noise_variance{1e-2};
  int frame_count{20};
  std::uint64_t seed{0};
  TrackerConfig tracker;
  int iou_resolution{128};
  double iou_padding{0.10};

  void validate() const {
    if (measurements_per_frame < 1) {
      throw std::invalid_argument("ScenarioConfig: measurements_per_frame must be >= 1");
    }
    if (frame_count < 1) throw std::invalid_argument("ScenarioConfig: frame_count must be >= 1");
    if (noise_variance < 0.0) {
      throw std::invalid_argument("ScenarioConfig: noise_variance must be >= 0");
    }
    if (iou_resolution < 1) throw std::invalid_argument("ScenarioConfig: iou_resolution must be >= 1");
    if (iou_padding < 0.0) throw std::invalid_argument("ScenarioConfig: iou_padding must be >= 0");
    tracker.validate();
  }
};

/// Per-step output record. Wall time is kept for in-process consumers but
/// never serialized, so identical seeds give byte-identical streams.
struct StepReport {
  int k{0};
  std::optional<double> iou;
  std::optional<double> position_error;
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::VectorXd coefficients;
  int skipped{0};
  double wall_ms{0.0};
};

inline void to_json(nlohmann::json& j, const StepReport& r) {
  j = nlohmann::json{{"k", r.k},
                     {"position", {r.position.x(), r.position.y(), r.position.z()}},
                     {"coefficients", std::vector<double>(r.coefficients.data(),
                                                          r.coefficients.data() +
                                                              r.coefficients.size())},
                     {"skipped", r.skipped}};
  if (r.iou) j["iou"] = *r.iou;
  if (r.position_error) j["position_error"] = *r.position_error;
}

/// Ground truth at rest pose; meshes are loaded relative to base_dir and
/// uniformly scaled.
inline StarConvexShape make_ground_truth(const ScenarioConfig& config,
                                         const std::filesystem::path& base_dir = {}) {
  return std::visit(
      [&](const auto& truth) -> StarConvexShape {
        using T = std::decay_t<decltype(truth)>;
        if constexpr (std::is_same_v<T, CuboidTruth>) {
          return StarConvexShape::cuboid(truth.half_extents);
        } else if constexpr (std::is_same_v<T, SphereTruth>) {
          return StarConvexShape::sphere(truth.radius);
        } else {
          const auto path = truth.path.is_absolute() ? truth.path : base_dir / truth.path;
          TriangleMesh mesh = load_mesh(path);
          if (mesh.empty()) throw std::runtime_error("ground-truth mesh is empty: " + path.string());
          if (truth.scale != 1.0) {
            for (auto& v : mesh.vertices) v *= truth.scale;
          }
          return StarConvexShape::mesh(std::move(mesh));
        }
      },
      config.ground_truth);
}

/// Pose of the ground truth at step k (1-based); the first frame sees the
/// rest pose.
inline StarConvexShape ground_truth_at(const StarConvexShape& rest, const ScenarioConfig& config,
                                       int k) {
  if (!config.motion || config.motion->rate == 0.0) return rest;
  return rest.rotated(Rotation3::from_axis_angle(config.motion->axis,
                                                 config.motion->rate * (k - 1)));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Noisy surface measurements of the posed ground truth; deterministic in
/// (seed, k) regardless of call order.
inline Frame generate_frame(const ScenarioConfig& config, const StarConvexShape& truth_at_k,
                            int k) {
  std::mt19937_64 rng(detail::splitmix64(config.seed ^ detail::splitmix64(std::uint64_t(k))));
  Frame frame;
  frame.k = k;
  frame.points = truth_at_k.sample_surface(config.measurements_per_frame, rng);
  if (config.noise_variance > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(config.noise_variance));
    for (auto& p : frame.points) {
      p.x() += noise(rng);
      p.y() += noise(rng);
      p.z() += noise(rng);
    }
  }
  return frame;
}

struct SimulationResult {
  std::vector<StepReport> reports;
  GaussianBelief final_belief;
  int degree{0};
};

/// Runs the full estimation pipeline on synthetic frames: initialize from
/// frame 1, then one process_frame cycle per frame, reporting IoU against
/// the posed ground truth after every step. The IoU grid is rebuilt per
/// step from the two bounding boxes at the configured resolution.
inline SimulationResult run_simulation(
    const ScenarioConfig& config, const std::function<void(const StepReport&)>& sink = {},
    const std::filesystem::path& base_dir = {}) {
  config.validate();
  const StarConvexShape rest = make_ground_truth(config, base_dir);
  const Eigen::Vector3d truth_center = rest.bounding_box().center();

  const Frame first = generate_frame(config, ground_truth_at(rest, config, 1), 1);
  GaussianBelief belief = initialize_belief(first, config.tracker);

  SimulationResult result;
  result.degree = config.tracker.degree;
  result.reports.reserve(config.frame_count);
  for (int k = 1; k <= config.frame_count; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const StarConvexShape truth_k = ground_truth_at(rest, config, k);
    const Frame frame = (k == 1) ? first : generate_frame(config, truth_k, k);

    ProcessStats stats;
    belief = process_frame(belief, frame, config.tracker, config.motion, &stats);

    StepReport report;
    report.k = k;
    report.position = state_position(belief.mean);
    report.coefficients = belief.mean.tail(sh_count(config.tracker.degree));
    report.skipped = stats.skipped;
    report.position_error = (report.position - truth_center).norm();

    const auto estimate = StarConvexShape::harmonics(
        state_coefficients(belief.mean, config.tracker.degree), report.position);
    const VoxelGrid grid = VoxelGrid::covering(truth_k.bounding_box(), estimate.bounding_box(),
                                               config.iou_resolution, config.iou_padding);
    report.iou = iou(truth_k, estimate, grid);

    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (sink) sink(report);
    result.reports.push_back(std::move(report));
  }
  result.final_belief = std::move(belief);
  return result;
}

/// Same pipeline on recorded frames: no ground truth, so reports carry no
/// IoU or position error.
inline SimulationResult replay(const std::filesystem::path& frames_dir,
                               const TrackerConfig& tracker,
                               const std::function<void(const StepReport&)>& sink = {},
                               int max_frames = 0) {
  tracker.validate();
  const auto files = list_frame_files(frames_dir);

  SimulationResult result;
  result.degree = tracker.degree;
  GaussianBelief belief;
  int k = 0;
  for (const auto& file : files) {
    ++k;
    if (max_frames > 0 && k > max_frames) break;
    const auto start = std::chrono::steady_clock::now();
    const Frame frame = read_frame_file(file, k);
    if (k == 1) {
      if (frame.points.empty()) {
        throw std::runtime_error("first frame is empty: " + file.string());
      }
      belief = initialize_belief(frame, tracker);
    }
    ProcessStats stats;
    belief = process_frame(belief, frame, tracker, std::nullopt, &stats);

    StepReport report;
    report.k = k;
    report.position = state_position(belief.mean);
    report.coefficients = belief.mean.tail(sh_count(tracker.degree));
    report.skipped = stats.skipped;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (sink) sink(report);
    result.reports.push_back(std::move(report));
  }
  result.final_belief = std::move(belief);
  return result;
}

/// Writes the tessellated series surface of a state as an OBJ file.
inline void export_mesh(const ShCoefficients& coeffs, const Eigen::Vector3d& star_point,
                        const std::filesystem::path& path, int resolution = 64) {
  save_obj(tessellate(coeffs, star_point, resolution, 2 * resolution), path);
}

// ---- JSON bindings -------------------------------------------------------

inline void from_json(const nlohmann::json& j, TrackerConfig& config) {
  config.degree = j.value("degree", config.degree);
  config.initial_radius = j.value("initial_radius", config.initial_radius);
  config.initial_position_std = j.value("initial_position_std", config.initial_position_std);
  config.initial_coefficient_std =
      j.value("initial_coefficient_std", config.initial_coefficient_std);
  config.process_position_std = j.value("process_position_std", config.process_position_std);
  config.process_coefficient_std =
      j.value("process_coefficient_std", config.process_coefficient_std);
  config.process_coefficient_std_motion =
      j.value("process_coefficient_std_motion", config.process_coefficient_std_motion);
  if (j.contains("measurement_std")) config.measurement_std = j.at("measurement_std").get<double>();
  if (j.contains("ukf")) {
    const auto& u = j.at("ukf");
    config.ukf.alpha = u.value("alpha", config.ukf.alpha);
    config.ukf.beta = u.value("beta", config.ukf.beta);
    config.ukf.kappa = u.value("kappa", config.ukf.kappa);
  }
}

inline void to_json(nlohmann::json& j, const TrackerConfig& config) {
  j = nlohmann::json{{"degree", config.degree},
                     {"initial_radius", config.initial_radius},
                     {"initial_position_std", config.initial_position_std},
                     {"initial_coefficient_std", config.initial_coefficient_std},
                     {"process_position_std", config.process_position_std},
                     {"process_coefficient_std", config.process_coefficient_std},
                     {"process_coefficient_std_motion", config.process_coefficient_std_motion},
                     {"measurement_std", config.measurement_std},
                     {"ukf",
                      {{"alpha", config.ukf.alpha},
                       {"beta", config.ukf.beta},
                       {"kappa", config.ukf.kappa}}}};
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& config) {
  if (!j.contains("seed")) {
    throw std::invalid_argument("scenario config: \"seed\" is mandatory");
  }
  config.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("ground_truth")) {
    const auto& g = j.at("ground_truth");
    const std::string type = g.at("type").get<std::string>();
    if (type == "cuboid") {
      const auto h = g.at("half_extents").get<std::array<double, 3>>();
      config.ground_truth = CuboidTruth{{h[0], h[1], h[2]}};
    } else if (type == "sphere") {
      config.ground_truth = SphereTruth{g.at("radius").get<double>()};
    } else if (type == "mesh") {
      MeshTruth mesh;
      mesh.path = g.at("path").get<std::string>();
      mesh.scale = g.value("scale", 1.0);
      config.ground_truth = mesh;
    } else {
      throw std::invalid_argument("scenario config: unknown ground_truth type: " + type);
    }
  }

  if (j.contains("motion")) {
    const auto& m = j.at("motion");
    const std::string type = m.at("type").get<std::string>();
    if (type == "static") {
      config.motion.reset();
    } else if (type == "rotation") {
      const auto axis = m.at("axis").get<std::array<double, 3>>();
      const double rate = m.contains("rate_deg") ? m.at("rate_deg").get<double>() * pi / 180.0
                                                 : m.at("rate_rad").get<double>();
      config.motion.emplace(Eigen::Vector3d(axis[0], axis[1], axis[2]), rate);
    } else {
      throw std::invalid_argument("scenario config: unknown motion type: " + type);
    }
  }

  config.measurements_per_frame = j.value("measurements_per_frame", config.measurements_per_frame);
  config.noise_variance = j.value("noise_variance", config.noise_variance);
  config.frame_count = j.value("frame_count", config.frame_count);
  config.iou_resolution = j.value("iou_resolution", config.iou_resolution);
  config.iou_padding = j.value("iou_padding", config.iou_padding);
  if (j.contains("tracker")) {
    config.tracker = j.at("tracker").get<TrackerConfig>();
  }
  if (!j.contains("tracker") || !j.at("tracker").contains("measurement_std")) {
    config.tracker.measurement_std = std::sqrt(std::max(config.noise_variance, 1e-12));
  }
  config.validate();
}

/// Belief snapshot schema used by the CLI: mean, covariance, degree, and
/// the fixed packing order.
inline nlohmann::json belief_to_json(const GaussianBelief& belief, int degree) {
  nlohmann::json j;
  j["degree"] = degree;
  j["packing"] = "p1,p2,p3,w(0,0),w(1,-1),w(1,0),w(1,1),...";
  j["mean"] = std::vector<double>(belief.mean.data(), belief.mean.data() + belief.mean.size());
  auto rows = nlohmann::json::array();
  for (int i = 0; i < belief.covariance.rows(); ++i) {
    const Eigen::VectorXd row = belief.covariance.row(i);
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["covariance"] = rows;
  return j;
}

inline std::pair<GaussianBelief, int> belief_from_json(const nlohmann::json& j) {
  const int degree = j.at("degree").get<int>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  if (int(mean.size()) != position_dim + sh_count(degree)) {
    throw std::invalid_argument("belief snapshot: mean length does not match degree");
  }
  GaussianBelief belief;
  belief.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
  const int n = int(mean.size());
  belief.covariance = Eigen::MatrixXd::Zero(n, n);
  if (j.contains("covariance")) {
    const auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
    if (int(rows.size()) != n) {
      throw std::invalid_argument("belief snapshot: covariance row count mismatch");
    }
    for (int i = 0; i < n; ++i) {
      if (int(rows[i].size()) != n) {
        throw std::invalid_argument("belief snapshot: covariance column count mismatch");
      }
      belief.covariance.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[i].data(), n);
    }
  }
  return {std::move(belief), degree};
}

}  // namespace shtrack
