#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "shtrack/basis.hpp"
#include "shtrack/coefficients.hpp"
#include "shtrack/frame.hpp"
#include "shtrack/rotation.hpp"
#include "shtrack/ukf.hpp"

namespace shtrack {

inline constexpr int position_dim = 3;

/// Known angular velocity fed to the rotation system model.
struct RotationInput {
  Eigen::Vector3d axis;
  double rate;  // radians per time step

  RotationInput(const Eigen::Vector3d& raw_axis, double rate_radians)
      : axis(raw_axis), rate(rate_radians) {
    const double n = axis.norm();
    if (n < 1e-12) throw std::invalid_argument("RotationInput: zero axis");
    axis /= n;
  }
};

/// Filter settings. The paper fixes none of these; values are
/// configuration with the defaults below.
struct TrackerConfig {
  int degree{8};
  double initial_radius{1.0};
  double initial_position_std{0.5};
  double initial_coefficient_std{0.6};
  double process_position_std{0.002};
  double process_coefficient_std{0.002};
  double process_coefficient_std_motion{0.002};
  double measurement_std{0.1};
  UkfParams ukf{};

  int state_dim() const { return position_dim + sh_count(degree); }

  void validate() const {
    if (degree < 0) throw std::invalid_argument("TrackerConfig: degree must be >= 0");
    for (const double v : {initial_radius, initial_position_std, initial_coefficient_std,
                           process_position_std, process_coefficient_std,
                           process_coefficient_std_motion, measurement_std}) {
      if (!(v > 0.0)) throw std::invalid_argument("TrackerConfig: stds and radius must be > 0");
    }
  }
};

/// State packing [p1, p2, p3, w_0^0, w_1^{-1}, w_1^0, w_1^1, ...].
inline Eigen::VectorXd pack_state(const Eigen::Vector3d& position, const ShCoefficients& coeffs) {
  Eigen::VectorXd x(position_dim + coeffs.weights.size());
  x.head<position_dim>() = position;
  x.tail(coeffs.weights.size()) = coeffs.weights;
  return x;
}

inline Eigen::Vector3d state_position(const Eigen::VectorXd& state) {
  return state.head<position_dim>();
}

inline ShCoefficients state_coefficients(const Eigen::VectorXd& state, int degree) {
  if (state.size() != position_dim + sh_count(degree)) {
    throw std::invalid_argument("state_coefficients: state length does not match degree");
  }
  return {degree, state.tail(sh_count(degree))};
}

/// Random-walk system model: the identity.
inline Eigen::VectorXd system_random_walk(const Eigen::VectorXd& state) { return state; }

/// Per-step block rotation for a known angular velocity.
inline DegreeBlockRotation rotation_step_operator(const RotationInput& input, int degree) {
  return rotation_operator(Rotation3::from_axis_angle(input.axis, input.rate), degree);
}

/// Rotation system model: position unchanged, coefficients rotated. The
/// rotation axis is taken through the star point.
inline Eigen::VectorXd system_rotation(const Eigen::VectorXd& state,
                                       const DegreeBlockRotation& op) {
  Eigen::VectorXd out = state;
  rotate_weights_in_place(out.tail(sh_count(op.degree)), op);
  return out;
}

/// Greedy-association measurement function: the predicted measurement is
/// the surface point along the ray from the state's position through the
/// measurement. The direction is recomputed per evaluated state.
inline Eigen::Vector3d gam_measurement(const Eigen::VectorXd& state, const Eigen::Vector3d& y,
                                       const BasisEvaluator& basis) {
  const Eigen::Vector3d p = state_position(state);
  const Eigen::Vector3d z = y - p;
  const double r = z.norm();
  if (r < 1e-9) return p;  // degenerate direction
  const double rho = std::hypot(z.x(), z.y());
  const double cos_theta = z.z() / r;
  const double sin_theta = rho / r;
  const double cos_phi = (rho == 0.0) ? 1.0 : z.x() / rho;
  const double sin_phi = (rho == 0.0) ? 0.0 : z.y() / rho;
  const std::span<const double> weights{state.data() + position_dim,
                                        std::size_t(state.size() - position_dim)};
  const double radius = basis.evaluate_series(cos_theta, sin_theta, cos_phi, sin_phi, weights);
  return p + (z / r) * radius;
}

/// Centroid position, sphere shape of the configured radius, diagonal
/// covariance from the configured stds.
inline GaussianBelief initialize_belief(const Frame& frame, const TrackerConfig& config) {
  config.validate();
  if (frame.points.empty()) throw std::invalid_argument("initialize_belief: empty frame");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : frame.points) centroid += p;
  centroid /= double(frame.points.size());

  GaussianBelief belief;
  belief.mean = pack_state(centroid, ShCoefficients::sphere(config.initial_radius, config.degree));
  Eigen::VectorXd diag(config.state_dim());
  diag.head<position_dim>().setConstant(config.initial_position_std * config.initial_position_std);
  diag.tail(sh_count(config.degree))
      .setConstant(config.initial_coefficient_std * config.initial_coefficient_std);
  belief.covariance = diag.asDiagonal();
  return belief;
}

struct ProcessStats {
  int skipped{0};
  int jitter_repairs{0};
};

/// One filter cycle: a predict under the random-walk or known-rotation
/// model, then one sequential UKF update per measurement point.
inline GaussianBelief process_frame(const GaussianBelief& belief, const Frame& frame,
                                    const TrackerConfig& config,
                                    const std::optional<RotationInput>& motion = std::nullopt,
                                    ProcessStats* stats = nullptr) {
  config.validate();
  if (belief.dim() != config.state_dim()) {
    throw std::invalid_argument("process_frame: belief does not match configured degree");
  }

  const int n_coeffs = sh_count(config.degree);
  Eigen::VectorXd q_diag(config.state_dim());
  q_diag.head<position_dim>().setConstant(config.process_position_std *
                                          config.process_position_std);
  const double coeff_std =
      motion ? config.process_coefficient_std_motion : config.process_coefficient_std;
  q_diag.tail(n_coeffs).setConstant(coeff_std * coeff_std);
  const Eigen::MatrixXd process_noise = q_diag.asDiagonal();

  ProcessStats local;
  ProcessStats& counters = stats ? *stats : local;

  GaussianBelief current = belief;
  if (motion) {
    const DegreeBlockRotation op = rotation_step_operator(*motion, config.degree);
    current = predict(
        current, [&op](const Eigen::VectorXd& x) { return system_rotation(x, op); }, process_noise,
        config.ukf, &counters.jitter_repairs);
  } else {
    current = predict(current, system_random_walk, process_noise, config.ukf,
                      &counters.jitter_repairs);
  }

  const BasisEvaluator basis(config.degree);
  const Eigen::Matrix3d noise =
      config.measurement_std * config.measurement_std * Eigen::Matrix3d::Identity();
  for (const auto& y : frame.points) {
    if (!y.allFinite() || (y - state_position(current.mean)).norm() < 1e-9) {
      ++counters.skipped;
      continue;
    }
    const auto updated = update(
        current, [&](const Eigen::VectorXd& x) { return gam_measurement(x, y, basis); }, y, noise,
        config.ukf, &counters.jitter_repairs);
    if (updated) {
      current = *updated;
    } else {
      ++counters.skipped;
    }
  }
  return current;
}

}  // namespace shtrack
