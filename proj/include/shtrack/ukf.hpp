#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace shtrack {

struct FilterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gaussian state estimate. The covariance is kept symmetric by
/// re-symmetrizing after every filter step.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return int(mean.size()); }
};

/// Scaled unscented-transform parameters; lambda = alpha^2 (n + kappa) - n.
struct UkfParams {
  double alpha{1.0};
  double beta{2.0};
  double kappa{0.0};

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }

  void validate(int n) const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw FilterError("UkfParams: alpha must be in (0, 1]");
    if (!(n + lambda(n) > 0.0)) throw FilterError("UkfParams: n + lambda must be positive");
  }
};

/// 2n+1 sigma points as columns, with unscented-transform weights.
struct SigmaPointSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd cov_weights;

  int count() const { return int(points.cols()); }
};

namespace detail {

inline void symmetrize(Eigen::MatrixXd& m) { m = (0.5 * (m + m.transpose())).eval(); }

/// Cholesky factor of the covariance, with escalating diagonal jitter when
/// the factorization fails; near-singular coefficient covariances show up
/// after long update sequences.
inline Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& covariance, int* jitter_steps) {
  const int n = int(covariance.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double scale = std::max(covariance.trace() / n, 1e-300);
  for (const double jitter : {1e-12, 1e-10, 1e-8, 1e-6}) {
    if (jitter_steps) ++(*jitter_steps);
    llt.compute(covariance + jitter * scale * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw FilterError("sigma_points: covariance square root failed after jitter escalation");
}

}  // namespace detail

/// Standard scaled sigma-point set: the mean plus symmetric excursions of
/// sqrt(n + lambda) times the covariance square-root columns.
inline SigmaPointSet sigma_points(const GaussianBelief& belief, const UkfParams& params = {},
                                  int* jitter_steps = nullptr) {
  const int n = belief.dim();
  if (n < 1 || belief.covariance.rows() != n || belief.covariance.cols() != n) {
    throw FilterError("sigma_points: inconsistent belief dimensions");
  }
  params.validate(n);
  const double lambda = params.lambda(n);
  const Eigen::MatrixXd root = detail::covariance_sqrt(belief.covariance, jitter_steps);
  const double spread = std::sqrt(n + lambda);

  SigmaPointSet set;
  set.points.resize(n, 2 * n + 1);
  set.points.col(0) = belief.mean;
  for (int i = 0; i < n; ++i) {
    set.points.col(1 + i) = belief.mean + spread * root.col(i);
    set.points.col(1 + n + i) = belief.mean - spread * root.col(i);
  }
  set.mean_weights.resize(2 * n + 1);
  set.cov_weights.resize(2 * n + 1);
  set.mean_weights[0] = lambda / (n + lambda);
  set.cov_weights[0] = set.mean_weights[0] + 1.0 - params.alpha * params.alpha + params.beta;
  const double rest = 1.0 / (2.0 * (n + lambda));
  for (int i = 1; i <= 2 * n; ++i) {
    set.mean_weights[i] = rest;
    set.cov_weights[i] = rest;
  }
  return set;
}

/// UKF prediction with additive process noise Q.
inline GaussianBelief predict(const GaussianBelief& belief,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& system_fn,
                              const Eigen::MatrixXd& process_noise, const UkfParams& params = {},
                              int* jitter_steps = nullptr) {
  const SigmaPointSet set = sigma_points(belief, params, jitter_steps);
  const int n = belief.dim();

  Eigen::MatrixXd propagated(n, set.count());
  for (int i = 0; i < set.count(); ++i) {
    propagated.col(i) = system_fn(set.points.col(i));
    if (!propagated.col(i).allFinite()) {
      throw FilterError("predict: system model produced non-finite values");
    }
  }

  GaussianBelief out;
  out.mean = propagated * set.mean_weights;
  out.covariance = process_noise;
  for (int i = 0; i < set.count(); ++i) {
    const Eigen::VectorXd d = propagated.col(i) - out.mean;
    out.covariance.noalias() += set.cov_weights[i] * d * d.transpose();
  }
  detail::symmetrize(out.covariance);
  return out;
}

/// UKF measurement update with additive noise R. Returns nothing when the
/// innovation covariance is singular; the caller keeps the prior belief.
inline std::optional<GaussianBelief> update(
    const GaussianBelief& belief,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& measurement_fn,
    const Eigen::VectorXd& measurement, const Eigen::MatrixXd& measurement_noise,
    const UkfParams& params = {}, int* jitter_steps = nullptr) {
  const SigmaPointSet set = sigma_points(belief, params, jitter_steps);
  const int n = belief.dim();
  const int q = int(measurement.size());

  Eigen::MatrixXd observed(q, set.count());
  for (int i = 0; i < set.count(); ++i) {
    observed.col(i) = measurement_fn(set.points.col(i));
    if (observed.col(i).size() != q || !observed.col(i).allFinite()) {
      return std::nullopt;
    }
  }

  const Eigen::VectorXd predicted = observed * set.mean_weights;
  Eigen::MatrixXd innovation_cov = measurement_noise;
  Eigen::MatrixXd cross_cov = Eigen::MatrixXd::Zero(n, q);
  for (int i = 0; i < set.count(); ++i) {
    const Eigen::VectorXd dz = observed.col(i) - predicted;
    const Eigen::VectorXd dx = set.points.col(i) - belief.mean;
    innovation_cov.noalias() += set.cov_weights[i] * dz * dz.transpose();
    cross_cov.noalias() += set.cov_weights[i] * dx * dz.transpose();
  }
  detail::symmetrize(innovation_cov);

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(innovation_cov);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::MatrixXd gain = cross_cov * lu.inverse();

  GaussianBelief out;
  out.mean = belief.mean + gain * (measurement - predicted);
  out.covariance = belief.covariance - gain * innovation_cov * gain.transpose();
  detail::symmetrize(out.covariance);
  if (!out.mean.allFinite() || !out.covariance.allFinite()) return std::nullopt;
  return out;
}

}  // namespace shtrack
