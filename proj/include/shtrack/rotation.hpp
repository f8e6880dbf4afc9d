#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <stdexcept>
#include <vector>

#include "shtrack/coefficients.hpp"
#include "shtrack/quadrature.hpp"

namespace shtrack {

/// Proper rotation of 3-space. Wraps an orthogonal matrix with det +1,
/// validated on construction from raw matrices.
class Rotation3 {
 public:
  Rotation3() : matrix_(Eigen::Matrix3d::Identity()) {}

  static Rotation3 identity() { return Rotation3(); }

  static Rotation3 from_axis_angle(const Eigen::Vector3d& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) throw std::invalid_argument("Rotation3: zero rotation axis");
    Rotation3 r;
    r.matrix_ = Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
    return r;
  }

  static Rotation3 from_matrix(const Eigen::Matrix3d& m) {
    const double ortho_err = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-12 || std::abs(m.determinant() - 1.0) > 1e-12) {
      throw std::invalid_argument("Rotation3: matrix is not a proper rotation");
    }
    Rotation3 r;
    r.matrix_ = m;
    return r;
  }

  const Eigen::Matrix3d& matrix() const { return matrix_; }

  Rotation3 inverse() const {
    Rotation3 r;
    r.matrix_ = matrix_.transpose();
    return r;
  }

  Rotation3 operator*(const Rotation3& other) const {
    Rotation3 r;
    r.matrix_ = matrix_ * other.matrix_;
    return r;
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return matrix_ * v; }

 private:
  Eigen::Matrix3d matrix_;
};

/// Block-diagonal action of a 3D rotation on coefficient vectors: one
/// orthogonal (2l+1) x (2l+1) block per degree.
struct DegreeBlockRotation {
  int degree{0};
  std::vector<Eigen::MatrixXd> blocks;
};

/// Builds the per-degree rotation blocks by quadrature projection:
/// block_l(m', m) = integral of S_l^{m'}(dir) S_l^m(R^{-1} dir). Exact up
/// to quadrature because rotations preserve each degree subspace.
inline DegreeBlockRotation rotation_operator(const Rotation3& rot, int degree) {
  DegreeBlockRotation op;
  op.degree = degree;
  op.blocks.reserve(degree + 1);
  for (int l = 0; l <= degree; ++l) {
    op.blocks.emplace_back(Eigen::MatrixXd::Zero(2 * l + 1, 2 * l + 1));
  }

  const SphereQuadrature quad = SphereQuadrature::for_degree(2 * degree + 2);
  const BasisEvaluator basis(degree);
  const Eigen::Matrix3d inv = rot.inverse().matrix();
  std::vector<double> here(basis.count());
  std::vector<double> rotated(basis.count());
  for (const auto& node : quad.nodes()) {
    basis.evaluate(node.dir, here);
    basis.evaluate(direction_of(inv * unit_vector(node.dir)), rotated);
    for (int l = 0; l <= degree; ++l) {
      auto& block = op.blocks[l];
      const int base = sh_index(l, -l);
      for (int row = 0; row < 2 * l + 1; ++row) {
        const double lhs = node.weight * here[base + row];
        if (lhs == 0.0) continue;
        for (int col = 0; col < 2 * l + 1; ++col) {
          block(row, col) += lhs * rotated[base + col];
        }
      }
    }
  }
  return op;
}

/// Applies the block rotation: per-degree matrix-vector products.
inline ShCoefficients rotate_coefficients(const ShCoefficients& coeffs,
                                          const DegreeBlockRotation& op) {
  if (coeffs.degree != op.degree) {
    throw std::invalid_argument("rotate_coefficients: degree mismatch");
  }
  ShCoefficients out = ShCoefficients::zeros(coeffs.degree);
  for (int l = 0; l <= coeffs.degree; ++l) {
    const int base = sh_index(l, -l);
    out.weights.segment(base, 2 * l + 1) = op.blocks[l] * coeffs.weights.segment(base, 2 * l + 1);
  }
  return out;
}

/// In-place variant on a raw coefficient segment (used by the tracker's
/// sigma-point propagation).
inline void rotate_weights_in_place(Eigen::Ref<Eigen::VectorXd> weights,
                                    const DegreeBlockRotation& op) {
  if (weights.size() != sh_count(op.degree)) {
    throw std::invalid_argument("rotate_weights_in_place: size mismatch");
  }
  for (int l = 0; l <= op.degree; ++l) {
    const int base = sh_index(l, -l);
    weights.segment(base, 2 * l + 1) = (op.blocks[l] * weights.segment(base, 2 * l + 1)).eval();
  }
}

}  // namespace shtrack
