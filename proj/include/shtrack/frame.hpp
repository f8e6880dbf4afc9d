#pragma once

#include <Eigen/Dense>
#include <vector>

namespace shtrack {

/// One timestep's batch of 3D surface point measurements.
struct Frame {
  int k{0};
  std::vector<Eigen::Vector3d> points;
};

}  // namespace shtrack
