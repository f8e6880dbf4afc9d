#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shtrack/shape.hpp"

namespace shtrack {

/// Axis-aligned voxel lattice; containment is always evaluated at cell
/// centers.
struct VoxelGrid {
  Eigen::Vector3d origin{Eigen::Vector3d::Zero()};
  Eigen::Vector3d cell{Eigen::Vector3d::Ones()};
  std::array<int, 3> resolution{1, 1, 1};

  static VoxelGrid from_box(const Eigen::AlignedBox3d& box, std::array<int, 3> resolution) {
    if (resolution[0] < 1 || resolution[1] < 1 || resolution[2] < 1) {
      throw std::invalid_argument("VoxelGrid: resolution must be >= 1 per axis");
    }
    if (box.isEmpty() || (box.sizes().array() <= 0.0).any()) {
      throw std::invalid_argument("VoxelGrid: degenerate box");
    }
    VoxelGrid g;
    g.origin = box.min();
    g.resolution = resolution;
    for (int i = 0; i < 3; ++i) g.cell[i] = box.sizes()[i] / resolution[i];
    return g;
  }

  /// Cubic-cell grid covering both boxes plus a padding fraction of the
  /// longest extent; `resolution` bounds the cell count of the longest axis.
  static VoxelGrid covering(const Eigen::AlignedBox3d& a, const Eigen::AlignedBox3d& b,
                            int resolution, double pad_fraction = 0.05) {
    Eigen::AlignedBox3d box = a;
    box.extend(b);
    const double longest = box.sizes().maxCoeff();
    const double pad = std::max(pad_fraction * longest, 1e-9);
    box.min() -= Eigen::Vector3d::Constant(pad);
    box.max() += Eigen::Vector3d::Constant(pad);
    const double h = box.sizes().maxCoeff() / resolution;
    VoxelGrid g;
    g.origin = box.min();
    g.cell = Eigen::Vector3d::Constant(h);
    for (int i = 0; i < 3; ++i) {
      g.resolution[i] = std::max(1, int(std::ceil(box.sizes()[i] / h - 1e-12)));
    }
    return g;
  }

  Eigen::Vector3d center(int ix, int iy, int iz) const {
    return origin + Eigen::Vector3d((ix + 0.5) * cell.x(), (iy + 0.5) * cell.y(),
                                    (iz + 0.5) * cell.z());
  }

  std::size_t cell_count() const {
    return std::size_t(resolution[0]) * resolution[1] * resolution[2];
  }

  Eigen::AlignedBox3d box() const {
    const Eigen::Vector3d sizes(resolution[0] * cell.x(), resolution[1] * cell.y(),
                                resolution[2] * cell.z());
    return {origin, origin + sizes};
  }

  bool covers(const Eigen::AlignedBox3d& other, double slack = 1e-9) const {
    const auto b = box();
    return (other.min().array() >= b.min().array() - slack).all() &&
           (other.max().array() <= b.max().array() + slack).all();
  }

  double cell_volume() const { return cell.prod(); }
};

/// Dense occupancy bitmask over a voxel grid.
class VoxelMask {
 public:
  explicit VoxelMask(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  std::size_t size() const { return size_; }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto w : words_) n += std::popcount(w);
    return n;
  }

  static std::size_t count_intersection(const VoxelMask& a, const VoxelMask& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) n += std::popcount(a.words_[i] & b.words_[i]);
    return n;
  }

  static std::size_t count_union(const VoxelMask& a, const VoxelMask& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) n += std::popcount(a.words_[i] | b.words_[i]);
    return n;
  }

 private:
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

namespace detail {

/// Column-parity voxelization of a triangle mesh: per (ix, iy) column the
/// crossings of vertical lines with the surface are sorted and cells
/// between odd/even crossing counts are marked. Grazing hits trigger a
/// deterministic sub-cell jitter retry for that column.
inline void rasterize_mesh(const TriangleMesh& mesh, const Eigen::Matrix3d& world_from_body,
                           const Eigen::Vector3d& star_point, const VoxelGrid& grid,
                           VoxelMask& mask) {
  std::vector<Eigen::Vector3d> verts(mesh.vertices.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    verts[i] = world_from_body * mesh.vertices[i] + star_point;
  }

  const int nx = grid.resolution[0];
  const int ny = grid.resolution[1];
  const int nz = grid.resolution[2];

  // bucket triangles by the columns their xy-projection can touch
  std::vector<std::vector<int>> buckets(std::size_t(nx) * ny);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    double min_x = verts[tri[0]].x(), max_x = min_x;
    double min_y = verts[tri[0]].y(), max_y = min_y;
    for (int k = 1; k < 3; ++k) {
      min_x = std::min(min_x, verts[tri[k]].x());
      max_x = std::max(max_x, verts[tri[k]].x());
      min_y = std::min(min_y, verts[tri[k]].y());
      max_y = std::max(max_y, verts[tri[k]].y());
    }
    const int ix0 = std::clamp(int(std::floor((min_x - grid.origin.x()) / grid.cell.x() - 0.5)), 0, nx - 1);
    const int ix1 = std::clamp(int(std::ceil((max_x - grid.origin.x()) / grid.cell.x() - 0.5)), 0, nx - 1);
    const int iy0 = std::clamp(int(std::floor((min_y - grid.origin.y()) / grid.cell.y() - 0.5)), 0, ny - 1);
    const int iy1 = std::clamp(int(std::ceil((max_y - grid.origin.y()) / grid.cell.y() - 0.5)), 0, ny - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        buckets[std::size_t(iy) * nx + ix].push_back(int(t));
      }
    }
  }

  std::vector<double> crossings;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const auto& bucket = buckets[std::size_t(iy) * nx + ix];
      if (bucket.empty()) continue;

      bool clean = false;
      for (int attempt = 0; attempt < 4 && !clean; ++attempt) {
        const bool last_attempt = (attempt == 3);
        const double jitter = attempt * 3.1e-6;
        const double cx = grid.origin.x() + (ix + 0.5 + jitter) * grid.cell.x();
        const double cy = grid.origin.y() + (iy + 0.5 + 1.7 * jitter) * grid.cell.y();
        crossings.clear();
        clean = true;
        for (const int t : bucket) {
          const auto& tri = mesh.triangles[t];
          const Eigen::Vector3d& a = verts[tri[0]];
          const Eigen::Vector3d& b = verts[tri[1]];
          const Eigen::Vector3d& c = verts[tri[2]];
          const double d1x = b.x() - a.x(), d1y = b.y() - a.y();
          const double d2x = c.x() - a.x(), d2y = c.y() - a.y();
          const double denom = d1x * d2y - d1y * d2x;
          const double scale = std::max({std::abs(d1x), std::abs(d1y), std::abs(d2x), std::abs(d2y), 1e-30});
          if (std::abs(denom) < 1e-14 * scale * scale) continue;  // projects to a sliver
          const double px = cx - a.x(), py = cy - a.y();
          const double u = (px * d2y - py * d2x) / denom;
          const double v = (d1x * py - d1y * px) / denom;
          constexpr double eps = 1e-9;
          if (u < -eps || v < -eps || u + v > 1.0 + eps) continue;
          if (u < eps || v < eps || u + v > 1.0 - eps) {
            // grazing an edge; retry the column jittered, except on the
            // final attempt where hits are counted with a half-open rule
            if (!last_attempt) {
              clean = false;
              break;
            }
            if (u < eps || v > 1.0 - eps) continue;
          }
          crossings.push_back(a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z()));
        }
        if (clean && (crossings.size() % 2) != 0 && !last_attempt) clean = false;
      }
      if (crossings.empty()) continue;
      std::sort(crossings.begin(), crossings.end());
      if ((crossings.size() % 2) != 0) crossings.pop_back();

      std::size_t next = 0;
      bool inside = false;
      const std::size_t column_base = (std::size_t(iy) * nx + ix);
      for (int iz = 0; iz < nz; ++iz) {
        const double cz = grid.origin.z() + (iz + 0.5) * grid.cell.z();
        while (next < crossings.size() && crossings[next] < cz) {
          inside = !inside;
          ++next;
        }
        if (inside) mask.set(column_base * nz + iz);
      }
    }
  }
}

}  // namespace detail

/// Marks every cell whose center lies inside the shape.
inline VoxelMask rasterize(const StarConvexShape& shape, const VoxelGrid& grid) {
  VoxelMask mask(grid.cell_count());
  const int nx = grid.resolution[0];
  const int ny = grid.resolution[1];
  const int nz = grid.resolution[2];

  if (const auto* mesh = shape.mesh_body()) {
    detail::rasterize_mesh(*mesh->mesh, shape.orientation().matrix(), shape.star_point(), grid,
                           mask);
    return mask;
  }

  if (const auto* sh = shape.harmonics_body()) {
    // body-frame transform once per voxel; quick accept/reject from the
    // guaranteed radial bounds before evaluating the series
    const Eigen::Matrix3d body_from_world = shape.orientation().inverse().matrix();
    const Eigen::Vector3d star = shape.star_point();
    const double r_hi = std::max(0.0, sh->bounds.upper);
    const double r_lo = std::max(0.0, sh->bounds.lower);
    const std::span<const double> weights{sh->coeffs.weights.data(),
                                          std::size_t(sh->coeffs.weights.size())};
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const std::size_t column_base = (std::size_t(iy) * nx + ix);
        for (int iz = 0; iz < nz; ++iz) {
          const Eigen::Vector3d q = body_from_world * (grid.center(ix, iy, iz) - star);
          const double r = q.norm();
          if (r > r_hi) continue;
          bool in = true;
          if (r > r_lo && r > 0.0) {
            const double rho = std::hypot(q.x(), q.y());
            const double cos_theta = q.z() / r;
            const double sin_theta = rho / r;
            const double cos_phi = (rho == 0.0) ? 1.0 : q.x() / rho;
            const double sin_phi = (rho == 0.0) ? 0.0 : q.y() / rho;
            in = r <= sh->basis->evaluate_series(cos_theta, sin_theta, cos_phi, sin_phi, weights);
          }
          if (in) mask.set(column_base * nz + iz);
        }
      }
    }
    return mask;
  }

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t column_base = (std::size_t(iy) * nx + ix);
      for (int iz = 0; iz < nz; ++iz) {
        if (shape.contains(grid.center(ix, iy, iz))) mask.set(column_base * nz + iz);
      }
    }
  }
  return mask;
}

/// Intersection-over-union of two shapes by voxel-center containment.
inline double iou(const StarConvexShape& a, const StarConvexShape& b, const VoxelGrid& grid) {
  if (!grid.covers(a.bounding_box()) || !grid.covers(b.bounding_box())) {
    throw std::invalid_argument("iou: grid does not cover both shapes");
  }
  const VoxelMask mask_a = rasterize(a, grid);
  const VoxelMask mask_b = rasterize(b, grid);
  const std::size_t inter = VoxelMask::count_intersection(mask_a, mask_b);
  const std::size_t uni = VoxelMask::count_union(mask_a, mask_b);
  if (uni == 0) return 1.0;
  return double(inter) / double(uni);
}

/// Convenience overload that builds a covering cubic-cell grid.
inline double iou(const StarConvexShape& a, const StarConvexShape& b, int resolution = 128,
                  double pad_fraction = 0.05) {
  return iou(a, b, VoxelGrid::covering(a.bounding_box(), b.bounding_box(), resolution, pad_fraction));
}

/// Occupied-cell volume of a shape on a grid (used as a volume oracle).
inline double voxel_volume(const StarConvexShape& shape, const VoxelGrid& grid) {
  return double(rasterize(shape, grid).count()) * grid.cell_volume();
}

}  // namespace shtrack
