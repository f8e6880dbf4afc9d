#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shtrack {

struct MeshParseError : std::runtime_error {
  MeshParseError(const std::filesystem::path& path, int line, const std::string& what)
      : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what) {}
};

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

inline double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

inline double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  }
  return area;
}

/// Volume by the divergence theorem; positive for outward-oriented
/// watertight meshes.
inline double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (const auto& t : mesh.triangles) {
    vol += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  return vol / 6.0;
}

inline Eigen::AlignedBox3d bounding_box(const TriangleMesh& mesh) {
  Eigen::AlignedBox3d box;
  for (const auto& v : mesh.vertices) box.extend(v);
  return box;
}

/// Drops triangles with repeated vertex indices or (near-)zero area.
inline void remove_degenerate_triangles(TriangleMesh& mesh) {
  const auto bad = [&mesh](const std::array<int, 3>& t) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return true;
    return triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < 1e-14;
  };
  std::erase_if(mesh.triangles, bad);
}

namespace detail {

inline int resolve_obj_index(long raw, size_t vertex_count, const std::filesystem::path& path,
                             int line) {
  long idx = raw;
  if (idx < 0) idx = long(vertex_count) + idx + 1;  // negative indices count from the end
  if (idx < 1 || idx > long(vertex_count)) {
    throw MeshParseError(path, line, "vertex index out of range: " + std::to_string(raw));
  }
  return int(idx - 1);
}

inline TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path.string());
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Eigen::Vector3d v;
      if (!(ss >> v.x() >> v.y() >> v.z())) {
        throw MeshParseError(path, line_no, "malformed vertex line");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string token;
      while (ss >> token) {
        // accept i, i/j, i/j/k, i//k
        const size_t slash = token.find('/');
        const std::string head = token.substr(0, slash);
        long raw = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), raw);
        if (ec != std::errc{} || ptr != head.data() + head.size()) {
          throw MeshParseError(path, line_no, "malformed face token: " + token);
        }
        face.push_back(resolve_obj_index(raw, mesh.vertices.size(), path, line_no));
      }
      if (face.size() < 3) throw MeshParseError(path, line_no, "face with fewer than 3 vertices");
      for (size_t i = 1; i + 1 < face.size(); ++i) {
        mesh.triangles.push_back({face[0], face[i], face[i + 1]});
      }
    }
  }
  return mesh;
}

inline TriangleMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path.string());
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) throw MeshParseError(path, line_no, "unexpected end of file");
    ++line_no;
    return line;
  };

  if (next_line() != "ply") throw MeshParseError(path, line_no, "missing ply magic");

  long vertex_count = -1;
  long face_count = -1;
  int x_prop = -1, y_prop = -1, z_prop = -1;
  int vertex_props = 0;
  std::string current_element;
  bool ascii = false;
  while (true) {
    std::istringstream ss(next_line());
    std::string tag;
    ss >> tag;
    if (tag == "end_header") break;
    if (tag == "comment") continue;
    if (tag == "format") {
      std::string kind;
      ss >> kind;
      ascii = (kind == "ascii");
      if (!ascii) throw MeshParseError(path, line_no, "only ascii ply is supported");
    } else if (tag == "element") {
      std::string name;
      long count = 0;
      ss >> name >> count;
      current_element = name;
      if (name == "vertex") vertex_count = count;
      if (name == "face") face_count = count;
    } else if (tag == "property" && current_element == "vertex") {
      std::string type, name;
      ss >> type >> name;
      if (type == "list") continue;
      if (name == "x") x_prop = vertex_props;
      if (name == "y") y_prop = vertex_props;
      if (name == "z") z_prop = vertex_props;
      ++vertex_props;
    }
  }
  if (vertex_count < 0) {
    throw MeshParseError(path, line_no, "header missing vertex element");
  }
  if (face_count < 0) face_count = 0;  // plain point clouds carry no faces
  if (x_prop < 0 || y_prop < 0 || z_prop < 0) {
    throw MeshParseError(path, line_no, "vertex element missing x/y/z properties");
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(vertex_count);
  for (long i = 0; i < vertex_count; ++i) {
    std::istringstream ss(next_line());
    std::vector<double> values(vertex_props);
    for (int p = 0; p < vertex_props; ++p) {
      if (!(ss >> values[p])) throw MeshParseError(path, line_no, "malformed vertex row");
    }
    mesh.vertices.emplace_back(values[x_prop], values[y_prop], values[z_prop]);
  }
  for (long i = 0; i < face_count; ++i) {
    std::istringstream ss(next_line());
    int n = 0;
    if (!(ss >> n) || n < 3) throw MeshParseError(path, line_no, "malformed face row");
    std::vector<int> face(n);
    for (int p = 0; p < n; ++p) {
      if (!(ss >> face[p])) throw MeshParseError(path, line_no, "malformed face row");
      if (face[p] < 0 || face[p] >= long(mesh.vertices.size())) {
        throw MeshParseError(path, line_no, "face index out of range");
      }
    }
    for (int p = 1; p + 1 < n; ++p) mesh.triangles.push_back({face[0], face[p], face[p + 1]});
  }
  return mesh;
}

}  // namespace detail

/// Loads an OBJ or ASCII PLY mesh and drops degenerate triangles.
inline TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  TriangleMesh mesh;
  if (ext == ".obj") {
    mesh = detail::load_obj(path);
  } else if (ext == ".ply") {
    mesh = detail::load_ply(path);
  } else {
    throw std::runtime_error("unsupported mesh format: " + path.string());
  }
  remove_degenerate_triangles(mesh);
  return mesh;
}

inline void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace detail {

/// Ray-triangle intersection (Moller-Trumbore). Returns t, or nan for a
/// miss; marginal is set when the hit grazes an edge or the ray is nearly
/// parallel, in which case the parity test retries with another ray.
inline double ray_triangle(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                           const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                           const Eigen::Vector3d& c, bool& marginal) {
  constexpr double eps = 1e-12;
  const Eigen::Vector3d e1 = b - a;
  const Eigen::Vector3d e2 = c - a;
  const Eigen::Vector3d pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < eps * e1.norm() * e2.norm()) return std::nan("");
  const double inv_det = 1.0 / det;
  const Eigen::Vector3d tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < -eps || u > 1.0 + eps) return std::nan("");
  const Eigen::Vector3d qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < -eps || u + v > 1.0 + eps) return std::nan("");
  const double t = e2.dot(qvec) * inv_det;
  if (t <= eps) {
    if (t > -eps) marginal = true;
    return std::nan("");
  }
  if (u < eps || v < eps || u + v > 1.0 - eps) marginal = true;
  return t;
}

}  // namespace detail

/// Point-in-mesh by ray parity. Uses a fixed jittered ray direction and
/// falls back to alternates when a hit grazes an edge.
inline bool mesh_contains(const TriangleMesh& mesh, const Eigen::Vector3d& point) {
  static const std::array<Eigen::Vector3d, 4> ray_dirs = {
      Eigen::Vector3d(0.5735764363, 0.3420201433, 0.7441379167).normalized(),
      Eigen::Vector3d(-0.2588190451, 0.8191520443, 0.5120428426).normalized(),
      Eigen::Vector3d(0.9063077870, -0.1736481777, 0.3850380702).normalized(),
      Eigen::Vector3d(0.1045284633, 0.5446390350, -0.8321416578).normalized()};
  for (const auto& dir : ray_dirs) {
    bool marginal = false;
    int crossings = 0;
    for (const auto& t : mesh.triangles) {
      const double hit = detail::ray_triangle(point, dir, mesh.vertices[t[0]],
                                              mesh.vertices[t[1]], mesh.vertices[t[2]], marginal);
      if (marginal) break;
      if (!std::isnan(hit)) ++crossings;
    }
    if (!marginal) return (crossings % 2) == 1;
  }
  // all rays grazed an edge; treat the point as on the boundary
  return true;
}

/// Area-weighted surface sampling: triangles chosen by cumulative area,
/// points by sqrt-uniform barycentric coordinates.
inline std::vector<Eigen::Vector3d> sample_mesh_surface(const TriangleMesh& mesh, int n,
                                                        std::mt19937_64& rng) {
  if (mesh.empty()) throw std::invalid_argument("sample_mesh_surface: empty mesh");
  if (n < 1) throw std::invalid_argument("sample_mesh_surface: need n >= 1");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cumulative[i] = total;
  }
  if (total <= 0.0) throw std::invalid_argument("sample_mesh_surface: zero surface area");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Vector3d> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double pick = unit(rng) * total;
    const size_t idx =
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    const auto& t = mesh.triangles[std::min(idx, mesh.triangles.size() - 1)];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    points.push_back((1.0 - r1) * mesh.vertices[t[0]] + r1 * (1.0 - r2) * mesh.vertices[t[1]] +
                     r1 * r2 * mesh.vertices[t[2]]);
  }
  return points;
}

}  // namespace shtrack
