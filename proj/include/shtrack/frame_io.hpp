#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shtrack/frame.hpp"
#include "shtrack/mesh.hpp"

namespace shtrack {

/// Plain-text frame format: one "x y z" point per line. ASCII PLY point
/// clouds are accepted as well.
inline Frame read_frame_file(const std::filesystem::path& path, int k) {
  Frame frame;
  frame.k = k;

  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".ply") {
    const TriangleMesh cloud = detail::load_ply(path);
    frame.points = cloud.vertices;
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open frame file: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      Eigen::Vector3d p;
      if (!(ss >> p.x() >> p.y() >> p.z())) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed point line");
      }
      frame.points.push_back(p);
    }
  }
  for (const auto& p : frame.points) {
    if (!p.allFinite()) {
      throw std::runtime_error(path.string() + ": non-finite point coordinates");
    }
  }
  return frame;
}

inline void write_frame_file(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write frame file: " + path.string());
  out.precision(17);
  for (const auto& p : frame.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Frame files of a recording directory in timestep (filename) order.
inline std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".txt" || ext == ".ply") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::runtime_error("no frame files (*.txt, *.ply) in: " + dir.string());
  }
  return files;
}

}  // namespace shtrack
