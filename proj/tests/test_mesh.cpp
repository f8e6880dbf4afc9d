#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "shtrack/mesh.hpp"
#include "support/test_shapes.hpp"

using namespace shtrack;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "shtrack_mesh_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const auto path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_mesh reads a minimal OBJ") {
  const auto path = write_file("tri.obj",
                               "# one triangle\n"
                               "v 0 0 0\n"
                               "v 1 0 0\n"
                               "v 0 1 0\n"
                               "f 1 2 3\n");
  const auto mesh = load_mesh(path);
  REQUIRE(mesh.vertices.size() == 3);
  REQUIRE(mesh.triangles.size() == 1);
  CHECK(surface_area(mesh) == Approx(0.5));
}

TEST_CASE("load_mesh reads a cube OBJ and reports its box") {
  const auto cube = shtrack::testing::make_box_mesh({0.5, 1.0, 1.5});
  const auto path = temp_dir() / "cube.obj";
  save_obj(cube, path);

  const auto mesh = load_mesh(path);
  REQUIRE(mesh.vertices.size() == 8);
  REQUIRE(mesh.triangles.size() == 12);
  const auto box = bounding_box(mesh);
  CHECK((box.sizes() - Eigen::Vector3d(1.0, 2.0, 3.0)).norm() < 1e-12);
  CHECK(signed_volume(mesh) == Approx(6.0));
  CHECK(surface_area(mesh) == Approx(2 * (1 * 2 + 2 * 3 + 1 * 3)));
}

TEST_CASE("OBJ polygon faces are fan-triangulated and negative indices resolve") {
  const auto path = write_file("quad.obj",
                               "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                               "f 1 2 3 4\n"
                               "f -4 -3 -2\n");
  const auto mesh = load_mesh(path);
  REQUIRE(mesh.triangles.size() == 3);
}

TEST_CASE("OBJ face tokens with texture/normal slots parse") {
  const auto path = write_file("slash.obj",
                               "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
                               "f 1/1 2/2/2 3//3\n");
  CHECK(load_mesh(path).triangles.size() == 1);
}

TEST_CASE("load_mesh reports parse failures with line numbers") {
  const auto path = write_file("bad.obj", "v 0 0 0\nv 1 0\nf 1 2 3\n");
  try {
    load_mesh(path);
    FAIL("expected MeshParseError");
  } catch (const MeshParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  const auto oob = write_file("oob.obj", "v 0 0 0\nv 1 0 0\nf 1 2 7\n");
  CHECK_THROWS_AS(load_mesh(oob), MeshParseError);
  CHECK_THROWS_AS(load_mesh(temp_dir() / "missing.obj"), std::runtime_error);
  const auto stl = write_file("model.stl", "solid x\nendsolid x\n");
  CHECK_THROWS_WITH(load_mesh(stl), Catch::Matchers::ContainsSubstring("unsupported"));
}

TEST_CASE("load_mesh reads ASCII PLY with extra vertex properties") {
  const auto path = write_file("tri.ply",
                               "ply\n"
                               "format ascii 1.0\n"
                               "comment tiny\n"
                               "element vertex 4\n"
                               "property float x\n"
                               "property float y\n"
                               "property float z\n"
                               "property float quality\n"
                               "element face 2\n"
                               "property list uchar int vertex_indices\n"
                               "end_header\n"
                               "0 0 0 0.5\n"
                               "1 0 0 0.5\n"
                               "1 1 0 0.5\n"
                               "0 1 0 0.5\n"
                               "3 0 1 2\n"
                               "4 0 1 2 3\n");
  const auto mesh = load_mesh(path);
  REQUIRE(mesh.vertices.size() == 4);
  REQUIRE(mesh.triangles.size() == 3);  // one triangle + fan of the quad

  const auto binary = write_file("bin.ply", "ply\nformat binary_little_endian 1.0\nend_header\n");
  CHECK_THROWS_AS(load_mesh(binary), MeshParseError);
}

TEST_CASE("save then load round-trips vertex and triangle counts") {
  const auto mesh = shtrack::testing::make_teapot_like_mesh(24, 48);
  const auto path = temp_dir() / "roundtrip.obj";
  save_obj(mesh, path);
  const auto back = load_mesh(path);
  CHECK(back.vertices.size() == mesh.vertices.size());
  CHECK(back.triangles.size() == mesh.triangles.size());
  CHECK(signed_volume(back) == Approx(signed_volume(mesh)));
}

TEST_CASE("degenerate triangles are dropped on load") {
  const auto path = write_file("degenerate.obj",
                               "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\n"
                               "f 1 2 3\n"
                               "f 1 1 2\n"
                               "f 1 2 4\n");  // collinear
  const auto mesh = load_mesh(path);
  CHECK(mesh.triangles.size() == 1);
}

TEST_CASE("teapot-class mesh has the declared bounding box") {
  const auto mesh = shtrack::testing::make_teapot_like_mesh();
  const auto box = bounding_box(mesh);
  CHECK(box.sizes().x() == Approx(3.5).epsilon(1e-9));
  CHECK(box.sizes().y() == Approx(2.2).epsilon(1e-9));
  CHECK(box.sizes().z() == Approx(1.8).epsilon(1e-9));
  CHECK(signed_volume(mesh) > 0.0);
}

TEST_CASE("mesh_contains by ray parity") {
  const auto cube = shtrack::testing::make_box_mesh({1.0, 1.0, 1.0});
  CHECK(mesh_contains(cube, {0.0, 0.0, 0.0}));
  CHECK(mesh_contains(cube, {0.9, -0.9, 0.9}));
  CHECK_FALSE(mesh_contains(cube, {1.1, 0.0, 0.0}));
  CHECK_FALSE(mesh_contains(cube, {5.0, 5.0, 5.0}));

  const auto teapot = shtrack::testing::make_teapot_like_mesh(32, 64);
  CHECK(mesh_contains(teapot, {0.0, 0.0, 0.0}));
  CHECK_FALSE(mesh_contains(teapot, {0.0, 0.0, 2.0}));
}

TEST_CASE("sample_mesh_surface is area-weighted and deterministic") {
  const auto cube = shtrack::testing::make_box_mesh({0.5, 0.5, 0.5});
  std::mt19937_64 rng(123);
  const int n = 10000;
  const auto points = sample_mesh_surface(cube, n, rng);
  REQUIRE(points.size() == size_t(n));

  // per-face counts within 5 sigma of n/6
  std::array<int, 6> counts{};
  for (const auto& p : points) {
    const Eigen::Vector3d a = p.cwiseAbs();
    int axis = 0;
    a.maxCoeff(&axis);
    counts[axis * 2 + (p[axis] > 0 ? 0 : 1)]++;
    REQUIRE(a.maxCoeff() == Approx(0.5).margin(1e-12));
  }
  const double expected = n / 6.0;
  const double sigma = std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0));
  for (const int c : counts) CHECK(std::abs(c - expected) < 5 * sigma);

  std::mt19937_64 rng2(123);
  const auto again = sample_mesh_surface(cube, n, rng2);
  for (int i = 0; i < n; ++i) REQUIRE(points[i] == again[i]);

  CHECK_THROWS_AS(sample_mesh_surface(TriangleMesh{}, 10, rng), std::invalid_argument);
}
