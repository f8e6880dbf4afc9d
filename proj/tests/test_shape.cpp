#include <catch2/catch_amalgamated.hpp>

#include "shtrack/quadrature.hpp"
#include "shtrack/shape.hpp"
#include "support/test_shapes.hpp"
#include "support/test_util.hpp"

using namespace shtrack;
using Catch::Approx;

namespace {

ShCoefficients cuboid_fit(const Eigen::Vector3d& half, int degree) {
  return fit_coefficients(
      [&half](const SphericalDirection& d) { return cuboid_radial(half, d); }, degree,
      SphereQuadrature(128, 256));
}

}  // namespace

TEST_CASE("cuboid_radial basics") {
  const Eigen::Vector3d half(1.5, 0.5, 0.5);
  CHECK(cuboid_radial(half, {pi / 2, 0.0}) == Approx(1.5));
  CHECK(cuboid_radial({0.5, 0.5, 0.5}, direction_of({1, 1, 1})) == Approx(0.5 * std::sqrt(3.0)));
  CHECK(cuboid_radial(half, {0.0, 0.0}) == Approx(0.5));
  CHECK_THROWS_AS(cuboid_radial({1.0, 0.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("cuboid_radial endpoint lies on the box boundary") {
  std::mt19937_64 rng(5);
  const Eigen::Vector3d half(1.2, 0.7, 0.4);
  for (int i = 0; i < 2000; ++i) {
    const auto dir = testing::random_direction(rng);
    const Eigen::Vector3d p = spherical_to_cartesian(cuboid_radial(half, dir), dir);
    const Eigen::Vector3d slack = p.cwiseAbs() - half;
    REQUIRE(slack.maxCoeff() <= 1e-12);   // inside or on the boundary
    REQUIRE(slack.maxCoeff() >= -1e-12);  // touches some face
  }
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    v[axis] = 1.0;
    CHECK(cuboid_radial(half, direction_of(v)) == Approx(half[axis]));
  }
}

TEST_CASE("containment for spheres") {
  const auto ball = StarConvexShape::sphere(1.0);
  CHECK(ball.contains({0.5, 0.0, 0.0}));
  CHECK_FALSE(ball.contains({1.5, 0.0, 0.0}));
  CHECK(ball.contains({0.0, 0.0, 1.0}));

  const auto shifted = StarConvexShape::sphere(1.0, {5.0, 0.0, 0.0});
  CHECK(shifted.contains({5.5, 0.0, 0.0}));
  CHECK_FALSE(shifted.contains({0.0, 0.0, 0.0}));
}

TEST_CASE("series containment tracks the analytic cuboid") {
  const Eigen::Vector3d half(1.5, 0.5, 0.5);
  const auto shape = StarConvexShape::harmonics(cuboid_fit(half, 8));
  std::mt19937_64 rng(17);
  int hits = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto dir = testing::random_direction(rng);
    const Eigen::Vector3d p = spherical_to_cartesian(0.9 * cuboid_radial(half, dir), dir);
    if (shape.contains(p)) ++hits;
  }
  CHECK(hits >= trials * 95 / 100);
}

TEST_CASE("rotated and translated shapes transform containment") {
  const auto box = StarConvexShape::cuboid({1.5, 0.5, 0.5});
  CHECK(box.contains({1.4, 0.0, 0.0}));
  const auto turned = box.rotated(Rotation3::from_axis_angle({0, 0, 1}, pi / 2));
  CHECK_FALSE(turned.contains({1.4, 0.0, 0.0}));
  CHECK(turned.contains({0.0, 1.4, 0.0}));
  CHECK(turned.radial({pi / 2, pi / 2}) == Approx(1.5));

  const auto moved = box.translated({10.0, 0.0, 0.0});
  CHECK(moved.contains({11.4, 0.0, 0.0}));
  CHECK(moved.bounding_box().center().x() == Approx(10.0));
}

TEST_CASE("sample_surface on primitives") {
  std::mt19937_64 rng(29);

  SECTION("cube faces are hit uniformly") {
    const auto cube = StarConvexShape::cuboid({0.5, 0.5, 0.5});
    const int n = 10000;
    const auto points = cube.sample_surface(n, rng);
    std::array<int, 6> counts{};
    for (const auto& p : points) {
      const Eigen::Vector3d a = p.cwiseAbs();
      int axis = 0;
      a.maxCoeff(&axis);
      counts[axis * 2 + (p[axis] > 0 ? 0 : 1)]++;
      REQUIRE(a.maxCoeff() == Approx(0.5).margin(1e-12));
    }
    const double sigma = std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0));
    for (const int c : counts) CHECK(std::abs(c - n / 6.0) < 5 * sigma);
  }

  SECTION("sphere points sit at the radius") {
    const auto ball = StarConvexShape::sphere(2.5);
    for (const auto& p : ball.sample_surface(1000, rng)) {
      REQUIRE(p.norm() == Approx(2.5).margin(1e-12));
    }
  }

  SECTION("fixed seed reproduces the list") {
    const auto box = StarConvexShape::cuboid({1.5, 0.5, 0.5});
    std::mt19937_64 a(77), b(77);
    const auto first = box.sample_surface(500, a);
    const auto second = box.sample_surface(500, b);
    for (size_t i = 0; i < first.size(); ++i) REQUIRE(first[i] == second[i]);
  }
}

TEST_CASE("tessellate a sphere gives constant vertex radius") {
  const auto mesh = tessellate(ShCoefficients::sphere(1.3, 2), Eigen::Vector3d::Zero(), 16, 32);
  for (const auto& v : mesh.vertices) REQUIRE(v.norm() == Approx(1.3).margin(1e-12));
  // watertight: volume close to the sphere volume from a modest grid
  CHECK(signed_volume(mesh) == Approx(4.0 / 3.0 * pi * std::pow(1.3, 3)).epsilon(0.05));
}

TEST_CASE("tessellate minimal grid is a closed double fan") {
  const auto mesh = tessellate(ShCoefficients::sphere(1.0), Eigen::Vector3d::Zero(), 2, 3);
  CHECK(mesh.vertices.size() == 5);
  CHECK(mesh.triangles.size() == 6);
  CHECK(signed_volume(mesh) > 0.0);
  CHECK_THROWS_AS(tessellate(ShCoefficients::sphere(1.0), Eigen::Vector3d::Zero(), 1, 3),
                  std::invalid_argument);
}

TEST_CASE("tessellated cuboid fit has roughly the cuboid volume") {
  const auto mesh = tessellate(cuboid_fit({1.5, 0.5, 0.5}, 8), Eigen::Vector3d::Zero(), 96, 192);
  CHECK(signed_volume(mesh) == Approx(3.0).epsilon(0.10));
}

TEST_CASE("series radial bounds contain dense samples") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto coeffs = testing::random_coefficients(rng, 6, 0.3);
    coeffs.weights[0] += 2.0 * std::sqrt(4.0 * pi);
    const auto bounds = series_radial_bounds(coeffs);
    for (int i = 0; i < 3000; ++i) {
      const double v = eval_series(coeffs, testing::random_direction(rng));
      REQUIRE(v >= bounds.lower - 1e-12);
      REQUIRE(v <= bounds.upper + 1e-12);
    }
  }
}

TEST_CASE("series sampling uses the tessellated surface") {
  std::mt19937_64 rng(37);
  const auto coeffs = cuboid_fit({1.0, 1.0, 1.0}, 4);
  const auto shape = StarConvexShape::harmonics(coeffs, {1.0, 2.0, 3.0});
  const auto points = shape.sample_surface(200, rng);
  REQUIRE(points.size() == 200);
  const BasisEvaluator basis(4);
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - Eigen::Vector3d(1.0, 2.0, 3.0);
    const double r = eval_series(basis, coeffs, direction_of(q));
    // sampled from the dense tessellation, so radii sit near the series surface
    REQUIRE(q.norm() <= r * 1.01 + 1e-9);
  }
}

TEST_CASE("mesh shapes reject radial queries but support containment") {
  const auto teapot = StarConvexShape::mesh(shtrack::testing::make_teapot_like_mesh(24, 48));
  CHECK_THROWS_AS(teapot.radial({0.5, 0.5}), std::logic_error);
  CHECK(teapot.contains({0.0, 0.0, 0.0}));
  CHECK_FALSE(teapot.contains({10.0, 0.0, 0.0}));
  std::mt19937_64 rng(41);
  CHECK(teapot.sample_surface(50, rng).size() == 50);
}
