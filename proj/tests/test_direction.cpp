#include <catch2/catch_amalgamated.hpp>

#include "shtrack/direction.hpp"
#include "support/test_util.hpp"

using namespace shtrack;
using Catch::Approx;

TEST_CASE("cartesian_to_spherical on axis directions") {
  auto p = cartesian_to_spherical({0.0, 0.0, 2.0});
  CHECK(p.r == Approx(2.0));
  CHECK(p.dir.theta == Approx(0.0).margin(1e-15));
  CHECK(p.dir.phi == Approx(0.0).margin(1e-15));

  p = cartesian_to_spherical({1.0, 0.0, 0.0});
  CHECK(p.r == Approx(1.0));
  CHECK(p.dir.theta == Approx(pi / 2));
  CHECK(p.dir.phi == Approx(0.0).margin(1e-15));

  p = cartesian_to_spherical({1.0, 1.0, 1.0});
  CHECK(p.r == Approx(std::sqrt(3.0)));
  CHECK(p.dir.theta == Approx(std::acos(1.0 / std::sqrt(3.0))));
  CHECK(p.dir.phi == Approx(pi / 4));
}

TEST_CASE("cartesian_to_spherical conventions at degenerate inputs") {
  const auto zero = cartesian_to_spherical(Eigen::Vector3d::Zero());
  CHECK(zero.r == 0.0);
  CHECK(zero.dir.theta == 0.0);
  CHECK(zero.dir.phi == 0.0);

  // phi fixed to 0 on both poles
  CHECK(cartesian_to_spherical({0.0, 0.0, -3.0}).dir.phi == 0.0);
  CHECK(cartesian_to_spherical({0.0, 0.0, -3.0}).dir.theta == Approx(pi));
}

TEST_CASE("spherical_to_cartesian basics") {
  const Eigen::Vector3d y = spherical_to_cartesian(1.0, {pi / 2, pi / 2});
  CHECK(y.x() == Approx(0.0).margin(1e-15));
  CHECK(y.y() == Approx(1.0));
  CHECK(y.z() == Approx(0.0).margin(1e-15));

  CHECK(spherical_to_cartesian(0.0, {1.0, 2.0}).norm() == 0.0);

  const Eigen::Vector3d v = spherical_to_cartesian(2.0, {pi / 4, 0.0});
  CHECK(v.x() == Approx(std::sqrt(2.0)));
  CHECK(v.y() == Approx(0.0).margin(1e-15));
  CHECK(v.z() == Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(spherical_to_cartesian(-1.0, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("round-trip conversion over random vectors") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100000; ++i) {
    const Eigen::Vector3d v = testing::random_vector(rng, 10.0);
    const auto sp = cartesian_to_spherical(v);
    CHECK(sp.dir.theta >= 0.0);
    CHECK(sp.dir.theta <= pi);
    CHECK(sp.dir.phi >= 0.0);
    CHECK(sp.dir.phi < two_pi);
    const Eigen::Vector3d back = spherical_to_cartesian(sp.r, sp.dir);
    REQUIRE((back - v).norm() <= 1e-12 * v.norm());
  }
}

TEST_CASE("make_direction wraps phi and validates theta") {
  CHECK(make_direction(1.0, -pi / 2).phi == Approx(3 * pi / 2));
  CHECK(make_direction(1.0, two_pi + 0.25).phi == Approx(0.25));
  CHECK(make_direction(1.0, two_pi).phi == 0.0);
  CHECK_THROWS_AS(make_direction(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_direction(pi + 0.1, 0.0), std::invalid_argument);
}
