#include <doctest.h>

#include <cmath>
#include <numbers>

#include "galaxy/spherical_code.hpp"

using namespace galaxy;

namespace {

SphericalCodeRequest request(std::size_t n, double theta, std::size_t m, std::uint64_t seed,
                             std::size_t attempts = 10000) {
  SphericalCodeRequest r;
  r.center = Point(n, 0.0);
  r.radius = 1.0;
  r.theta = theta;
  r.target_m = m;
  r.max_attempts = attempts;
  r.seed = seed;
  return r;
}

// Independent re-check of the two code invariants.
void check_invariants(const SphericalCode& c) {
  for (const auto& p : c.points) {
    const double d = std::sqrt(squared_distance(p.coords(), c.center.coords()));
    CHECK(std::abs(d - c.radius) <= 1e-9 * c.radius);
  }
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    for (std::size_t j = i + 1; j < c.points.size(); ++j) {
      double num = 0, na = 0, nb = 0;
      for (std::size_t a = 0; a < c.center.dim(); ++a) {
        const double x = c.points[i][a] - c.center[a];
        const double y = c.points[j][a] - c.center[a];
        num += x * y;
        na += x * x;
        nb += y * y;
      }
      const double ang = std::acos(std::max(-1.0, std::min(1.0, num / std::sqrt(na * nb))));
      CHECK(ang >= c.theta - 1e-9);
    }
  }
}

}  // namespace

TEST_CASE("antipodal constraint in the plane") {
  const SphericalCode c = generate_spherical_code(request(2, std::numbers::pi, 5, 3));
  CHECK(c.size() == 2);
  CHECK(c.saturated);
  CHECK(min_pairwise_angle(c) == doctest::Approx(std::numbers::pi));
  check_invariants(c);
}

TEST_CASE("square in the plane") {
  const SphericalCode c = generate_spherical_code(request(2, std::numbers::pi / 2, 4, 11));
  CHECK(c.size() == 4);
  CHECK_FALSE(c.saturated);
  check_invariants(c);
  CHECK(min_pairwise_angle(c) >= std::numbers::pi / 2 - 1e-9);
}

TEST_CASE("pi/3 code in eight dimensions") {
  const SphericalCode c = generate_spherical_code(request(8, std::numbers::pi / 3, 16, 5));
  CHECK(c.size() <= 16);
  CHECK(c.size() >= 2);
  CHECK(c.saturated == (c.size() < 16));
  check_invariants(c);
}

TEST_CASE("obtuse angle reaches the regular simplex") {
  // theta_of_k(8) = acos(-1/3): four points only as an exact tetrahedron.
  const double theta = std::acos(-1.0 / 3.0);
  for (std::size_t n : {3, 8, 16}) {
    const SphericalCode c = generate_spherical_code(request(n, theta, 4, 100 + n));
    CHECK(c.size() == 4);
    check_invariants(c);
  }
  // In the plane at most three points fit.
  const SphericalCode flat = generate_spherical_code(request(2, theta, 4, 1, 2000));
  CHECK(flat.size() <= 3);
  CHECK(flat.saturated);
}

TEST_CASE("off-origin center and radius") {
  SphericalCodeRequest r = request(5, 1.0, 6, 9);
  r.center = Point{1, -2, 3, 0.5, 7};
  r.radius = 42.0;
  const SphericalCode c = generate_spherical_code(r);
  CHECK(c.size() == 6);
  check_invariants(c);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate_spherical_code(request(10, 1.2, 12, 77));
  const auto b = generate_spherical_code(request(10, 1.2, 12, 77));
  const auto c = generate_spherical_code(request(10, 1.2, 12, 78));
  CHECK(a.points == b.points);
  CHECK_FALSE(a.points == c.points);
}

TEST_CASE("invalid requests") {
  CHECK_THROWS_AS(generate_spherical_code(request(3, 0.0, 2, 1)), InvalidParameter);
  CHECK_THROWS_AS(generate_spherical_code(request(3, 3.5, 2, 1)), InvalidParameter);
  CHECK_THROWS_AS(generate_spherical_code(request(3, 1.0, 0, 1)), InvalidParameter);
  SphericalCodeRequest r = request(3, 1.0, 2, 1);
  r.radius = 0.0;
  CHECK_THROWS_AS(generate_spherical_code(r), InvalidParameter);
}

TEST_CASE("feasibility floor for the known witnesses") {
  for (std::size_t n = 2; n <= 16; ++n) {
    const auto orthoplex =
        generate_spherical_code(request(n, std::numbers::pi / 2, 2 * n, 500 + n, 100000));
    CHECK(orthoplex.size() >= 2 * n);
    check_invariants(orthoplex);
    const auto antipodal =
        generate_spherical_code(request(n, std::numbers::pi, 2, 900 + n, 100000));
    CHECK(antipodal.size() == 2);
  }
}

TEST_CASE("CSW bound") {
  CHECK(csw_lower_bound(10, std::numbers::pi / 3) == doctest::Approx(1024.0 / 243.0).epsilon(1e-12));
  CHECK(csw_lower_bound(10, std::numbers::pi / 3) == doctest::Approx(4.2140).epsilon(1e-4));
  CHECK(csw_lower_bound(1, std::numbers::pi / 3) == doctest::Approx(1.1547).epsilon(1e-4));
  CHECK(csw_lower_bound(50, std::numbers::pi / 2 - 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(csw_lower_bound(3, 0.0), InvalidParameter);
  CHECK_THROWS_AS(csw_lower_bound(3, std::numbers::pi), InvalidParameter);

  // Full expression with the o(1) terms dropped, evaluated independently.
  const double n = 20, t = 0.9;
  const double sn = std::pow(std::sin(t), n - 1) / (std::sqrt(2 * std::numbers::pi * n) * std::cos(t));
  const double expect = n / sn * std::log2(std::sin(t) / (std::sqrt(2.0) * std::sin(t / 2)));
  CHECK(csw_full_bound(20, t) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(csw_full_bound(20, std::numbers::pi / 2), InvalidParameter);
}

TEST_CASE("min pairwise angle") {
  SphericalCode c;
  c.center = Point{0, 0};
  c.radius = 1;
  c.points = {Point{1, 0}, Point{-1, 0}};
  CHECK(min_pairwise_angle(c) == doctest::Approx(std::numbers::pi));
  c.points = {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}};
  CHECK(min_pairwise_angle(c) == doctest::Approx(std::numbers::pi / 2));
  c.points = {Point{1, 0}};
  CHECK_THROWS_AS(min_pairwise_angle(c), InvalidParameter);
}
