#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "galaxy/geometry.hpp"

namespace galaxy {

// A finite point set on the sphere S(center, radius) in which no two points
// subtend an angle smaller than theta at the center.
struct SphericalCode {
  Point center;
  double radius = 0.0;
  double theta = 0.0;
  std::vector<Point> points;
  std::uint64_t seed = 0;
  // Generation stopped on consecutive rejections before reaching the target.
  bool saturated = false;

  std::size_t size() const { return points.size(); }
};

struct SphericalCodeRequest {
  Point center;
  double radius = 1.0;
  double theta = 0.0;
  std::size_t target_m = 1;
  std::size_t max_attempts = 10000;
  std::uint64_t seed = 0;
};

// Greedy rejection sampling: uniform directions (normalized Gaussian vectors)
// are accepted iff they keep every pairwise angle >= theta. Stops at
// target_m points or after max_attempts consecutive rejections, in which case
// the result is flagged saturated. For theta > pi/2 and target_m <= n + 1 the
// first candidates are the vertices of a randomly oriented regular simplex.
// Deterministic in the request.
SphericalCode generate_spherical_code(const SphericalCodeRequest& req);

// sin(theta)^{-n}, the lower bound on the maximal code size used for rates.
double csw_lower_bound(std::size_t n, double theta);

// n s_n^{-1}(theta) log2(sin theta / (sqrt 2 sin(theta/2))) with
// s_n(theta) = sin^{n-1}(theta) / (sqrt(2 pi n) cos theta), o(1) terms dropped.
// Requires 0 < theta < pi/2.
double csw_full_bound(std::size_t n, double theta);

// Exact O(m^2) minimum over pairs of the angle at the code's center.
double min_pairwise_angle(const SphericalCode& code);

}  // namespace galaxy
