#include "galaxy/spherical_code.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "galaxy/rng.hpp"

namespace galaxy {

namespace {

void validate_theta(double theta) {
  if (!(theta > 0.0 && theta <= std::numbers::pi)) {
    throw InvalidParameter("theta must lie in (0, pi]");
  }
}

// Unit vector uniform on S^{n-1}.
std::vector<double> random_direction(std::size_t n, RandomStream& rng) {
  std::vector<double> v(n);
  double nn = 0.0;
  while (nn == 0.0) {
    rng.fill_normal(v);
    nn = dot(v, v);
  }
  const double inv = 1.0 / std::sqrt(nn);
  for (double& x : v) x *= inv;
  return v;
}

// Angular slack granted to exact constructions (antipodes, orthogonal draws)
// whose computed angle lands a few ulps short of the target.
constexpr double kAcceptSlack = 1e-12;

void remove_components(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(v, q);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
}

bool normalize(std::vector<double>& v) {
  const double nn = dot(v, v);
  if (!(nn > 1e-24)) return false;
  const double inv = 1.0 / std::sqrt(nn);
  for (double& x : v) x *= inv;
  return true;
}

void extend_basis(std::vector<std::vector<double>>& basis, std::vector<double> d) {
  if (basis.size() == d.size()) return;
  remove_components(d, basis);
  if (normalize(d)) basis.push_back(std::move(d));
}

// Candidate directions cycle through four proposals: a uniform draw, a
// uniform draw inside the orthogonal complement of the accepted span, the
// antipode of an accepted direction, and the antipode of the accepted
// centroid. The last three reach the exact witness configurations (antipodal
// pairs, cross-polytopes, simplices) that uniform draws hit with probability 0.
std::vector<double> propose(std::size_t n, const std::vector<std::vector<double>>& dirs,
                            const std::vector<std::vector<double>>& basis, std::size_t attempt,
                            RandomStream& rng) {
  std::vector<double> d = random_direction(n, rng);
  if (dirs.empty()) return d;
  switch (attempt % 4) {
    case 1:
      if (basis.size() < n) {
        remove_components(d, basis);
        if (!normalize(d)) d = random_direction(n, rng);
      }
      return d;
    case 2: {
      const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(dirs.size()));
      d = dirs[std::min(pick, dirs.size() - 1)];
      for (double& x : d) x = -x;
      return d;
    }
    case 3: {
      std::vector<double> c(n, 0.0);
      for (const auto& e : dirs) {
        for (std::size_t i = 0; i < n; ++i) c[i] -= e[i];
      }
      if (normalize(c)) return c;
      return d;
    }
    default:
      return d;
  }
}

// Vertices of a regular simplex with m <= n + 1 vertices in a random
// orientation: pairwise cosine -1/(m-1), the largest minimum angle m points
// can have. Built from the Helmert basis of the sum-zero subspace of R^m,
// mapped through random orthonormal q_1..q_{m-1}.
std::vector<std::vector<double>> random_simplex(std::size_t n, std::size_t m, RandomStream& rng) {
  std::vector<std::vector<double>> q;
  while (q.size() + 1 < m) extend_basis(q, random_direction(n, rng));
  const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(m - 1));
  std::vector<std::vector<double>> verts(m, std::vector<double>(n, 0.0));
  for (std::size_t j = 1; j < m; ++j) {
    const double h = 1.0 / std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i <= j; ++i) {
      const double c = scale * (i < j ? h : -static_cast<double>(j) * h);
      for (std::size_t a = 0; a < n; ++a) verts[i][a] += c * q[j - 1][a];
    }
  }
  for (auto& v : verts) normalize(v);
  return verts;
}

}  // namespace

SphericalCode generate_spherical_code(const SphericalCodeRequest& req) {
  validate_theta(req.theta);
  const std::size_t n = req.center.dim();
  if (n == 0) throw InvalidParameter("spherical code: center has no coordinates");
  if (!all_finite(req.center.coords())) throw InvalidParameter("spherical code: center not finite");
  if (!(req.radius > 0.0) || !std::isfinite(req.radius)) {
    throw InvalidParameter("spherical code: radius must be > 0");
  }
  if (req.target_m < 1) throw InvalidParameter("spherical code: target_m must be >= 1");
  if (req.max_attempts < 1) throw InvalidParameter("spherical code: max_attempts must be >= 1");

  RandomStream rng(req.seed);
  std::vector<std::vector<double>> dirs;
  std::vector<std::vector<double>> basis;  // orthonormal basis of span(dirs)
  std::size_t rejections = 0;
  std::size_t attempt = 0;
  // Obtuse angles leave almost no room for uniform draws, so the first
  // proposals are the vertices of a regular simplex when one fits.
  std::vector<std::vector<double>> seeds;
  if (req.theta > std::numbers::pi / 2 && req.target_m >= 2 && req.target_m <= n + 1) {
    seeds = random_simplex(n, req.target_m, rng);
  }
  std::size_t next_seed = 0;
  while (dirs.size() < req.target_m && rejections < req.max_attempts) {
    std::vector<double> d = next_seed < seeds.size() ? std::move(seeds[next_seed++])
                                                     : propose(n, dirs, basis, attempt++, rng);
    const bool ok = std::all_of(dirs.begin(), dirs.end(), [&](const std::vector<double>& e) {
      return std::acos(std::clamp(dot(d, e), -1.0, 1.0)) >= req.theta - kAcceptSlack;
    });
    if (ok) {
      extend_basis(basis, d);
      dirs.push_back(std::move(d));
      rejections = 0;
    } else {
      ++rejections;
    }
  }

  SphericalCode code;
  code.center = req.center;
  code.radius = req.radius;
  code.theta = req.theta;
  code.seed = req.seed;
  code.saturated = dirs.size() < req.target_m;
  code.points.reserve(dirs.size());
  for (const auto& d : dirs) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = req.center[i] + req.radius * d[i];
    code.points.push_back(std::move(p));
  }
  return code;
}

double csw_lower_bound(std::size_t n, double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) {
    throw InvalidParameter("csw bound: theta must lie in (0, pi)");
  }
  return std::pow(std::sin(theta), -static_cast<double>(n));
}

double csw_full_bound(std::size_t n, double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) {
    throw InvalidParameter("full csw bound needs 0 < theta < pi/2 (cos theta > 0)");
  }
  const double dn = static_cast<double>(n);
  const double s_n = std::pow(std::sin(theta), dn - 1.0) /
                     (std::sqrt(2.0 * std::numbers::pi * dn) * std::cos(theta));
  const double ratio = std::sin(theta) / (std::numbers::sqrt2 * std::sin(theta / 2.0));
  return dn / s_n * std::log2(ratio);
}

double min_pairwise_angle(const SphericalCode& code) {
  if (code.points.size() < 2) throw InvalidParameter("min_pairwise_angle needs >= 2 points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < code.points.size(); ++i) {
    for (std::size_t j = i + 1; j < code.points.size(); ++j) {
      best = std::min(best, angle_at(code.center, code.points[i], code.points[j]));
    }
  }
  return best;
}

}  // namespace galaxy
