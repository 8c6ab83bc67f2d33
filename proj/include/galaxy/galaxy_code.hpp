#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "galaxy/geometry.hpp"
#include "galaxy/spherical_code.hpp"

namespace galaxy {

// User-facing construction inputs. Anything left unset is derived by
// resolve_params().
struct GalaxyConfig {
  std::size_t n = 16;
  double power = 1.0;  // per-symbol budget P; codewords satisfy ||u||^2 <= nP
  double b = 0.0;      // leaf radius exponent, r = n^b
  std::uint32_t k = 16;
  double sigma = 1.0;
  std::uint64_t master_seed = 0;

  std::optional<double> theta;              // default theta_of_k(k)
  std::optional<std::size_t> m_per_level;   // default min(floor(csw bound), m_cap)
  std::size_t m_cap = 8;
  std::optional<std::size_t> t_bar;         // default depth_bar(n, b, k)

  // Raise the leaf radius to max(n^b, r_min_factor * sigma * log2 n) so the
  // slab separation holds at finite n.
  bool r_min_override = false;
  double r_min_factor = 2.0;

  std::size_t saturation_probes = 2000;  // consecutive rejections => saturated
  std::size_t max_centers = 64;          // hard cap on |roots|
  std::size_t max_attempts = 10000;      // per spherical code
};

// Fully resolved, validated parameters. Every field is fixed; the code file
// stores this record verbatim.
struct GalaxyParams {
  std::size_t n = 0;
  double power = 0.0;
  double b = 0.0;
  std::uint32_t k = 0;
  double theta = 0.0;
  std::size_t m_per_level = 0;
  double r = 0.0;  // effective leaf radius
  bool r_min_override = false;
  double r_min_factor = 2.0;
  std::size_t t_bar = 0;
  bool t_bar_override = false;
  double sigma = 1.0;
  std::uint64_t master_seed = 0;
  std::size_t saturation_probes = 0;
  std::size_t max_centers = 0;
  std::size_t max_attempts = 0;
  double center_spacing = 0.0;  // enforced minimum root distance

  // n^{b + 1/4}
  double galaxy_scale() const;
  // r (k^t_bar - 1) / (k - 1): farthest a codeword can sit from its root.
  double extent() const;
  // sqrt(nP) - extent(): radius of the ball the roots are drawn from.
  double packing_radius() const;

  void validate() const;
};

GalaxyParams resolve_params(const GalaxyConfig& cfg);

// 2 arcsin(2 / sqrt(k - 2)); requires k >= 7.
double theta_of_k(double k);

// ceil((1/4 - b) log2 n / log2 k), at least 1.
std::size_t depth_bar(std::size_t n, double b, double k);

enum class SeparationVariant { Strong, Weak };

// (sin(theta/2) - 1/(k-1))^2 - c/(k-1), c = 2 (Strong) or 1 (Weak). The
// condition holds iff this margin is positive.
double separation_margin(double k, double theta, SeparationVariant v = SeparationVariant::Strong);
bool separation_condition(double k, double theta,
                          SeparationVariant v = SeparationVariant::Strong);

// max(2 n^{b+1/4}, 2 extent + n^{b+1/4} / 2)
double required_center_spacing(std::size_t n, double b, double extent);

struct PackingRequest {
  std::size_t n = 0;
  double ball_radius = 0.0;  // sqrt(nP)
  double margin = 0.0;       // roots are drawn from radius ball_radius - margin
  double min_spacing = 0.0;
  double galaxy_scale = 0.0;  // n^{b+1/4}, for the feasibility check
  std::uint64_t seed = 0;
  std::size_t saturation_probes = 2000;
  std::size_t max_centers = 64;
};

struct Packing {
  std::vector<Point> centers;
  bool saturated = false;  // ended on saturation_probes consecutive rejections
  bool capped = false;     // ended on max_centers
};

// Greedy saturated packing of centers, uniform in the shrunken ball.
Packing pack_centers(const PackingRequest& req);
Packing pack_centers(const GalaxyParams& params);

// Node at depth d holds a spherical code of radius k^{d-1} r around its center;
// children[i] is the depth-(d-1) galaxy centered at code.points[i].
struct GalaxyNode {
  std::size_t depth = 0;
  SphericalCode code;
  std::vector<GalaxyNode> children;
};

struct GalaxyTree {
  Point root;
  std::size_t root_index = 0;
  GalaxyNode top;
  bool degraded = false;  // some level saturated below m_per_level

  std::size_t leaf_count() const;
};

struct Codeword {
  Point u;
  // path[i - 1] is the center o_i at depth i; path.back() is the root.
  std::vector<Point> path;
  std::size_t root_index = 0;
  std::size_t leaf_index = 0;  // position within its depth-1 code
  // Child indices from the top level down; branch.back() == leaf_index.
  std::vector<std::size_t> branch;
};

GalaxyTree build_galaxy(const Point& center, std::size_t root_index, const GalaxyParams& params);

struct GalaxyCode {
  GalaxyParams params;
  std::vector<Point> roots;
  std::vector<GalaxyTree> trees;
  std::vector<Codeword> codewords;
  bool centers_saturated = false;
  bool centers_capped = false;

  bool degraded() const;
  std::size_t size() const { return codewords.size(); }
};

// Flattened codewords of a tree, depth-first in child order.
std::vector<Codeword> flatten(const GalaxyTree& tree);

// Rebuild code.codewords from code.trees.
void reflatten(GalaxyCode& code);

GalaxyCode build_code(const GalaxyParams& params, std::size_t threads = 1);

struct DifferentGalaxies {
  bool operator==(const DifferentGalaxies&) const = default;
};
using MeetDepth = std::variant<std::size_t, DifferentGalaxies>;

// Smallest l >= 1 such that the depth-l ancestors of c1 and c2 coincide.
MeetDepth meet_depth(const Codeword& c1, const Codeword& c2);

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

// r (k^t - 2k^{t-1} + 1)/(k-1) <= ||u - o|| <= r (k^t - 1)/(k-1)
Bounds radial_bounds(double r, double k, std::size_t t);

// 2r (k^{t-1} sin(theta/2) - (k^{t-1} - 1)/(k-1))
double pair_distance_lower_bound(double r, double k, double theta, std::size_t t);

struct CountBounds {
  double lo = 0.0;
  double hi = 0.0;
  double log2_lo = 0.0;
  double log2_hi = 0.0;
};

// Volume bounds on a saturated packing: 2^{-n}(sqrt(nP)/n^{b+1/4})^n <= |M|
// <= ((sqrt(nP) + n^{b+1/4})/n^{b+1/4})^n. lo/hi overflow to inf for large n;
// the log2 fields do not.
CountBounds center_count_bounds(std::size_t n, double power, double b);

// Rate exponents R_1 of the two count bounds, |M| = 2^{n R_1 log2 n}.
Bounds center_rate_bounds(std::size_t n, double power, double b);

// (log2 sqrt(nP) - 1)/log2 n - (1/4 - b) log2(sin theta)/log2 k - (b + 1/4)
double rate_lower_bound(std::size_t n, double power, double b, double k, double theta);

// 3/8 + b (2/log2 k - 3/2) - 1/(2 log2 k)
double asymptotic_rate(double b, double k);
double asymptotic_rate_log2k(double b, double log2_k);

}  // namespace galaxy
