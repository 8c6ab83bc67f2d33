#include "galaxy/galaxy_code.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "galaxy/parallel.hpp"
#include "galaxy/rng.hpp"

namespace galaxy {

double theta_of_k(double k) {
  if (!(k >= 7.0)) throw InvalidParameter("k must be >= 7");
  return 2.0 * std::asin(2.0 / std::sqrt(k - 2.0));
}

std::size_t depth_bar(std::size_t n, double b, double k) {
  if (n < 2) throw InvalidParameter("depth_bar: n must be >= 2");
  if (!(b >= 0.0 && b < 0.25)) throw InvalidParameter("b must be < 1/4 (and >= 0)");
  if (!(k >= 2.0)) throw InvalidParameter("depth_bar: k must be >= 2");
  const double raw = (0.25 - b) * std::log2(static_cast<double>(n)) / std::log2(k);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw)));
}

double separation_margin(double k, double theta, SeparationVariant v) {
  if (!(k >= 2.0)) throw InvalidParameter("separation condition: k must be >= 2");
  const double inv = 1.0 / (k - 1.0);
  const double shifted = std::sin(theta / 2.0) - inv;
  const double c = v == SeparationVariant::Strong ? 2.0 : 1.0;
  return shifted * shifted - c * inv;
}

bool separation_condition(double k, double theta, SeparationVariant v) {
  // A square can exceed c/(k-1) only through the positive branch; for
  // sin(theta/2) <= 1/(k-1) the square is at most 1/(k-1)^2 < c/(k-1).
  if (std::sin(theta / 2.0) <= 1.0 / (k - 1.0)) return false;
  return separation_margin(k, theta, v) > 0.0;
}

double required_center_spacing(std::size_t n, double b, double extent) {
  const double scale = std::pow(static_cast<double>(n), b + 0.25);
  return std::max(2.0 * scale, 2.0 * extent + scale / 2.0);
}

double GalaxyParams::galaxy_scale() const { return std::pow(static_cast<double>(n), b + 0.25); }

double GalaxyParams::extent() const {
  return radial_bounds(r, static_cast<double>(k), t_bar).hi;
}

double GalaxyParams::packing_radius() const {
  return std::sqrt(static_cast<double>(n) * power) - extent();
}

void GalaxyParams::validate() const {
  if (n < 2) throw InvalidParameter("n must be >= 2");
  if (!(power > 0.0) || !std::isfinite(power)) throw InvalidParameter("power must be > 0");
  if (!(b >= 0.0 && b < 0.25)) throw InvalidParameter("b must be < 1/4 (and >= 0)");
  if (k < 7) throw InvalidParameter("k must be >= 7");
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw InvalidParameter("theta must lie in (0, pi)");
  if (!separation_condition(k, theta)) {
    throw InvalidParameter("separation condition (sin(theta/2) - 1/(k-1))^2 > 2/(k-1) fails");
  }
  if (m_per_level < 1) throw InvalidParameter("m must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("leaf radius must be > 0");
  if (t_bar < 1) throw InvalidParameter("depth must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be > 0");
  if (saturation_probes < 1) throw InvalidParameter("saturation probes must be >= 1");
  if (max_centers < 1) throw InvalidParameter("max centers must be >= 1");
  if (max_attempts < 1) throw InvalidParameter("max attempts must be >= 1");
  if (!(center_spacing > 0.0)) throw InvalidParameter("center spacing must be > 0");
  const double ball = std::sqrt(static_cast<double>(n) * power);
  if (!(ball > 2.0 * galaxy_scale())) {
    throw InvalidParameter("power budget too small: sqrt(nP) must exceed 2 n^(b+1/4)");
  }
  if (!(packing_radius() > 0.0)) {
    throw InvalidParameter("power budget too small for galaxy extent");
  }
}

GalaxyParams resolve_params(const GalaxyConfig& cfg) {
  if (cfg.k < 7) throw InvalidParameter("k must be >= 7");
  if (!(cfg.b >= 0.0 && cfg.b < 0.25)) throw InvalidParameter("b must be < 1/4 (and >= 0)");
  if (cfg.n < 2) throw InvalidParameter("n must be >= 2");
  GalaxyParams p;
  p.n = cfg.n;
  p.power = cfg.power;
  p.b = cfg.b;
  p.k = cfg.k;
  p.sigma = cfg.sigma;
  p.master_seed = cfg.master_seed;
  p.theta = cfg.theta.value_or(theta_of_k(cfg.k));
  if (cfg.m_per_level) {
    p.m_per_level = *cfg.m_per_level;
  } else {
    const double csw = csw_lower_bound(cfg.n, p.theta);
    const double capped = std::min(std::floor(csw), static_cast<double>(cfg.m_cap));
    p.m_per_level = static_cast<std::size_t>(std::max(1.0, capped));
  }
  const double dn = static_cast<double>(cfg.n);
  p.r = std::pow(dn, cfg.b);
  p.r_min_override = cfg.r_min_override;
  p.r_min_factor = cfg.r_min_factor;
  if (cfg.r_min_override) p.r = std::max(p.r, cfg.r_min_factor * cfg.sigma * std::log2(dn));
  p.t_bar_override = cfg.t_bar.has_value();
  p.t_bar = cfg.t_bar.value_or(depth_bar(cfg.n, cfg.b, cfg.k));
  p.saturation_probes = cfg.saturation_probes;
  p.max_centers = cfg.max_centers;
  p.max_attempts = cfg.max_attempts;
  p.center_spacing = required_center_spacing(cfg.n, cfg.b, p.extent());
  p.validate();
  return p;
}

Packing pack_centers(const PackingRequest& req) {
  if (req.n < 1) throw InvalidParameter("pack_centers: n must be >= 1");
  if (!(req.ball_radius > 2.0 * req.galaxy_scale)) {
    throw InvalidParameter("power budget too small: sqrt(nP) must exceed 2 n^(b+1/4)");
  }
  const double radius = req.ball_radius - req.margin;
  if (!(radius > 0.0)) throw InvalidParameter("power budget too small for galaxy extent");
  if (req.max_centers < 1) throw InvalidParameter("pack_centers: max_centers must be >= 1");

  RandomStream rng(req.seed);
  const double spacing2 = req.min_spacing * req.min_spacing;
  const double inv_n = 1.0 / static_cast<double>(req.n);
  Packing out;
  std::vector<double> g(req.n);
  std::size_t rejections = 0;
  while (out.centers.size() < req.max_centers && rejections < req.saturation_probes) {
    double nn = 0.0;
    while (nn == 0.0) {
      rng.fill_normal(g);
      nn = dot(g, g);
    }
    // Uniform in the ball: uniform direction, radius R U^{1/n}.
    const double scale = radius * std::pow(rng.uniform(), inv_n) / std::sqrt(nn);
    Point c(req.n);
    for (std::size_t i = 0; i < req.n; ++i) c[i] = scale * g[i];
    const bool ok = std::all_of(out.centers.begin(), out.centers.end(), [&](const Point& o) {
      return squared_distance(o.coords(), c.coords()) >= spacing2;
    });
    if (ok) {
      out.centers.push_back(std::move(c));
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  out.capped = out.centers.size() >= req.max_centers;
  out.saturated = !out.capped;
  return out;
}

Packing pack_centers(const GalaxyParams& params) {
  PackingRequest req;
  req.n = params.n;
  req.ball_radius = std::sqrt(static_cast<double>(params.n) * params.power);
  req.margin = params.extent();
  req.min_spacing = params.center_spacing;
  req.galaxy_scale = params.galaxy_scale();
  req.seed = derive_seed(params.master_seed, {static_cast<std::uint64_t>(StreamDomain::Centers)});
  req.saturation_probes = params.saturation_probes;
  req.max_centers = params.max_centers;
  return pack_centers(req);
}

namespace {

GalaxyNode build_node(const Point& center, std::size_t depth, std::vector<std::uint64_t>& path,
                      const GalaxyParams& params, bool& degraded) {
  GalaxyNode node;
  node.depth = depth;
  SphericalCodeRequest req;
  req.center = center;
  req.radius = std::pow(static_cast<double>(params.k), static_cast<double>(depth - 1)) * params.r;
  req.theta = params.theta;
  req.target_m = params.m_per_level;
  req.max_attempts = params.max_attempts;
  req.seed = derive_seed(params.master_seed, path);
  node.code = generate_spherical_code(req);
  if (node.code.saturated) degraded = true;
  if (depth > 1) {
    node.children.reserve(node.code.size());
    for (std::size_t i = 0; i < node.code.size(); ++i) {
      path.push_back(i);
      node.children.push_back(build_node(node.code.points[i], depth - 1, path, params, degraded));
      path.pop_back();
    }
  }
  return node;
}

std::size_t count_leaves(const GalaxyNode& node) {
  if (node.children.empty()) return node.code.size();
  std::size_t total = 0;
  for (const auto& c : node.children) total += count_leaves(c);
  return total;
}

void collect(const GalaxyNode& node, std::vector<Point>& ancestors,
             std::vector<std::size_t>& branch, std::size_t root_index,
             std::vector<Codeword>& out) {
  // ancestors holds centers from the root down to this node's center.
  if (node.depth == 1) {
    for (std::size_t i = 0; i < node.code.size(); ++i) {
      Codeword cw;
      cw.u = node.code.points[i];
      cw.path.assign(ancestors.rbegin(), ancestors.rend());
      cw.root_index = root_index;
      cw.leaf_index = i;
      cw.branch = branch;
      cw.branch.push_back(i);
      out.push_back(std::move(cw));
    }
    return;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    ancestors.push_back(node.code.points[i]);
    branch.push_back(i);
    collect(node.children[i], ancestors, branch, root_index, out);
    branch.pop_back();
    ancestors.pop_back();
  }
}

}  // namespace

std::size_t GalaxyTree::leaf_count() const { return count_leaves(top); }

GalaxyTree build_galaxy(const Point& center, std::size_t root_index, const GalaxyParams& params) {
  params.validate();
  require_same_dim(center.dim(), params.n);
  GalaxyTree tree;
  tree.root = center;
  tree.root_index = root_index;
  std::vector<std::uint64_t> path{static_cast<std::uint64_t>(StreamDomain::Galaxy), root_index};
  tree.top = build_node(center, params.t_bar, path, params, tree.degraded);
  return tree;
}

std::vector<Codeword> flatten(const GalaxyTree& tree) {
  std::vector<Codeword> out;
  std::vector<Point> ancestors{tree.root};
  std::vector<std::size_t> branch;
  collect(tree.top, ancestors, branch, tree.root_index, out);
  return out;
}

void reflatten(GalaxyCode& code) {
  code.codewords.clear();
  for (const auto& t : code.trees) {
    auto cws = flatten(t);
    code.codewords.insert(code.codewords.end(), std::make_move_iterator(cws.begin()),
                          std::make_move_iterator(cws.end()));
  }
}

bool GalaxyCode::degraded() const {
  return std::any_of(trees.begin(), trees.end(), [](const GalaxyTree& t) { return t.degraded; });
}

GalaxyCode build_code(const GalaxyParams& params, std::size_t threads) {
  params.validate();
  GalaxyCode code;
  code.params = params;
  Packing packing = pack_centers(params);
  code.roots = std::move(packing.centers);
  code.centers_saturated = packing.saturated;
  code.centers_capped = packing.capped;
  code.trees.resize(code.roots.size());
  parallel_for(code.roots.size(), threads,
               [&](std::size_t i) { code.trees[i] = build_galaxy(code.roots[i], i, params); });
  reflatten(code);
  return code;
}

MeetDepth meet_depth(const Codeword& c1, const Codeword& c2) {
  if (c1.root_index != c2.root_index) return DifferentGalaxies{};
  if (c1.branch.size() != c2.branch.size() || c1.branch.empty()) {
    throw InvalidParameter("meet_depth: codewords from trees of different depth");
  }
  const std::size_t depth = c1.branch.size();
  for (std::size_t j = 0; j < depth; ++j) {
    if (c1.branch[j] != c2.branch[j]) return depth - j;
  }
  throw InvalidParameter("meet_depth: identical codewords");
}

Bounds radial_bounds(double r, double k, std::size_t t) {
  if (!(k >= 2.0)) throw InvalidParameter("radial_bounds: k must be >= 2");
  if (t < 1) throw InvalidParameter("radial_bounds: t must be >= 1");
  const double kt = std::pow(k, static_cast<double>(t));
  const double kt1 = std::pow(k, static_cast<double>(t - 1));
  return {r * (kt - 2.0 * kt1 + 1.0) / (k - 1.0), r * (kt - 1.0) / (k - 1.0)};
}

double pair_distance_lower_bound(double r, double k, double theta, std::size_t t) {
  if (t < 1) throw InvalidParameter("pair_distance_lower_bound: t must be >= 1");
  const double kt1 = std::pow(k, static_cast<double>(t - 1));
  return 2.0 * r * (kt1 * std::sin(theta / 2.0) - (kt1 - 1.0) / (k - 1.0));
}

CountBounds center_count_bounds(std::size_t n, double power, double b) {
  if (!(power > 0.0)) throw InvalidParameter("power must be > 0");
  const double dn = static_cast<double>(n);
  const double scale = std::pow(dn, b + 0.25);
  const double ball = std::sqrt(dn * power);
  CountBounds out;
  out.log2_hi = dn * std::log2((ball + scale) / scale);
  out.log2_lo = -dn + dn * std::log2(ball / scale);
  out.hi = std::exp2(out.log2_hi);
  out.lo = std::exp2(out.log2_lo);
  return out;
}

Bounds center_rate_bounds(std::size_t n, double power, double b) {
  if (n < 2) throw InvalidParameter("center_rate_bounds: n must be >= 2");
  const double dn = static_cast<double>(n);
  const double ln = std::log2(dn);
  const double ball = std::sqrt(dn * power);
  const double scale = std::pow(dn, b + 0.25);
  return {(std::log2(ball) - 1.0) / ln - (b + 0.25), std::log2(ball + scale) / ln - (b + 0.25)};
}

double rate_lower_bound(std::size_t n, double power, double b, double k, double theta) {
  if (n < 2) throw InvalidParameter("rate_lower_bound: n must be >= 2");
  if (!(power > 0.0)) throw InvalidParameter("power must be > 0");
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw InvalidParameter("theta must lie in (0, pi)");
  const double dn = static_cast<double>(n);
  const double ln = std::log2(dn);
  return (std::log2(std::sqrt(dn * power)) - 1.0) / ln -
         (0.25 - b) * std::log2(std::sin(theta)) / std::log2(k) - (b + 0.25);
}

double asymptotic_rate_log2k(double b, double log2_k) {
  if (!(b >= 0.0 && b < 0.25)) throw InvalidParameter("b must be < 1/4 (and >= 0)");
  if (!(log2_k >= std::log2(7.0))) throw InvalidParameter("k must be >= 7");
  return 0.375 + b * (2.0 / log2_k - 1.5) - 1.0 / (2.0 * log2_k);
}

double asymptotic_rate(double b, double k) {
  if (!(k >= 7.0)) throw InvalidParameter("k must be >= 7");
  return asymptotic_rate_log2k(b, std::log2(k));
}

}  // namespace galaxy
