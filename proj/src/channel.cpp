#include "galaxy/channel.hpp"

#include <algorithm>
#include <cmath>

#include "galaxy/gaussian_stats.hpp"

namespace galaxy {

DecoderParams DecoderParams::defaults(std::size_t n, double sigma) {
  DecoderParams p;
  p.n = n;
  p.sigma = sigma;
  p.eps_n = stats::default_eps(n);
  p.slab_halfwidth = sigma * std::log2(static_cast<double>(n));
  p.validate();
  return p;
}

DecoderParams DecoderParams::for_code(const GalaxyParams& params) {
  return defaults(params.n, params.sigma);
}

double DecoderParams::shell_lo() const {
  return std::max(0.0, static_cast<double>(n) * (sigma * sigma - eps_n));
}

double DecoderParams::shell_hi() const {
  return static_cast<double>(n) * (sigma * sigma + eps_n);
}

void DecoderParams::validate() const {
  if (n < 1) throw InvalidParameter("decoder: n must be >= 1");
  if (!(sigma > 0.0)) throw InvalidParameter("decoder: sigma must be > 0");
  if (!(eps_n > 0.0)) throw InvalidParameter("decoder: eps_n must be > 0");
  if (!(slab_halfwidth > 0.0)) throw InvalidParameter("decoder: slab half-width must be > 0");
}

void transmit_into(std::span<const double> u, double sigma, RandomStream& noise,
                   std::span<double> y) {
  if (!(sigma >= 0.0)) throw InvalidParameter("transmit: sigma must be >= 0");
  require_same_dim(u.size(), y.size());
  for (std::size_t i = 0; i < u.size(); ++i) y[i] = u[i] + sigma * noise.normal();
}

Point transmit(const Point& u, double sigma, RandomStream& noise) {
  if (!all_finite(u.coords())) throw InvalidParameter("transmit: codeword not finite");
  Point y(u.dim());
  transmit_into(u.coords(), sigma, noise, y.coords());
  return y;
}

bool in_shell(const Point& y, const Point& u, const DecoderParams& params) {
  require_same_dim(y.dim(), u.dim());
  const double d2 = squared_distance(y.coords(), u.coords());
  return params.shell_lo() <= d2 && d2 <= params.shell_hi();
}

double slab_offset(const Point& y, const Point& o, const Point& u) {
  require_same_dim(y.dim(), u.dim());
  require_same_dim(o.dim(), u.dim());
  const Vector dir = u - o;
  const double len = euclidean_norm(dir);
  if (len == 0.0) throw DegenerateGeometry("slab through coincident points");
  return std::abs(inner_product(y - u, dir)) / len;
}

bool in_slab(const Point& y, const Point& o, const Point& u, const DecoderParams& params) {
  return slab_offset(y, o, u) <= params.slab_halfwidth;
}

bool identify(const Point& y, const Codeword& c, const DecoderParams& params) {
  if (c.path.empty()) throw InvalidParameter("identify: codeword has no center path");
  for (std::size_t i = c.path.size(); i-- > 0;) {
    if (!in_slab(y, c.path[i], c.u, params)) return false;
  }
  return in_shell(y, c.u, params);
}

DecodingSet::DecodingSet(const Codeword& c, const DecoderParams& params)
    : u_(c.u.raw()),
      shell_lo_(params.shell_lo()),
      shell_hi_(params.shell_hi()),
      halfwidth_(params.slab_halfwidth) {
  if (c.path.empty()) throw InvalidParameter("decoding set: codeword has no center path");
  require_same_dim(c.u.dim(), params.n);
  dirs_.reserve(c.path.size());
  for (const Point& o : c.path) {
    Vector d = c.u - o;
    const double len = euclidean_norm(d);
    if (len == 0.0) throw DegenerateGeometry("decoding set: center coincides with codeword");
    std::vector<double> unit(d.raw());
    for (double& x : unit) x /= len;
    dirs_.push_back(std::move(unit));
  }
}

bool DecodingSet::in_shell(std::span<const double> y) const {
  const double d2 = squared_distance(y, u_);
  return shell_lo_ <= d2 && d2 <= shell_hi_;
}

bool DecodingSet::in_slab(std::span<const double> y, std::size_t level) const {
  const auto& d = dirs_.at(level - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += (y[i] - u_[i]) * d[i];
  return std::abs(s) <= halfwidth_;
}

bool DecodingSet::contains(std::span<const double> y) const {
  for (std::size_t level = dirs_.size(); level >= 1; --level) {
    if (!in_slab(y, level)) return false;
  }
  return in_shell(y);
}

}  // namespace galaxy
