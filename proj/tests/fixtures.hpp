#pragma once

#include <cmath>

#include "galaxy/galaxy_code.hpp"

namespace fixtures {

// n = 100, sigma = 1, k = 16, b = 0, leaf radius raised to 2 sigma log2 n,
// depth from the depth formula, four galaxies of eight codewords.
inline galaxy::GalaxyConfig standard_config(std::uint64_t seed = 1) {
  galaxy::GalaxyConfig c;
  c.n = 100;
  c.k = 16;
  c.b = 0.0;
  c.sigma = 1.0;
  c.power = 16.0;
  c.r_min_override = true;
  c.max_centers = 4;
  c.master_seed = seed;
  return c;
}

inline galaxy::GalaxyCode standard_code(std::uint64_t seed = 1) {
  return galaxy::build_code(galaxy::resolve_params(standard_config(seed)));
}

// Power budget with sqrt(nP) = extent + 1.5 * root spacing, enough for a
// handful of galaxies of the given depth.
inline double roomy_power(std::size_t n, double k, std::size_t depth, double r = 1.0) {
  const double extent = r * (std::pow(k, static_cast<double>(depth)) - 1.0) / (k - 1.0);
  const double spacing = galaxy::required_center_spacing(n, 0.0, extent);
  const double R = extent + 1.5 * spacing;
  return R * R / static_cast<double>(n);
}

inline galaxy::GalaxyConfig small_config(std::size_t n, std::uint32_t k, std::size_t depth,
                                         std::size_t m, std::size_t max_centers,
                                         std::uint64_t seed = 1) {
  galaxy::GalaxyConfig c;
  c.n = n;
  c.k = k;
  c.power = roomy_power(n, k, depth);
  c.t_bar = depth;
  c.m_per_level = m;
  c.max_centers = max_centers;
  c.master_seed = seed;
  return c;
}

inline galaxy::GalaxyCode small_code(std::size_t n, std::uint32_t k, std::size_t depth,
                                     std::size_t m, std::size_t max_centers,
                                     std::uint64_t seed = 1) {
  return galaxy::build_code(galaxy::resolve_params(small_config(n, k, depth, m, max_centers, seed)));
}

}  // namespace fixtures
