#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "galaxy/galaxy_code.hpp"
#include "galaxy/geometry.hpp"
#include "galaxy/rng.hpp"

namespace galaxy {

struct DecoderParams {
  std::size_t n = 0;
  double sigma = 1.0;
  double eps_n = 0.0;           // shell half-width, units of sigma^2
  double slab_halfwidth = 0.0;  // sigma log2 n by default

  static DecoderParams defaults(std::size_t n, double sigma);
  static DecoderParams for_code(const GalaxyParams& params);

  // Squared-norm shell edges n(sigma^2 -/+ eps_n); the lower edge is clamped
  // at zero.
  double shell_lo() const;
  double shell_hi() const;

  void validate() const;
};

// y = u + sigma z, z i.i.d. N(0, 1) drawn from the stream.
Point transmit(const Point& u, double sigma, RandomStream& noise);
void transmit_into(std::span<const double> u, double sigma, RandomStream& noise,
                   std::span<double> y);

// n(sigma^2 - eps_n) <= ||y - u||^2 <= n(sigma^2 + eps_n)
bool in_shell(const Point& y, const Point& u, const DecoderParams& params);

// ||u - Proj_{ou}(y)||, computed as |<y - u, u - o>| / ||u - o||.
double slab_offset(const Point& y, const Point& o, const Point& u);

// slab_offset(y, o, u) <= slab_halfwidth
bool in_slab(const Point& y, const Point& o, const Point& u, const DecoderParams& params);

// Shell membership and every slab along the center path.
bool identify(const Point& y, const Codeword& c, const DecoderParams& params);

// The decoding set D_u of one codeword with its slab directions precomputed,
// for the simulation loops. Slab level i (1-based) tests against o_i.
class DecodingSet {
 public:
  DecodingSet(const Codeword& c, const DecoderParams& params);

  bool contains(std::span<const double> y) const;
  bool in_shell(std::span<const double> y) const;
  bool in_slab(std::span<const double> y, std::size_t level) const;
  std::size_t depth() const { return dirs_.size(); }

 private:
  std::vector<double> u_;
  // dirs_[i - 1]: unit vector along u - o_i.
  std::vector<std::vector<double>> dirs_;
  double shell_lo_ = 0.0;
  double shell_hi_ = 0.0;
  double halfwidth_ = 0.0;
};

}  // namespace galaxy
