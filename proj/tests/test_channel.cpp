#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "galaxy/channel.hpp"

using namespace galaxy;

namespace {

// A depth-2 codeword in R^n with hand-placed centers.
Codeword hand_codeword(std::size_t n) {
  Codeword c;
  Point root(n, 0.0);
  Point o1(n, 0.0);
  o1[0] = 40.0;
  Point u = o1;
  u[1] = 10.0;
  c.u = u;
  c.path = {o1, root};
  c.branch = {0, 0};
  return c;
}

Vector unit_along(const Point& from, const Point& to) {
  Vector d = to - from;
  return (1.0 / euclidean_norm(d)) * d;
}

}  // namespace

TEST_CASE("transmit") {
  RandomStream s(5);
  const Point u{1.5, -2, 3};
  CHECK(transmit(u, 0.0, s) == u);
  RandomStream a(77), b(77);
  CHECK(transmit(u, 1.0, a) == transmit(u, 1.0, b));
  CHECK_THROWS_AS(transmit(u, -1.0, s), InvalidParameter);
}

TEST_CASE("noise energy per dimension averages to sigma^2") {
  const std::size_t n = 100, trials = 100000;
  RandomStream s(2024);
  const Point u(n, 3.0);
  double sum = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Point y = transmit(u, 1.0, s);
    sum += squared_distance(y.coords(), u.coords()) / n;
  }
  const double se = std::sqrt(2.0 / n) / std::sqrt(static_cast<double>(trials));
  CHECK(std::abs(sum / trials - 1.0) <= 3 * se);
}

TEST_CASE("decoder parameters") {
  const DecoderParams p = DecoderParams::defaults(100, 1.0);
  CHECK(p.eps_n == doctest::Approx(std::log2(100.0) / 10));
  CHECK(p.slab_halfwidth == doctest::Approx(std::log2(100.0)));
  CHECK(p.shell_lo() == doctest::Approx(100 * (1 - p.eps_n)));
  CHECK(p.shell_hi() == doctest::Approx(100 * (1 + p.eps_n)));
  // eps_n >= sigma^2 at tiny n: lower edge clamps to zero.
  const DecoderParams small = DecoderParams::defaults(4, 1.0);
  CHECK(small.eps_n >= 1.0);
  CHECK(small.shell_lo() == 0.0);
  CHECK_THROWS_AS(DecoderParams::defaults(100, 0.0), InvalidParameter);
}

TEST_CASE("shell membership") {
  const std::size_t n = 100;
  const DecoderParams p = DecoderParams::defaults(n, 1.0);
  const Point u(n, 2.0);
  CHECK_FALSE(in_shell(u, u, p));
  Point y = u;
  y[7] += 10.0;  // squared distance exactly n sigma^2
  CHECK(in_shell(y, u, p));
  y[7] = u[7] + std::sqrt(p.shell_hi()) * 1.001;
  CHECK_FALSE(in_shell(y, u, p));
}

TEST_CASE("shell depends only on the distance to u") {
  const std::size_t n = 30;
  const DecoderParams p = DecoderParams::defaults(n, 1.0);
  RandomStream s(3);
  const Point u = transmit(Point(n, 0.0), 5.0, s);
  for (int rep = 0; rep < 200; ++rep) {
    const Point y = transmit(u, 1.0 + 0.01 * rep, s);
    // Householder reflection about a random unit vector, applied to y - u.
    const Vector h = unit_along(Point(n, 0.0), transmit(Point(n, 0.0), 1.0, s));
    const Vector w = y - u;
    const Vector rw = w - 2.0 * inner_product(w, h) * h;
    const Point y2 = u + rw;
    CHECK(in_shell(y, u, p) == in_shell(y2, u, p));
  }
}

TEST_CASE("slab membership") {
  const std::size_t n = 10;
  const DecoderParams p = DecoderParams::defaults(n, 1.0);
  const Point o(n, 0.0);
  Point u(n, 0.0);
  u[0] = 5.0;
  CHECK(in_slab(u, o, u, p));
  Point side = u;
  side[3] = 1e6;
  CHECK(in_slab(side, o, u, p));
  const Point along = u + 2.0 * p.slab_halfwidth * unit_along(o, u);
  CHECK_FALSE(in_slab(along, o, u, p));
  CHECK(slab_offset(along, o, u) == doctest::Approx(2.0 * p.slab_halfwidth));
  CHECK_THROWS_AS(in_slab(u, u, u, p), DegenerateGeometry);
}

TEST_CASE("identify") {
  const std::size_t n = 64;  // eps_n = 0.75 < sigma^2
  const DecoderParams p = DecoderParams::defaults(n, 1.0);
  const Codeword c = hand_codeword(n);
  // Noise of energy exactly n sigma^2 orthogonal to u - o_1 and u - o_2.
  Point y = c.u;
  y[5] = 8.0;
  CHECK(identify(y, c, p));
  CHECK_FALSE(identify(c.u, c, p));
  const Point far = c.u + 100.0 * unit_along(c.path[0], c.u);
  CHECK_FALSE(identify(far, c, p));

  const DecodingSet d(c, p);
  CHECK(d.depth() == 2);
  CHECK(d.contains(y.coords()));
  CHECK_FALSE(d.contains(far.coords()));

  // The precomputed set agrees with the direct conjunction.
  RandomStream s(8);
  for (int rep = 0; rep < 2000; ++rep) {
    const Point z = transmit(c.u, 1.0 + (rep % 7) * 0.3, s);
    bool direct = in_shell(z, c.u, p);
    for (const Point& o : c.path) direct = direct && in_slab(z, o, c.u, p);
    CHECK(identify(z, c, p) == direct);
    CHECK(d.contains(z.coords()) == direct);
  }

  Codeword broken = c;
  broken.path[0] = broken.u;
  CHECK_THROWS_AS(identify(c.u, broken, p), DegenerateGeometry);
  CHECK_THROWS_AS(DecodingSet(broken, p), DegenerateGeometry);
}

TEST_CASE("own-transmission shell and slab frequencies") {
  const std::size_t n = 100, trials = 1000000;
  const DecoderParams p = DecoderParams::defaults(n, 1.0);
  const Codeword c = hand_codeword(n);
  const DecodingSet d(c, p);
  RandomStream s(424242);
  std::vector<double> y(n);
  std::size_t shell = 0, slab = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    transmit_into(c.u.coords(), 1.0, s, y);
    shell += d.in_shell(y);
    slab += d.in_slab(y, 1);
  }
  const double lo = n - n * p.eps_n, hi = n + n * p.eps_n;
  const double shell_exact = boost::math::gamma_p(n / 2.0, hi / 2) - boost::math::gamma_p(n / 2.0, lo / 2);
  const double f = static_cast<double>(shell) / trials;
  CHECK(std::abs(f - shell_exact) <= 5 * std::sqrt(shell_exact * (1 - shell_exact) / trials) + 1e-6);

  const double slab_exact = 1 - boost::math::erfc(std::log2(100.0) / std::numbers::sqrt2);
  CHECK(std::abs(static_cast<double>(slab) / trials - slab_exact) <= 1e-5);
}
