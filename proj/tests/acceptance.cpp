// One PASS/FAIL line per acceptance criterion, with measured values, the
// pinned tolerance and the runtime against its limit. Exits 1 on any FAIL.

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>

#include "fixtures.hpp"
#include "galaxy/channel.hpp"
#include "galaxy/cli.hpp"
#include "galaxy/experiments.hpp"
#include "galaxy/gaussian_stats.hpp"
#include "galaxy/rng.hpp"

using namespace galaxy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Oracle: Phi(-x) from Boost.
double phi_minus(double x) { return 0.5 * boost::math::erfc(x / std::numbers::sqrt2); }

// Oracle: exact chi^2(n) mass of the squared-norm shell [n(s2 - eps), n(s2 + eps)] / s2.
double shell_exact(double n, double sigma, double eps) {
  const double s2 = sigma * sigma;
  const double lo = std::max(0.0, n * (s2 - eps) / s2), hi = n * (s2 + eps) / s2;
  return boost::math::gamma_p(n / 2, hi / 2) - boost::math::gamma_p(n / 2, lo / 2);
}

Outcome structural_suite() {
  std::size_t codes = 0, largest = 0, violations = 0, failed_build = 0;
  for (std::size_t n : {8, 16}) {
    for (std::uint32_t k : {8u, 16u}) {
      for (std::size_t depth = 1; depth <= 3; ++depth) {
        // 4^depth codewords per galaxy; at most 4096 in total.
        const std::size_t per = static_cast<std::size_t>(std::pow(4.0, static_cast<double>(depth)));
        const GalaxyCode code = fixtures::small_code(n, k, depth, 4, 4096 / per, 1000 + n + k + depth);
        if (code.degraded()) ++failed_build;
        const StructureReport rep = verify_structure(code, 1e-6);
        violations += rep.cond1.total + rep.cond2.total + rep.cross_galaxy.total + rep.angle.total +
                      rep.radius.total + rep.power.total;
        largest = std::max(largest, code.size());
        ++codes;
      }
    }
  }
  return {violations == 0 && failed_build == 0 && largest <= 4096,
          std::to_string(codes) + " codes, largest N=" + std::to_string(largest) +
              ", violations=" + std::to_string(violations) + ", degraded=" +
              std::to_string(failed_build) + " (tol 1e-6 abs)"};
}

Outcome projection_law() {
  const std::size_t n = 50, trials = 1000000;
  RandomStream s(derive_seed(2, {static_cast<std::uint64_t>(StreamDomain::Empirical)}));
  std::vector<double> dir(n), z(n);
  s.fill_normal(dir);
  const double norm = std::sqrt(dot(dir, dir));
  for (double& x : dir) x /= norm;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    s.fill_normal(z);
    hits += std::abs(dot(z, dir)) >= 2.0;
  }
  const double f = static_cast<double>(hits) / trials;
  const double oracle = boost::math::erfc(2.0 / std::numbers::sqrt2);
  const double lib = stats::projection_tail(2.0);
  const bool pass = std::abs(f - oracle) <= 0.0015 && std::abs(lib - oracle) <= 1e-15;
  return {pass, "empirical " + fmt("%.5f", f) + " vs 2Phi(-2) " + fmt("%.5f", oracle) +
                    " (tol 0.0015), library " + fmt("%.17g", lib)};
}

Outcome shell_concentration() {
  const std::size_t n = 100, trials = 1000000;
  const stats::ShellSpec spec = stats::ShellSpec::with_default_eps(n, 1.0);
  const double exact = shell_exact(n, 1.0, spec.eps_n);
  const double lib_exact = stats::shell_prob_same(spec, stats::ShellMethod::Exact);
  const double approx = stats::shell_prob_same(spec, stats::ShellMethod::NormalApprox);
  const double approx_oracle = 1 - 2 * phi_minus(std::sqrt(100.0) * spec.eps_n / std::numbers::sqrt2);
  RandomStream s(derive_seed(3, {static_cast<std::uint64_t>(StreamDomain::Empirical)}));
  std::vector<double> z(n);
  const double lo = n * (1 - spec.eps_n), hi = n * (1 + spec.eps_n);
  std::uint64_t in = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    s.fill_normal(z);
    const double e = dot(z, z);
    in += e >= lo && e <= hi;
  }
  const Interval w = wilson_interval(in, trials, 0.99);
  const double gap = approx - exact;
  const bool pass = w.lo <= exact && exact <= w.hi && std::abs(gap) <= 1e-4 &&
                    std::abs(lib_exact - exact) <= 1e-12 && std::abs(approx - approx_oracle) <= 1e-12;
  return {pass, "freq " + fmt("%.7f", static_cast<double>(in) / trials) + " 99% Wilson [" +
                    fmt("%.7f", w.lo) + ", " + fmt("%.7f", w.hi) + "] exact " + fmt("%.7f", exact) +
                    ", normal approx " + fmt("%.7f", approx) + ", gap " + fmt("%.3e", gap) +
                    " (tol 1e-4)"};
}

Outcome mills_dominance() {
  std::size_t points = 0, bad = 0;
  double worst_ratio = 0;
  for (std::size_t n = 16; n <= 4096; ++n) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const stats::ShellSpec spec{n, sigma, stats::default_eps(n)};
      const double s2 = sigma * sigma, eps = spec.eps_n, nn = static_cast<double>(n);
      const double tail = phi_minus(std::sqrt(nn) * eps / (std::numbers::sqrt2 * s2));
      const double bound = 2 * s2 / (std::sqrt(nn * std::numbers::pi) * eps) * std::exp(-nn * eps * eps / (4 * s2 * s2));
      const double lib = stats::mills_bound(spec);
      if (!(tail < bound) || std::abs(lib - bound) > 1e-12 * bound) ++bad;
      worst_ratio = std::max(worst_ratio, tail / bound);
      ++points;
    }
  }
  return {bad == 0, std::to_string(points) + " grid points, strict failures " + std::to_string(bad) +
                        ", max Phi/bound " + fmt("%.4f", worst_ratio)};
}

const GalaxyCode& standard() {
  static const GalaxyCode code = fixtures::standard_code();
  return code;
}

Outcome type1_end_to_end() {
  const GalaxyCode& code = standard();
  const DecoderParams dec = DecoderParams::for_code(code.params);
  EstimateOptions opts;
  opts.threads = workers();
  const ErrorEstimate e = estimate_type1(code, dec, 100000, 5, opts);
  const double tbar = static_cast<double>(code.params.t_bar);
  const double bound = (1 - shell_exact(100, 1.0, std::log2(100.0) / 10)) + 2 * tbar * phi_minus(std::log2(100.0));
  const double se = std::sqrt(bound * (1 - bound) / static_cast<double>(e.trials));
  const bool pass = e.p_hat <= bound + 3 * se && std::abs(e.analytic_bound - bound) <= 1e-12;
  return {pass, "N=" + std::to_string(code.size()) + " t_bar=" + std::to_string(code.params.t_bar) +
                    " hits " + std::to_string(e.hits) + "/" + std::to_string(e.trials) + " p_hat " +
                    fmt("%.3e", e.p_hat) + " <= bound " + fmt("%.3e", bound) + " + 3SE " + fmt("%.3e", 3 * se)};
}

Outcome type2_cross() {
  const GalaxyCode& code = standard();
  PairStrategy s;
  s.mode = PairMode::CrossGalaxy;
  s.min_distance = std::pow(100.0, 0.25) * std::log2(100.0);
  EstimateOptions opts;
  opts.threads = workers();
  const ErrorEstimate e = estimate_type2(code, s, DecoderParams::for_code(code.params), 100000, 6, opts);
  // Bound at the threshold distance itself, against an erfc oracle.
  const double d = s.min_distance, eps = std::log2(100.0) / 10;
  const double at_threshold = stats::shell_prob_cross(stats::ShellSpec{100, 1.0, eps}, d);
  const double oracle = phi_minus((d * d - 100 * eps) / std::sqrt(200 + 4 * d * d));
  const bool formula_ok = std::abs(at_threshold - oracle) <= 1e-12 * oracle;
  return {e.hits == 0 && e.pairs > 0 && formula_ok,
          std::to_string(e.pairs) + " pairs at >= " + fmt("%.4f", d) + ", hits " +
              std::to_string(e.hits) + "/" + std::to_string(e.trials) + ", bound at threshold " +
              fmt("%.2e", at_threshold) + ", at closest pair " + fmt("%.2e", e.analytic_bound) +
              ", rule of three " + fmt("%.1e", e.rule_of_three)};
}

Outcome slab_rejection() {
  const GalaxyCode& code = standard();
  const DecoderParams dec = DecoderParams::for_code(code.params);
  PairStrategy s;
  s.mode = PairMode::SamePlanet;
  s.require_premise = true;
  // Re-check the premise of every selected pair before the run.
  std::size_t premise_bad = 0;
  const auto pairs = select_pairs(code, s, dec, 7);
  for (const auto& p : pairs) {
    const auto& c1 = code.codewords[p.first];
    const auto& c2 = code.codewords[p.second];
    const std::size_t t = std::get<std::size_t>(p.meet);
    const Point& o = c1.path[t - 1];
    const Vector a = c1.u - o;
    const double offset = inner_product(a, c1.u - c2.u) / euclidean_norm(a);
    if (offset < 2 * dec.slab_halfwidth * (1 - 1e-12)) ++premise_bad;
  }
  EstimateOptions opts;
  opts.threads = workers();
  const ErrorEstimate e = estimate_type2(code, s, dec, 1000000, 7, opts);
  const double bound = 2 * phi_minus(std::log2(100.0));
  return {!pairs.empty() && premise_bad == 0 && e.slab_hits == 0,
          std::to_string(pairs.size()) + " premise pairs (" + std::to_string(premise_bad) +
              " failing recheck), slab hits " + std::to_string(e.slab_hits) + "/" +
              std::to_string(e.trials) + ", bound " + fmt("%.2e", bound)};
}

Outcome rate_formulas() {
  bool ok = true;
  std::string note;
  double prev = -1;
  for (int a = 3; a <= 20; ++a) {
    const double v = asymptotic_rate(0, std::ldexp(1.0, a));
    ok = ok && v > prev;
    prev = v;
  }
  const double r16 = asymptotic_rate(0, 16), r20 = asymptotic_rate(0, std::ldexp(1.0, 20));
  const double r1000 = asymptotic_rate_log2k(0, 1000);
  const double lb = rate_lower_bound(1u << 16, 1, 0, 256, theta_of_k(256));
  const CountBounds cb = center_count_bounds(4, 1, 0);
  ok = ok && std::abs(r16 - 0.25) <= 1e-12 && std::abs(r20 - 0.35) <= 1e-12;
  ok = ok && std::abs(r1000 - 0.375) <= 1e-3 && std::abs(lb - 0.2502) <= 1e-3;
  ok = ok && std::abs(cb.lo - 0.25) <= 1e-12 && std::abs(cb.hi - 33.97) <= 0.01;
  double worst_sin = 0;
  for (int k = 7; k <= 10000; ++k) {
    const double kk = k;
    worst_sin = std::max(worst_sin, std::abs(std::sin(theta_of_k(kk)) - 4 * std::sqrt(kk - 6) / (kk - 2)));
  }
  ok = ok && worst_sin <= 1e-12;
  note = "R(16)=" + fmt("%.15g", r16) + " R(2^20)=" + fmt("%.15g", r20) + " R(2^1000)=" +
         fmt("%.6f", r1000) + " lower bound " + fmt("%.5f", lb) + " count (" + fmt("%.4g", cb.lo) +
         ", " + fmt("%.4f", cb.hi) + ") sin err " + fmt("%.1e", worst_sin);
  return {ok, note};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string cli(const std::vector<std::string>& args, int& status) {
  std::ostringstream out, err;
  status = run_cli(args, out, err);
  return out.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("galaxy_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::string> build{"build", "--n", "100", "--k", "16", "--b", "0", "--power", "16",
                                       "--r-min", "--max-centers", "4", "--seed", "9"};
  auto b1 = build, b2 = build;
  b1.insert(b1.end(), {"--out", (dir / "a.json").string()});
  b2.insert(b2.end(), {"--out", (dir / "b.json").string(), "--threads", "4"});
  int s1 = 0, s2 = 0;
  std::string o1 = cli(b1, s1), o2 = cli(b2, s2);
  const bool build_same = s1 == 0 && s2 == 0 && slurp(dir / "a.json") == slurp(dir / "b.json") &&
                          o1.substr(0, o1.rfind("wrote")) == o2.substr(0, o2.rfind("wrote"));

  const std::vector<std::string> sim{"simulate", "--code", (dir / "a.json").string(), "--type1",
                                     "--type2", "--pairs", "cross-galaxy,same-planet", "--trials",
                                     "20000", "--channel-sigma", "3", "--seed", "4"};
  auto m1 = sim, m2 = sim;
  m1.insert(m1.end(), {"--threads", "1"});
  m2.insert(m2.end(), {"--threads", std::to_string(std::max<std::size_t>(2, workers()))});
  o1 = cli(m1, s1);
  o2 = cli(m1, s2);
  const bool sim_rerun = s1 == 0 && o1 == o2;
  o2 = cli(m2, s2);
  const bool sim_threads = o1 == o2;

  bool split_same = true;
  const GalaxyCode& code = standard();
  const DecoderParams dec = DecoderParams::for_code(code.params);
  EstimateOptions base;
  base.channel_sigma = 1.3;  // noise energy near the upper shell edge
  base.unit_size = 1000;
  const auto ref = estimate_type1(code, dec, 50000, 8, base);
  for (std::size_t w : {2, 3, 8}) {
    EstimateOptions o = base;
    o.threads = w;
    split_same = split_same && estimate_type1(code, dec, 50000, 8, o).hits == ref.hits;
  }
  fs::remove_all(dir);
  return {build_same && sim_rerun && sim_threads && split_same && ref.hits > 0 && ref.hits < 50000,
          std::string("build files ") + (build_same ? "identical" : "DIFFER") + ", simulate rerun " +
              (sim_rerun ? "identical" : "DIFFERS") + ", simulate 1 vs W threads " +
              (sim_threads ? "identical" : "DIFFERS") + ", W-way splits " +
              (split_same ? "match" : "DIFFER") + " (type I hits " + std::to_string(ref.hits) + "/50000)"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "structural suite", 60, structural_suite},
      {2, "projection law", 30, projection_law},
      {3, "shell concentration", 60, shell_concentration},
      {4, "Mills dominance", 1, mills_dominance},
      {5, "type I end-to-end", 120, type1_end_to_end},
      {6, "type II cross-galaxy", 120, type2_cross},
      {7, "same-galaxy slab rejection", 120, slab_rejection},
      {8, "rate formulas", 1, rate_formulas},
      {9, "determinism", 120, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.limit_s;
    failures += !pass;
    std::printf("%s %d %s: %s; runtime %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
