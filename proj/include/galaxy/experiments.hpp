#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "galaxy/channel.hpp"
#include "galaxy/galaxy_code.hpp"

namespace galaxy {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for hits/trials at the given two-sided confidence.
// Well defined at hits = 0 and hits = trials.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence = 0.95);

enum class ErrorKind { Type1, Type2 };

struct ErrorEstimate {
  ErrorKind kind = ErrorKind::Type1;
  std::string label;  // "type1", "type1-shell-only", or the pair strategy name
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  Interval wilson;
  double confidence = 0.95;
  double analytic_bound = 0.0;
  std::string bound_tag;
  std::uint64_t seed = 0;
  // 3/trials when hits == 0, otherwise 0.
  double rule_of_three = 0.0;

  // Type II sub-events: outputs of u2 inside the shell of u1, and inside the
  // slab of u1 at the meet center (same-galaxy pairs only).
  std::uint64_t shell_hits = 0;
  std::uint64_t slab_hits = 0;
  double shell_bound = 0.0;
  double slab_bound = 0.0;
  std::size_t pairs = 0;

  double standard_error() const;
  // p_hat > analytic_bound + 3 standard errors
  bool exceeds_bound() const;
};

struct EstimateOptions {
  std::size_t threads = 1;
  // Trials per work unit; each unit draws from its own derived stream, so
  // totals do not depend on the thread count.
  std::size_t unit_size = 4096;
  double confidence = 0.95;
  // Type I only: test shell membership alone.
  bool shell_only = false;
  // Channel noise std; defaults to the decoder's sigma.
  std::optional<double> channel_sigma;
};

// Per trial, codeword (trial mod N) is sent and tested against its own
// decoding set; hits count misses.
ErrorEstimate estimate_type1(const GalaxyCode& code, const DecoderParams& params,
                             std::uint64_t trials, std::uint64_t master_seed,
                             const EstimateOptions& opts = {});

enum class PairMode { SamePlanet, SameGalaxyDeep, CrossGalaxy, Sample };

struct PairStrategy {
  PairMode mode = PairMode::CrossGalaxy;
  std::size_t sample_count = 1000;  // Sample mode
  double min_distance = 0.0;        // keep pairs with ||u1 - u2|| >= this
  // Keep only same-galaxy pairs whose premise offset is at least twice the
  // slab half-width. Cross-galaxy pairs are unaffected.
  bool require_premise = false;
  std::size_t max_pairs = 65536;  // deterministic strided subset beyond this

  std::string name() const;
};

PairMode parse_pair_mode(const std::string& s);

struct CodewordPair {
  std::size_t first = 0;   // u1, whose decoding set is tested
  std::size_t second = 0;  // u2, the transmitted codeword
  MeetDepth meet;
  double distance = 0.0;
  // <u1 - o, u1 - u2> / ||u1 - o|| for the meet center o; NaN across galaxies.
  double premise_offset = 0.0;
};

// Signed distance from u1 to the projection of u2 onto the line o-u1, via the
// three-distance formula.
double premise_offset(const Point& u1, const Point& u2, const Point& meet_center);

std::vector<CodewordPair> select_pairs(const GalaxyCode& code, const PairStrategy& strategy,
                                       const DecoderParams& params, std::uint64_t seed);

// Per trial, pair (trial mod P) is drawn, u2 is sent and tested against D_{u1};
// hits count false acceptances.
ErrorEstimate estimate_type2(const GalaxyCode& code, const PairStrategy& strategy,
                             const DecoderParams& params, std::uint64_t trials,
                             std::uint64_t master_seed, const EstimateOptions& opts = {});

struct Violation {
  std::string check;
  std::string subject;
  double measured = 0.0;
  double bound = 0.0;
};

struct ViolationList {
  std::vector<Violation> items;  // first kMaxListed only
  std::size_t total = 0;
  static constexpr std::size_t kMaxListed = 1000;

  void add(Violation v);
  bool empty() const { return total == 0; }
};

struct SeparationReport {
  double strong_margin = 0.0;
  double weak_margin = 0.0;
  bool strong_holds = false;
  bool weak_holds = false;
};

struct StructureReport {
  ViolationList cond1;          // radial bounds about every ancestor
  ViolationList cond2;          // same-galaxy pairwise lower bound
  ViolationList cross_galaxy;   // cross-galaxy distance and root spacing
  ViolationList angle;          // per-node minimum angle
  ViolationList radius;         // per-node sphere radius
  ViolationList power;          // ||u||^2 <= nP
  SeparationReport separation;
  std::size_t codewords = 0;
  std::size_t same_pairs_checked = 0;
  std::size_t cross_pairs_checked = 0;
  double tolerance = 1e-6;

  bool pass() const;
};

std::string codeword_label(const Codeword& c);

StructureReport verify_structure(const GalaxyCode& code, double tolerance = 1e-6);

struct RateReport {
  std::size_t N = 0;
  std::size_t n = 0;
  double rate = 0.0;  // log2 N / (n log2 n)
  double lemma1_bound = 0.0;
  CountBounds claim1;
  Bounds claim1_rate;
  double asymptotic = 0.0;
  double csw_bound = 0.0;
  std::size_t m_target = 0;
  std::size_t m_achieved = 0;  // smallest per-node code size
  std::size_t roots = 0;
  std::size_t t_bar = 0;
  bool below_csw = false;  // m_achieved < csw bound: lemma1 is not expected to hold
};

RateReport rate_report(const GalaxyCode& code);

struct TrialPlan {
  std::uint64_t type1_trials = 0;
  std::uint64_t type2_trials = 0;
  std::vector<PairStrategy> strategies;
  bool verify = true;
};

struct SweepCell {
  GalaxyConfig config;
  TrialPlan plan;
};

struct SweepRow {
  std::size_t index = 0;
  GalaxyConfig config;
  std::optional<GalaxyParams> params;
  std::optional<RateReport> rate;
  std::optional<bool> structure_pass;
  std::vector<ErrorEstimate> estimates;
  std::string error;  // nonempty when the cell failed
};

// Each cell is built from master_seed and estimated with master_seed, so
// duplicate cells give identical rows. Rows come back in grid order.
std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, std::uint64_t master_seed,
                            std::size_t threads = 1);

}  // namespace galaxy
