#include "galaxy/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "galaxy/gaussian_stats.hpp"
#include "galaxy/parallel.hpp"
#include "galaxy/rng.hpp"

namespace galaxy {

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence) {
  if (trials == 0) throw InvalidParameter("wilson interval: trials must be > 0");
  if (hits > trials) throw InvalidParameter("wilson interval: hits exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidParameter("wilson interval: confidence must lie in (0, 1)");
  }
  const double z = stats::std_normal_quantile(0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the interval always contains p_hat despite rounding at 0 and 1.
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

double ErrorEstimate::standard_error() const {
  if (trials == 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

bool ErrorEstimate::exceeds_bound() const {
  return p_hat > analytic_bound + 3.0 * standard_error();
}

namespace {

void finish(ErrorEstimate& e) {
  e.p_hat = static_cast<double>(e.hits) / static_cast<double>(e.trials);
  e.wilson = wilson_interval(e.hits, e.trials, e.confidence);
  e.rule_of_three = e.hits == 0 ? 3.0 / static_cast<double>(e.trials) : 0.0;
}

struct UnitCounts {
  std::uint64_t hits = 0;
  std::uint64_t shell = 0;
  std::uint64_t slab = 0;
};

// Splits [0, trials) into fixed-size units, runs unit(u, begin, end, counts)
// for each, and sums the per-unit counts in unit order.
template <class Fn>
UnitCounts run_units(std::uint64_t trials, const EstimateOptions& opts, Fn&& unit) {
  const std::uint64_t size = std::max<std::uint64_t>(1, opts.unit_size);
  const std::uint64_t units = (trials + size - 1) / size;
  std::vector<UnitCounts> counts(units);
  parallel_for(units, opts.threads, [&](std::size_t u) {
    const std::uint64_t begin = u * size;
    const std::uint64_t end = std::min(trials, begin + size);
    unit(u, begin, end, counts[u]);
  });
  UnitCounts total;
  for (const auto& c : counts) {
    total.hits += c.hits;
    total.shell += c.shell;
    total.slab += c.slab;
  }
  return total;
}

std::vector<DecodingSet> decoding_sets(const GalaxyCode& code, const DecoderParams& params) {
  std::vector<DecodingSet> sets;
  sets.reserve(code.codewords.size());
  for (const auto& c : code.codewords) sets.emplace_back(c, params);
  return sets;
}

double channel_sigma(const DecoderParams& params, const EstimateOptions& opts) {
  const double s = opts.channel_sigma.value_or(params.sigma);
  if (!(s >= 0.0)) throw InvalidParameter("channel sigma must be >= 0");
  return s;
}

stats::ShellSpec shell_spec(const DecoderParams& params) {
  return stats::ShellSpec{params.n, params.sigma, params.eps_n};
}

// 2 Phi(-halfwidth / sigma): one slab missed by the sender's own output.
double slab_miss(const DecoderParams& params) {
  return stats::projection_tail(params.slab_halfwidth / params.sigma);
}

}  // namespace

ErrorEstimate estimate_type1(const GalaxyCode& code, const DecoderParams& params,
                             std::uint64_t trials, std::uint64_t master_seed,
                             const EstimateOptions& opts) {
  if (trials == 0) throw InvalidParameter("trials must be >= 1");
  if (code.codewords.empty()) throw InvalidParameter("type I estimate on an empty code");
  params.validate();
  const double sigma = channel_sigma(params, opts);
  const auto sets = decoding_sets(code, params);
  const std::size_t N = sets.size();

  const UnitCounts total = run_units(
      trials, opts, [&](std::size_t u, std::uint64_t begin, std::uint64_t end, UnitCounts& c) {
        RandomStream rng(
            derive_seed(master_seed, {static_cast<std::uint64_t>(StreamDomain::Type1), u}));
        std::vector<double> y(params.n);
        for (std::uint64_t t = begin; t < end; ++t) {
          const std::size_t i = static_cast<std::size_t>(t % N);
          transmit_into(code.codewords[i].u.coords(), sigma, rng, y);
          const bool accepted = opts.shell_only ? sets[i].in_shell(y) : sets[i].contains(y);
          if (!accepted) ++c.hits;
        }
      });

  ErrorEstimate e;
  e.kind = ErrorKind::Type1;
  e.label = opts.shell_only ? "type1-shell-only" : "type1";
  e.trials = trials;
  e.hits = total.hits;
  e.seed = master_seed;
  e.confidence = opts.confidence;
  e.pairs = N;
  e.shell_bound = 1.0 - stats::shell_prob_same(shell_spec(params), stats::ShellMethod::Exact);
  if (opts.shell_only) {
    e.analytic_bound = e.shell_bound;
    e.bound_tag = "shell-exact";
  } else {
    e.slab_bound = slab_miss(params);
    e.analytic_bound = e.shell_bound + static_cast<double>(code.params.t_bar) * e.slab_bound;
    e.bound_tag = "shell-exact+tbar*slab";
  }
  finish(e);
  return e;
}

std::string PairStrategy::name() const {
  switch (mode) {
    case PairMode::SamePlanet:
      return "same-planet";
    case PairMode::SameGalaxyDeep:
      return "same-galaxy-deep";
    case PairMode::CrossGalaxy:
      return "cross-galaxy";
    case PairMode::Sample:
      return "sample";
  }
  return "unknown";
}

PairMode parse_pair_mode(const std::string& s) {
  if (s == "same-planet") return PairMode::SamePlanet;
  if (s == "same-galaxy-deep") return PairMode::SameGalaxyDeep;
  if (s == "cross-galaxy") return PairMode::CrossGalaxy;
  if (s == "sample" || s == "exhaustive-sample") return PairMode::Sample;
  throw InvalidParameter("unknown pair strategy '" + s + "'");
}

double premise_offset(const Point& u1, const Point& u2, const Point& meet_center) {
  const double a = distance(u1, meet_center);
  if (a == 0.0) throw DegenerateGeometry("premise: codeword coincides with its center");
  const double d12 = distance(u1, u2);
  const double c = distance(u2, meet_center);
  return (a * a + d12 * d12 - c * c) / (2.0 * a);
}

namespace {

CodewordPair make_pair(const GalaxyCode& code, std::size_t i, std::size_t j) {
  const Codeword& c1 = code.codewords[i];
  const Codeword& c2 = code.codewords[j];
  CodewordPair p;
  p.first = i;
  p.second = j;
  p.meet = meet_depth(c1, c2);
  p.distance = distance(c1.u, c2.u);
  if (const auto* l = std::get_if<std::size_t>(&p.meet)) {
    p.premise_offset = premise_offset(c1.u, c2.u, c1.path[*l - 1]);
  } else {
    p.premise_offset = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

bool mode_accepts(const PairStrategy& s, const MeetDepth& meet, std::size_t t_bar) {
  const auto* l = std::get_if<std::size_t>(&meet);
  switch (s.mode) {
    case PairMode::SamePlanet:
      return l && *l == 1;
    case PairMode::SameGalaxyDeep:
      return l && *l == t_bar;
    case PairMode::CrossGalaxy:
      return l == nullptr;
    case PairMode::Sample:
      return true;
  }
  return false;
}

bool filters_accept(const PairStrategy& s, const CodewordPair& p, const DecoderParams& params) {
  if (p.distance < s.min_distance) return false;
  // The premise only concerns pairs that share a center; cross-galaxy pairs
  // are separated by the shell alone.
  if (s.require_premise && std::holds_alternative<std::size_t>(p.meet)) {
    if (!(p.premise_offset >= 2.0 * params.slab_halfwidth)) return false;
  }
  return true;
}

}  // namespace

std::vector<CodewordPair> select_pairs(const GalaxyCode& code, const PairStrategy& strategy,
                                       const DecoderParams& params, std::uint64_t seed) {
  const std::size_t N = code.codewords.size();
  std::vector<CodewordPair> out;
  if (N < 2) return out;

  if (strategy.mode == PairMode::Sample) {
    const std::uint64_t total = static_cast<std::uint64_t>(N) * (N - 1);
    if (total <= strategy.sample_count) {
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
          if (i == j) continue;
          CodewordPair p = make_pair(code, i, j);
          if (filters_accept(strategy, p, params)) out.push_back(p);
        }
      }
      return out;
    }
    RandomStream rng(
        derive_seed(seed, {static_cast<std::uint64_t>(StreamDomain::PairSample)}));
    for (std::size_t s = 0; s < strategy.sample_count; ++s) {
      const auto i = std::min<std::size_t>(N - 1, static_cast<std::size_t>(rng.uniform() * N));
      auto j = std::min<std::size_t>(N - 2, static_cast<std::size_t>(rng.uniform() * (N - 1)));
      if (j >= i) ++j;
      CodewordPair p = make_pair(code, i, j);
      if (filters_accept(strategy, p, params)) out.push_back(p);
    }
    return out;
  }

  // Two passes: count qualifying ordered pairs, then keep an evenly strided
  // subset of at most max_pairs.
  const std::size_t t_bar = code.params.t_bar;
  auto for_each_qualifying = [&](auto&& visit) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        const MeetDepth meet = meet_depth(code.codewords[i], code.codewords[j]);
        if (!mode_accepts(strategy, meet, t_bar)) continue;
        CodewordPair p = make_pair(code, i, j);
        if (filters_accept(strategy, p, params)) visit(p);
      }
    }
  };
  std::size_t qualifying = 0;
  for_each_qualifying([&](const CodewordPair&) { ++qualifying; });
  const std::size_t cap = std::max<std::size_t>(1, strategy.max_pairs);
  const std::size_t stride = qualifying <= cap ? 1 : (qualifying + cap - 1) / cap;
  std::size_t idx = 0;
  for_each_qualifying([&](const CodewordPair& p) {
    if (idx++ % stride == 0) out.push_back(p);
  });
  return out;
}

ErrorEstimate estimate_type2(const GalaxyCode& code, const PairStrategy& strategy,
                             const DecoderParams& params, std::uint64_t trials,
                             std::uint64_t master_seed, const EstimateOptions& opts) {
  if (trials == 0) throw InvalidParameter("trials must be >= 1");
  params.validate();
  const auto pairs = select_pairs(code, strategy, params, master_seed);
  if (pairs.empty()) {
    throw InvalidParameter("pair strategy '" + strategy.name() + "' yields no pairs");
  }
  const double sigma = channel_sigma(params, opts);
  const auto sets = decoding_sets(code, params);
  const std::size_t P = pairs.size();

  const UnitCounts total = run_units(
      trials, opts, [&](std::size_t u, std::uint64_t begin, std::uint64_t end, UnitCounts& c) {
        RandomStream rng(
            derive_seed(master_seed, {static_cast<std::uint64_t>(StreamDomain::Type2), u}));
        std::vector<double> y(params.n);
        for (std::uint64_t t = begin; t < end; ++t) {
          const CodewordPair& p = pairs[static_cast<std::size_t>(t % P)];
          transmit_into(code.codewords[p.second].u.coords(), sigma, rng, y);
          const DecodingSet& d = sets[p.first];
          if (d.contains(y)) ++c.hits;
          if (d.in_shell(y)) ++c.shell;
          if (const auto* l = std::get_if<std::size_t>(&p.meet)) {
            if (d.in_slab(y, *l)) ++c.slab;
          }
        }
      });

  ErrorEstimate e;
  e.kind = ErrorKind::Type2;
  e.label = strategy.name();
  e.trials = trials;
  e.hits = total.hits;
  e.shell_hits = total.shell;
  e.slab_hits = total.slab;
  e.seed = master_seed;
  e.confidence = opts.confidence;
  e.pairs = P;

  bool any_cross = false;
  bool any_same = false;
  double min_cross_d = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (std::holds_alternative<DifferentGalaxies>(p.meet)) {
      any_cross = true;
      min_cross_d = std::min(min_cross_d, p.distance);
    } else {
      any_same = true;
    }
  }
  // The cross-shell expression is decreasing in d, so the closest pair is
  // the worst case.
  if (any_cross) e.shell_bound = stats::shell_prob_cross(shell_spec(params), min_cross_d);
  if (any_same) e.slab_bound = slab_miss(params);
  if (any_cross && any_same) {
    e.analytic_bound = std::max(e.shell_bound, e.slab_bound);
    e.bound_tag = "max(shell-cross,slab)";
  } else if (any_cross) {
    e.analytic_bound = e.shell_bound;
    e.bound_tag = "shell-cross";
  } else {
    e.analytic_bound = e.slab_bound;
    e.bound_tag = "slab";
  }
  finish(e);
  return e;
}

void ViolationList::add(Violation v) {
  if (items.size() < kMaxListed) items.push_back(std::move(v));
  ++total;
}

bool StructureReport::pass() const {
  return cond1.empty() && cond2.empty() && cross_galaxy.empty() && angle.empty() &&
         radius.empty() && power.empty();
}

std::string codeword_label(const Codeword& c) {
  std::ostringstream os;
  os << "root " << c.root_index << " leaf ";
  for (std::size_t i = 0; i < c.branch.size(); ++i) os << (i ? "." : "") << c.branch[i];
  return os.str();
}

namespace {

// Nodes are named by their child path from the top code, "top" for the top
// code itself.
void check_node(const GalaxyNode& node, const std::string& prefix, const std::string& path,
                ViolationList& angle, ViolationList& radius) {
  const SphericalCode& code = node.code;
  const std::string label = prefix + (path.empty() ? "top" : path);
  for (std::size_t i = 0; i < code.points.size(); ++i) {
    const double d = distance(code.points[i], code.center);
    if (std::abs(d - code.radius) > 1e-9 * code.radius) {
      radius.add({"radius", label + " point " + std::to_string(i), d, code.radius});
    }
  }
  if (code.points.size() >= 2) {
    for (std::size_t i = 0; i < code.points.size(); ++i) {
      for (std::size_t j = i + 1; j < code.points.size(); ++j) {
        const double a = angle_at(code.center, code.points[i], code.points[j]);
        if (a < code.theta - 1e-9) {
          angle.add({"angle",
                     label + " points " + std::to_string(i) + "," + std::to_string(j), a,
                     code.theta});
        }
      }
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    check_node(node.children[i], prefix, path + (path.empty() ? "" : ".") + std::to_string(i),
               angle, radius);
  }
}

}  // namespace

StructureReport verify_structure(const GalaxyCode& code, double tolerance) {
  if (code.codewords.empty()) throw InvalidParameter("verify_structure: empty code");
  const GalaxyParams& p = code.params;
  const double k = static_cast<double>(p.k);
  StructureReport rep;
  rep.tolerance = tolerance;
  rep.codewords = code.codewords.size();
  rep.separation.strong_margin = separation_margin(k, p.theta, SeparationVariant::Strong);
  rep.separation.weak_margin = separation_margin(k, p.theta, SeparationVariant::Weak);
  rep.separation.strong_holds = separation_condition(k, p.theta, SeparationVariant::Strong);
  rep.separation.weak_holds = separation_condition(k, p.theta, SeparationVariant::Weak);

  for (const auto& tree : code.trees) {
    check_node(tree.top, "root " + std::to_string(tree.root_index) + " node ", "", rep.angle,
               rep.radius);
  }

  const double power_limit = static_cast<double>(p.n) * p.power;
  for (const auto& c : code.codewords) {
    const std::string label = codeword_label(c);
    for (std::size_t t = 1; t <= c.path.size(); ++t) {
      const double d = distance(c.u, c.path[t - 1]);
      const Bounds rb = radial_bounds(p.r, k, t);
      if (d < rb.lo - tolerance) {
        rep.cond1.add({"radial-lower t=" + std::to_string(t), label, d, rb.lo});
      }
      if (d > rb.hi + tolerance) {
        rep.cond1.add({"radial-upper t=" + std::to_string(t), label, d, rb.hi});
      }
    }
    const double e2 = squared_norm(Vector(c.u.raw()));
    if (e2 > power_limit * (1.0 + 1e-9)) rep.power.add({"power", label, e2, power_limit});
  }

  const double cross_min = p.galaxy_scale() / 2.0;
  const std::size_t N = code.codewords.size();
  for (std::size_t i = 0; i < N; ++i) {
    const Codeword& a = code.codewords[i];
    for (std::size_t j = i + 1; j < N; ++j) {
      const Codeword& b = code.codewords[j];
      const double d = distance(a.u, b.u);
      if (a.root_index == b.root_index) {
        ++rep.same_pairs_checked;
        const auto l = std::get<std::size_t>(meet_depth(a, b));
        const double bound = pair_distance_lower_bound(p.r, k, p.theta, l);
        if (d < bound - tolerance) {
          rep.cond2.add({"pairwise t=" + std::to_string(l),
                         codeword_label(a) + " | " + codeword_label(b), d, bound});
        }
      } else {
        ++rep.cross_pairs_checked;
        if (d < cross_min - tolerance) {
          rep.cross_galaxy.add(
              {"cross-galaxy", codeword_label(a) + " | " + codeword_label(b), d, cross_min});
        }
      }
    }
  }

  for (std::size_t i = 0; i < code.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < code.roots.size(); ++j) {
      const double d = distance(code.roots[i], code.roots[j]);
      if (d < p.center_spacing - tolerance) {
        rep.cross_galaxy.add({"root-spacing",
                              "root " + std::to_string(i) + " | root " + std::to_string(j), d,
                              p.center_spacing});
      }
    }
  }
  return rep;
}

namespace {

std::size_t min_node_size(const GalaxyNode& node) {
  std::size_t m = node.code.size();
  for (const auto& c : node.children) m = std::min(m, min_node_size(c));
  return m;
}

}  // namespace

RateReport rate_report(const GalaxyCode& code) {
  const GalaxyParams& p = code.params;
  RateReport r;
  r.N = code.codewords.size();
  r.n = p.n;
  const double dn = static_cast<double>(p.n);
  r.rate = r.N > 0 ? std::log2(static_cast<double>(r.N)) / (dn * std::log2(dn)) : 0.0;
  const double k = static_cast<double>(p.k);
  r.lemma1_bound = rate_lower_bound(p.n, p.power, p.b, k, p.theta);
  r.claim1 = center_count_bounds(p.n, p.power, p.b);
  r.claim1_rate = center_rate_bounds(p.n, p.power, p.b);
  r.asymptotic = asymptotic_rate(p.b, k);
  r.csw_bound = csw_lower_bound(p.n, p.theta);
  r.m_target = p.m_per_level;
  r.m_achieved = code.trees.empty() ? 0 : std::numeric_limits<std::size_t>::max();
  for (const auto& t : code.trees) r.m_achieved = std::min(r.m_achieved, min_node_size(t.top));
  r.roots = code.roots.size();
  r.t_bar = p.t_bar;
  r.below_csw = static_cast<double>(r.m_achieved) < r.csw_bound;
  return r;
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, std::uint64_t master_seed,
                            std::size_t threads) {
  if (grid.empty()) throw InvalidParameter("sweep: empty grid");
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.index = idx;
    row.config = grid[idx].config;
    row.config.master_seed = master_seed;
    try {
      const GalaxyParams params = resolve_params(row.config);
      row.params = params;
      const GalaxyCode code = build_code(params);
      row.rate = rate_report(code);
      const TrialPlan& plan = grid[idx].plan;
      if (plan.verify) row.structure_pass = verify_structure(code).pass();
      const DecoderParams dec = DecoderParams::for_code(params);
      if (plan.type1_trials > 0) {
        row.estimates.push_back(estimate_type1(code, dec, plan.type1_trials, master_seed));
      }
      if (plan.type2_trials > 0) {
        for (const auto& s : plan.strategies) {
          row.estimates.push_back(estimate_type2(code, s, dec, plan.type2_trials, master_seed));
        }
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return rows;
}

}  // namespace galaxy
