#include "galaxy/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "galaxy/code_file.hpp"
#include "galaxy/experiments.hpp"
#include "galaxy/report.hpp"

namespace galaxy {

namespace {

using json = nlohmann::ordered_json;

// Raised for anything that should end in exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Construction flags shared by build and sweep.
struct ConfigFlags {
  std::size_t n = 16;
  std::uint32_t k = 16;
  double b = 0.0;
  double power = 1.0;
  double sigma = 1.0;
  std::size_t m = 0;
  std::size_t m_cap = 8;
  std::size_t depth = 0;
  double theta = 0.0;
  bool r_min = false;
  double r_min_factor = 2.0;
  std::size_t max_centers = 64;
  std::size_t max_attempts = 10000;
  std::size_t probes = 2000;

  CLI::Option* m_opt = nullptr;
  CLI::Option* depth_opt = nullptr;
  CLI::Option* theta_opt = nullptr;

  void add_shape(CLI::App* app) {
    app->add_option("--power", power, "per-symbol power budget P");
    app->add_option("--sigma", sigma, "noise standard deviation");
    m_opt = app->add_option("--m", m, "points per spherical code (default: min(CSW bound, --m-cap))");
    app->add_option("--m-cap", m_cap, "cap on the default m");
    depth_opt = app->add_option("--depth", depth, "galaxy depth t_bar (default: depth formula)");
    theta_opt = app->add_option("--theta", theta, "minimum angle in radians (default: from k)");
    app->add_flag("--r-min", r_min, "raise the leaf radius to r_min_factor * sigma * log2 n");
    app->add_option("--r-min-factor", r_min_factor, "factor for --r-min");
    app->add_option("--max-centers", max_centers, "cap on the number of galaxies");
    app->add_option("--max-attempts", max_attempts, "consecutive rejections per spherical code");
    app->add_option("--saturation-probes", probes, "consecutive rejections for the root packing");
  }

  GalaxyConfig config(std::size_t n_, std::uint32_t k_, double b_, std::uint64_t seed) const {
    GalaxyConfig c;
    c.n = n_;
    c.k = k_;
    c.b = b_;
    c.power = power;
    c.sigma = sigma;
    c.master_seed = seed;
    if (m_opt->count()) c.m_per_level = m;
    c.m_cap = m_cap;
    if (depth_opt->count()) c.t_bar = depth;
    if (theta_opt->count()) c.theta = theta;
    c.r_min_override = r_min;
    c.r_min_factor = r_min_factor;
    c.max_centers = max_centers;
    c.max_attempts = max_attempts;
    c.saturation_probes = probes;
    return c;
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string out;
  bool timing = false;

  void add(CLI::App* app, bool with_out = true) {
    app->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "jsonl"}));
    if (with_out) app->add_option("--out", out, "write the report here instead of stdout");
    app->add_flag("--timing", timing, "fill the runtime_s column (makes output run-dependent)");
  }
};

std::size_t resolve_threads(const CLI::Option* opt, std::size_t flag_value) {
  if (opt->count()) return std::max<std::size_t>(1, flag_value);
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 1;
}

void emit(const std::vector<ReportRow>& rows, const OutputFlags& flags, std::ostream& out) {
  std::ostringstream text;
  if (flags.format == "jsonl") {
    write_jsonl(text, rows);
  } else {
    write_csv(text, rows);
  }
  if (flags.out.empty()) {
    out << text.str();
    return;
  }
  std::ofstream f(flags.out, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + flags.out + "' for writing");
  f << text.str();
  if (!f) throw UsageError("write to '" + flags.out + "' failed");
}

GalaxyCode load_code(const std::string& path) {
  try {
    return read_code_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// "a..b" -> [a, b]
std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw UsageError("range must look like a..b, got '" + s + "'");
  try {
    std::size_t used = 0;
    const int a = std::stoi(s.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(s);
    const std::string tail = s.substr(dots + 2);
    const int b = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(s);
    if (a > b) throw UsageError("empty range '" + s + "'");
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("range must look like a..b, got '" + s + "'");
  }
}

std::vector<double> k_grid(const std::vector<double>& ks, const std::string& pow2) {
  std::vector<double> out = ks;
  if (!pow2.empty()) {
    const auto [a, b] = parse_range(pow2);
    if (a < 0 || b > 62) throw UsageError("--k-pow2 exponents must lie in 0..62");
    for (int j = a; j <= b; ++j) out.push_back(std::ldexp(1.0, j));
  }
  return out;
}

std::vector<PairStrategy> parse_strategies(const std::vector<std::string>& names,
                                           std::size_t sample_count, double min_distance,
                                           bool premise, std::size_t max_pairs) {
  std::vector<PairStrategy> out;
  for (const auto& name : names) {
    PairStrategy s;
    try {
      s.mode = parse_pair_mode(name);
    } catch (const InvalidParameter& e) {
      throw UsageError(e.what());
    }
    s.sample_count = sample_count;
    s.min_distance = min_distance;
    s.require_premise = premise;
    s.max_pairs = max_pairs;
    out.push_back(s);
  }
  return out;
}

int cmd_build(const ConfigFlags& cf, std::uint64_t seed, const std::string& path,
              std::size_t threads, std::ostream& out) {
  const GalaxyParams params = resolve_params(cf.config(cf.n, cf.k, cf.b, seed));
  const GalaxyCode code = build_code(params, threads);
  const std::string text = serialize_code(code);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("write to '" + path + "' failed");

  std::size_t m_min = params.m_per_level;
  for (const auto& t : code.trees) {
    std::vector<const GalaxyNode*> stack{&t.top};
    while (!stack.empty()) {
      const GalaxyNode* node = stack.back();
      stack.pop_back();
      m_min = std::min(m_min, node->code.size());
      for (const auto& c : node->children) stack.push_back(&c);
    }
  }
  out << "roots " << code.roots.size() << "\n"
      << "codewords " << code.codewords.size() << "\n"
      << "t_bar " << params.t_bar << "\n"
      << "theta " << fmt_double(params.theta) << "\n"
      << "m_per_level " << params.m_per_level << "\n"
      << "m_achieved_min " << m_min << "\n"
      << "r " << fmt_double(params.r) << "\n"
      << "center_spacing " << fmt_double(params.center_spacing) << "\n"
      << "centers_saturated " << (code.centers_saturated ? "true" : "false") << "\n"
      << "centers_capped " << (code.centers_capped ? "true" : "false") << "\n"
      << "degraded " << (code.degraded() ? "true" : "false") << "\n"
      << "wrote " << path << "\n";
  return kExitOk;
}

void print_violations(std::ostream& out, const char* name, const ViolationList& list) {
  out << name << ": " << list.total << " violation" << (list.total == 1 ? "" : "s") << "\n";
  for (const auto& v : list.items) {
    out << "  " << v.check << "  " << v.subject << "  measured " << fmt_double(v.measured)
        << "  bound " << fmt_double(v.bound) << "\n";
  }
  if (list.total > list.items.size()) {
    out << "  ... " << (list.total - list.items.size()) << " more\n";
  }
}

json violations_json(const ViolationList& list) {
  json items = json::array();
  for (const auto& v : list.items) {
    items.push_back({{"check", v.check},
                     {"subject", v.subject},
                     {"measured", v.measured},
                     {"bound", v.bound}});
  }
  return {{"total", list.total}, {"items", std::move(items)}};
}

int cmd_verify(const std::string& path, double tolerance, bool as_json, std::ostream& out) {
  const GalaxyCode code = load_code(path);
  const StructureReport rep = verify_structure(code, tolerance);
  if (as_json) {
    json j;
    j["pass"] = rep.pass();
    j["codewords"] = rep.codewords;
    j["same_pairs_checked"] = rep.same_pairs_checked;
    j["cross_pairs_checked"] = rep.cross_pairs_checked;
    j["tolerance"] = rep.tolerance;
    j["separation"] = {{"strong_margin", rep.separation.strong_margin},
                       {"strong_holds", rep.separation.strong_holds},
                       {"weak_margin", rep.separation.weak_margin},
                       {"weak_holds", rep.separation.weak_holds}};
    j["cond1"] = violations_json(rep.cond1);
    j["cond2"] = violations_json(rep.cond2);
    j["cross_galaxy"] = violations_json(rep.cross_galaxy);
    j["angle"] = violations_json(rep.angle);
    j["radius"] = violations_json(rep.radius);
    j["power"] = violations_json(rep.power);
    out << j.dump(1) << "\n";
  } else {
    out << "codewords " << rep.codewords << "\n"
        << "same-galaxy pairs checked " << rep.same_pairs_checked << "\n"
        << "cross-galaxy pairs checked " << rep.cross_pairs_checked << "\n"
        << "tolerance " << fmt_double(rep.tolerance) << "\n"
        << "separation strong margin " << fmt_double(rep.separation.strong_margin)
        << (rep.separation.strong_holds ? " holds" : " fails") << "\n"
        << "separation weak margin " << fmt_double(rep.separation.weak_margin)
        << (rep.separation.weak_holds ? " holds" : " fails") << "\n";
    print_violations(out, "cond1", rep.cond1);
    print_violations(out, "cond2", rep.cond2);
    print_violations(out, "cross_galaxy", rep.cross_galaxy);
    print_violations(out, "angle", rep.angle);
    print_violations(out, "radius", rep.radius);
    print_violations(out, "power", rep.power);
    out << (rep.pass() ? "PASS" : "FAIL") << "\n";
  }
  return rep.pass() ? kExitOk : kExitViolations;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic identification codes for the Gaussian channel", "galaxy_di"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::uint64_t trials = 0;

  // build
  ConfigFlags build_cf;
  std::string build_out;
  CLI::App* build = app.add_subcommand("build", "build a code and write it to a file");
  build->add_option("--n", build_cf.n, "block length");
  build->add_option("--k", build_cf.k, "radius ratio between galaxy levels (>= 7)");
  build->add_option("--b", build_cf.b, "leaf radius exponent, 0 <= b < 1/4");
  build_cf.add_shape(build);
  build->add_option("--seed", seed, "master seed");
  build->add_option("--out", build_out, "code file to write")->required();
  CLI::Option* build_threads = build->add_option("--threads", threads, "worker threads");

  // simulate
  std::string sim_code;
  bool type1 = false;
  bool type2 = false;
  bool shell_only = false;
  std::vector<std::string> pair_names;
  double min_distance = 0.0;
  bool premise = false;
  std::size_t sample_count = 1000;
  std::size_t max_pairs = 65536;
  double channel_sigma = 0.0;
  double confidence = 0.95;
  OutputFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo type I / type II estimates");
  simulate->add_option("--code", sim_code, "code file")->required();
  simulate->add_flag("--type1", type1, "estimate the type I (miss) error");
  simulate->add_flag("--type2", type2, "estimate the type II (false acceptance) error");
  simulate->add_flag("--shell-only", shell_only, "type I: test the shell alone");
  simulate->add_option("--pairs", pair_names,
                       "pair strategies: same-planet, same-galaxy-deep, cross-galaxy, sample")
      ->delimiter(',');
  simulate->add_option("--min-distance", min_distance, "keep pairs at least this far apart");
  simulate->add_flag("--premise", premise, "keep same-galaxy pairs meeting the slab premise");
  simulate->add_option("--sample-count", sample_count, "pairs drawn by the sample strategy");
  simulate->add_option("--max-pairs", max_pairs, "cap on stratified pairs");
  CLI::Option* sigma_opt =
      simulate->add_option("--channel-sigma", channel_sigma, "channel noise (default: code sigma)");
  simulate->add_option("--confidence", confidence, "Wilson interval confidence");
  CLI::Option* trials_opt = simulate->add_option("--trials", trials, "transmissions per estimate");
  simulate->add_option("--seed", seed, "master seed for the noise");
  CLI::Option* sim_threads = simulate->add_option("--threads", threads, "worker threads");
  sim_flags.add(simulate);

  // verify
  std::string verify_code;
  double tolerance = 1e-6;
  bool verify_json = false;
  CLI::App* verify = app.add_subcommand("verify", "exhaustively check the structural bounds");
  verify->add_option("--code", verify_code, "code file")->required();
  verify->add_option("--tolerance", tolerance, "absolute distance tolerance");
  verify->add_flag("--json", verify_json, "machine-readable report");

  // rate
  std::string rate_code;
  std::vector<double> rate_ks;
  std::string rate_pow2;
  std::vector<double> rate_bs;
  std::size_t rate_n = 0;
  double rate_power = 1.0;
  OutputFlags rate_flags;
  CLI::App* rate = app.add_subcommand("rate", "rate table from a code file or from formulas");
  rate->add_option("--code", rate_code, "code file (achieved rate)");
  CLI::Option* rate_k_opt = rate->add_option("--k", rate_ks, "k values")->delimiter(',');
  CLI::Option* rate_pow2_opt = rate->add_option("--k-pow2", rate_pow2, "k = 2^a..2^b");
  CLI::Option* rate_b_opt = rate->add_option("--b", rate_bs, "b values")->delimiter(',');
  CLI::Option* rate_n_opt = rate->add_option("--n", rate_n, "block length for finite-n bounds");
  rate->add_option("--power", rate_power, "per-symbol power budget P");
  rate_flags.add(rate);

  // sweep
  ConfigFlags sweep_cf;
  std::vector<std::size_t> sweep_ns{16};
  std::vector<double> sweep_ks;
  std::string sweep_pow2;
  std::vector<double> sweep_bs{0.0};
  std::uint64_t sweep_t1 = 0;
  std::uint64_t sweep_t2 = 0;
  std::vector<std::string> sweep_pairs;
  bool no_verify = false;
  OutputFlags sweep_flags;
  CLI::App* sw = app.add_subcommand("sweep", "build, verify and estimate over a parameter grid");
  sw->add_option("--n", sweep_ns, "block lengths")->delimiter(',');
  sw->add_option("--k", sweep_ks, "k values")->delimiter(',');
  sw->add_option("--k-pow2", sweep_pow2, "k = 2^a..2^b");
  sw->add_option("--b", sweep_bs, "b values")->delimiter(',');
  sweep_cf.add_shape(sw);
  sw->add_option("--type1-trials", sweep_t1, "type I trials per cell");
  sw->add_option("--type2-trials", sweep_t2, "type II trials per strategy per cell");
  sw->add_option("--pairs", sweep_pairs, "type II pair strategies")->delimiter(',');
  sw->add_option("--min-distance", min_distance, "keep pairs at least this far apart");
  sw->add_flag("--premise", premise, "keep same-galaxy pairs meeting the slab premise");
  sw->add_flag("--no-verify", no_verify, "skip the structural check");
  sw->add_option("--seed", seed, "master seed");
  CLI::Option* sweep_threads = sw->add_option("--threads", threads, "worker threads (cells)");
  sweep_flags.add(sw);

  std::vector<const char*> argv{"galaxy_di"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*build) {
      return cmd_build(build_cf, seed, build_out, resolve_threads(build_threads, threads), out);
    }

    if (*simulate) {
      if (!trials_opt->count()) throw UsageError("--trials is required");
      if (trials == 0) throw UsageError("trials must be >= 1");
      if (!type1 && !type2) type1 = true;
      if (type2 && pair_names.empty()) pair_names.push_back("cross-galaxy");
      const auto strategies =
          parse_strategies(pair_names, sample_count, min_distance, premise, max_pairs);
      const GalaxyCode code = load_code(sim_code);
      const DecoderParams dec = DecoderParams::for_code(code.params);
      EstimateOptions opts;
      opts.threads = resolve_threads(sim_threads, threads);
      opts.shell_only = shell_only;
      opts.confidence = confidence;
      if (sigma_opt->count()) opts.channel_sigma = channel_sigma;
      const RateReport rr = rate_report(code);

      std::vector<ReportRow> rows;
      auto add_row = [&](const ErrorEstimate& e, double secs) {
        ReportRow row;
        row.set("command", "simulate");
        row.set("row", rows.size());
        fill_params(row, code.params);
        fill_rate(row, rr);
        fill_estimate(row, e);
        if (sim_flags.timing) row.set("runtime_s", secs);
        rows.push_back(std::move(row));
      };
      if (type1) {
        const auto t0 = std::chrono::steady_clock::now();
        const ErrorEstimate e = estimate_type1(code, dec, trials, seed, opts);
        add_row(e, seconds_since(t0));
      }
      if (type2) {
        for (const auto& s : strategies) {
          const auto t0 = std::chrono::steady_clock::now();
          const ErrorEstimate e = estimate_type2(code, s, dec, trials, seed, opts);
          add_row(e, seconds_since(t0));
        }
      }
      emit(rows, sim_flags, out);
      return kExitOk;
    }

    if (*verify) return cmd_verify(verify_code, tolerance, verify_json, out);

    if (*rate) {
      std::vector<ReportRow> rows;
      if (!rate_code.empty()) {
        if (rate_k_opt->count() || rate_pow2_opt->count() || rate_b_opt->count() ||
            rate_n_opt->count()) {
          throw UsageError("rate takes either --code or formula parameters, not both");
        }
        const GalaxyCode code = load_code(rate_code);
        ReportRow row;
        row.set("command", "rate");
        row.set("row", 0);
        fill_params(row, code.params);
        fill_rate(row, rate_report(code));
        rows.push_back(std::move(row));
      } else {
        const std::vector<double> ks = k_grid(rate_ks, rate_pow2);
        if (ks.empty()) throw UsageError("rate needs --code, or --k / --k-pow2 for formula mode");
        if (rate_bs.empty()) rate_bs.push_back(0.0);
        for (double b : rate_bs) {
          for (double k : ks) {
            ReportRow row;
            row.set("command", "rate");
            row.set("row", rows.size());
            row.set("param_k", k);
            row.set("param_b", b);
            row.set("asymptotic_rate", asymptotic_rate(b, k));
            if (rate_n_opt->count()) {
              const double theta = theta_of_k(k);
              row.set("param_n", rate_n);
              row.set("param_power", rate_power);
              row.set("param_theta", theta);
              fill_formulas(row, rate_n, rate_power, b, k, theta);
            }
            rows.push_back(std::move(row));
          }
        }
      }
      emit(rows, rate_flags, out);
      return kExitOk;
    }

    if (*sw) {
      std::vector<double> ks = k_grid(sweep_ks, sweep_pow2);
      if (ks.empty()) ks.push_back(16);
      if (sweep_t2 > 0 && sweep_pairs.empty()) sweep_pairs.push_back("cross-galaxy");
      TrialPlan plan;
      plan.type1_trials = sweep_t1;
      plan.type2_trials = sweep_t2;
      plan.strategies = parse_strategies(sweep_pairs, sample_count, min_distance, premise, max_pairs);
      plan.verify = !no_verify;
      std::vector<SweepCell> grid;
      for (std::size_t n : sweep_ns) {
        for (double k : ks) {
          if (!(k >= 1.0 && k <= 4294967295.0) || k != std::floor(k)) {
            throw UsageError("sweep k must be an integer in 1..2^32-1");
          }
          for (double b : sweep_bs) {
            grid.push_back({sweep_cf.config(n, static_cast<std::uint32_t>(k), b, seed), plan});
          }
        }
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = sweep(grid, seed, resolve_threads(sweep_threads, threads));
      const double secs = seconds_since(t0);
      std::vector<ReportRow> rows;
      for (const auto& sr : result) {
        ReportRow base;
        base.set("command", "sweep");
        fill_config(base, sr.config);
        if (sr.params) fill_params(base, *sr.params);
        if (sr.rate) fill_rate(base, *sr.rate);
        if (sr.structure_pass) base.set("code_structure_pass", *sr.structure_pass);
        if (!sr.error.empty()) base.set("error", sr.error);
        if (sweep_flags.timing) base.set("runtime_s", secs);
        if (sr.estimates.empty()) {
          base.set("row", rows.size());
          rows.push_back(base);
        }
        for (const auto& e : sr.estimates) {
          ReportRow row = base;
          row.set("row", rows.size());
          fill_estimate(row, e);
          rows.push_back(std::move(row));
        }
      }
      emit(rows, sweep_flags, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace galaxy
