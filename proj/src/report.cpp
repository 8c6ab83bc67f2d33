#include "galaxy/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "galaxy/spherical_code.hpp"

namespace galaxy {

using json = nlohmann::ordered_json;

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "schema_version",
      "command",
      "row",
      "param_n",
      "param_k",
      "param_b",
      "param_power",
      "param_sigma",
      "param_theta",
      "param_m",
      "param_r",
      "param_r_min_override",
      "param_t_bar",
      "param_seed",
      "code_N",
      "code_R_n",
      "code_roots",
      "code_m_achieved",
      "code_below_csw",
      "code_centers_saturated",
      "code_degraded",
      "code_structure_pass",
      "lemma1_rate",
      "claim1_lo",
      "claim1_hi",
      "claim1_log2_lo",
      "claim1_log2_hi",
      "claim1_rate_lo",
      "claim1_rate_hi",
      "csw_bound",
      "asymptotic_rate",
      "mc_kind",
      "mc_label",
      "mc_pairs",
      "mc_trials",
      "mc_hits",
      "mc_p_hat",
      "mc_wilson_lo",
      "mc_wilson_hi",
      "mc_confidence",
      "mc_rule_of_three",
      "mc_seed",
      "mc_shell_hits",
      "mc_slab_hits",
      "bound_value",
      "bound_tag",
      "bound_shell",
      "bound_slab",
      "bound_exceeded",
      "runtime_s",
      "error",
  };
  return cols;
}

ReportRow::ReportRow() {
  for (const auto& c : report_columns()) values_[c] = nullptr;
  values_["schema_version"] = kReportSchemaVersion;
}

void ReportRow::set(std::string_view column, json value) {
  auto it = values_.find(std::string(column));
  if (it == values_.end()) throw std::out_of_range("unknown report column " + std::string(column));
  *it = std::move(value);
}

const json& ReportRow::get(std::string_view column) const {
  return values_.at(std::string(column));
}

void fill_params(ReportRow& row, const GalaxyParams& p) {
  row.set("param_n", p.n);
  row.set("param_k", p.k);
  row.set("param_b", p.b);
  row.set("param_power", p.power);
  row.set("param_sigma", p.sigma);
  row.set("param_theta", p.theta);
  row.set("param_m", p.m_per_level);
  row.set("param_r", p.r);
  row.set("param_r_min_override", p.r_min_override);
  row.set("param_t_bar", p.t_bar);
  row.set("param_seed", p.master_seed);
}

void fill_config(ReportRow& row, const GalaxyConfig& c) {
  row.set("param_n", c.n);
  row.set("param_k", c.k);
  row.set("param_b", c.b);
  row.set("param_power", c.power);
  row.set("param_sigma", c.sigma);
  row.set("param_r_min_override", c.r_min_override);
  row.set("param_seed", c.master_seed);
}

void fill_rate(ReportRow& row, const RateReport& r) {
  row.set("code_N", r.N);
  row.set("code_R_n", r.rate);
  row.set("code_roots", r.roots);
  row.set("code_m_achieved", r.m_achieved);
  row.set("code_below_csw", r.below_csw);
  row.set("lemma1_rate", r.lemma1_bound);
  row.set("claim1_lo", r.claim1.lo);
  row.set("claim1_hi", r.claim1.hi);
  row.set("claim1_log2_lo", r.claim1.log2_lo);
  row.set("claim1_log2_hi", r.claim1.log2_hi);
  row.set("claim1_rate_lo", r.claim1_rate.lo);
  row.set("claim1_rate_hi", r.claim1_rate.hi);
  row.set("csw_bound", r.csw_bound);
  row.set("asymptotic_rate", r.asymptotic);
}

void fill_formulas(ReportRow& row, std::size_t n, double power, double b, double k,
                   double theta) {
  const CountBounds cb = center_count_bounds(n, power, b);
  const Bounds cr = center_rate_bounds(n, power, b);
  row.set("lemma1_rate", rate_lower_bound(n, power, b, k, theta));
  row.set("claim1_lo", cb.lo);
  row.set("claim1_hi", cb.hi);
  row.set("claim1_log2_lo", cb.log2_lo);
  row.set("claim1_log2_hi", cb.log2_hi);
  row.set("claim1_rate_lo", cr.lo);
  row.set("claim1_rate_hi", cr.hi);
  row.set("csw_bound", csw_lower_bound(n, theta));
  row.set("asymptotic_rate", asymptotic_rate(b, k));
}

void fill_estimate(ReportRow& row, const ErrorEstimate& e) {
  row.set("mc_kind", e.kind == ErrorKind::Type1 ? "type1" : "type2");
  row.set("mc_label", e.label);
  row.set("mc_pairs", e.pairs);
  row.set("mc_trials", e.trials);
  row.set("mc_hits", e.hits);
  row.set("mc_p_hat", e.p_hat);
  row.set("mc_wilson_lo", e.wilson.lo);
  row.set("mc_wilson_hi", e.wilson.hi);
  row.set("mc_confidence", e.confidence);
  row.set("mc_rule_of_three", e.hits == 0 ? json(e.rule_of_three) : json(nullptr));
  row.set("mc_seed", e.seed);
  if (e.kind == ErrorKind::Type2) {
    row.set("mc_shell_hits", e.shell_hits);
    row.set("mc_slab_hits", e.slab_hits);
  }
  row.set("bound_value", e.analytic_bound);
  row.set("bound_tag", e.bound_tag);
  row.set("bound_shell", e.shell_bound);
  row.set("bound_slab", e.slab_bound);
  row.set("bound_exceeded", e.exceeds_bound());
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  return v.dump();
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << csv_quote(csv_cell(row.get(cols[i])));
    }
    out << "\r\n";
  }
}

void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows) {
  for (const auto& row : rows) out << row.values().dump() << "\n";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace galaxy
