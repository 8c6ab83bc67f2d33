#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "galaxy/experiments.hpp"

namespace galaxy {

inline constexpr int kReportSchemaVersion = 1;

// The fixed column set of schema version 1, in output order. Column names
// carry their provenance prefix: param_ (construction input), code_
// (measured on a built code), mc_ (Monte Carlo), bound_ (analytic bound
// attached to an estimate), lemma1_, claim1_, csw_, asymptotic_ (formulas).
const std::vector<std::string>& report_columns();

// One output row. Every column exists from the start and is null until set.
class ReportRow {
 public:
  ReportRow();

  // Throws std::out_of_range for a column outside the schema.
  void set(std::string_view column, nlohmann::ordered_json value);
  const nlohmann::ordered_json& get(std::string_view column) const;
  const nlohmann::ordered_json& values() const { return values_; }

 private:
  nlohmann::ordered_json values_;
};

void fill_params(ReportRow& row, const GalaxyParams& p);
void fill_config(ReportRow& row, const GalaxyConfig& c);
void fill_rate(ReportRow& row, const RateReport& r);
// Formula-only columns for a parameter point without a built code.
void fill_formulas(ReportRow& row, std::size_t n, double power, double b, double k,
                   double theta);
void fill_estimate(ReportRow& row, const ErrorEstimate& e);

// Cell text for CSV: empty for null, %.17g for reals, inf/-inf/nan spelled
// out.
std::string csv_cell(const nlohmann::ordered_json& v);
// RFC 4180 quoting: fields containing a comma, quote, CR or LF are quoted and
// embedded quotes doubled.
std::string csv_quote(const std::string& field);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows);

// Splits one CSV record (no embedded newlines) into fields, undoing quoting.
std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace galaxy
