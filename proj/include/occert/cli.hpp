#pragma once

// Batch front-end: metric specs, run configuration, per-point certification
// over sampled points, and the JSON report.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "occert/positivity_certifier.hpp"
#include "occert/sphere_engine.hpp"

namespace occert::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_certified = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_refuted = 3,
  exit_unknown = 4,
  exit_io = 5,
};

/// The list accepted by --checks.
const std::vector<std::string>& known_checks();

struct RunConfig {
  std::string command = "certify";
  Json metric_spec;  // normalized echo of the metric
  MetricField metric;
  int points = 20;
  std::uint64_t seed = 0;
  FDConfig fd;
  int multistarts = 64;
  double tol = 1e-9;
  std::vector<std::string> checks{"bhl", "p_sufficient", "p_refute"};
  std::string out;

  bool has_check(const std::string& name) const;
  /// Throws Error(config) naming the offending field.
  void validate() const;
};

/// Metric spec: {"family": ..., "scale": ..., family parameters}. Unknown
/// keys are rejected; errors name the field.
MetricField parse_metric_spec(const Json& spec);
/// Canonical form of a metric, used as the report echo.
Json metric_to_json(const MetricField& field);

/// --metric accepts a family name or an inline JSON spec.
Json metric_spec_from_flag(const std::string& value);
Json read_json_file(const std::string& path);

struct PointRecord {
  int index = 0;
  ChartPoint point;
  bool ok = false;
  std::string error_kind;
  std::string error_message;
  std::optional<Certificate> certificate;
  std::string verdict = "unknown";  // certified | refuted | unknown
};

struct Report {
  RunConfig config;
  std::vector<PointRecord> points;
  std::string verdict;
  int exit_code = exit_unknown;
  double min_margin = 0.0;  // min over points of 7 lambda_min - 5 lambda_max
};

Report run_certify(const RunConfig& config);
/// Spectra only: no certification checks.
Report run_spectrum(const RunConfig& config);

Json report_to_json(const Report& report);
/// Writes the JSON document; throws Error(io) on failure.
void emit_report(const Report& report, const std::string& path);
void print_summary(const Report& report, std::ostream& os);

/// Quick built-in checks; returns 0 when all pass.
int run_selftest(std::ostream& os);

}  // namespace occert::cli
