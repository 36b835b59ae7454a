#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace funcito {

// One CSV row of a report: `experiment,quantity,mean,stderr,n`.
struct ReportRow {
  std::string quantity;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

struct MetricResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::vector<MetricResult> metrics;
  double wall_ms = 0.0;  // metadata only, never part of the CSV body

  bool pass() const;
};

// Deterministic CSV body (header + rows); excludes timing metadata.
std::string report_csv(const ExperimentReport& rep);
// JSON summary with metrics, pass/fail and timing.
std::string report_json(const ExperimentReport& rep);

// Writes via a temp file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_double(double x);  // shortest round-trip-exact decimal form

}  // namespace funcito
