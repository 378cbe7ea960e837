#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/generators.hpp"

namespace ellab {

/// Standing parameters of one experiment run.  `p = 0` means "derive from
/// alpha" via p = n/(n+alpha); an explicit p must match that relation.
struct ExperimentConfig {
  unsigned seed = 2026;
  int n = 2;
  int m = 33;
  double lambda = 1.0;
  double Lambda = 4.0;
  double alpha = 0.5;
  double p = 0.0;
  double q = 2.25;
  double eps = 0.5;
  int instances = 20;
  CoefficientClass coefficient_class = CoefficientClass::holder;
  std::string experiment = "solve";
  std::string output_dir = ".";
};

/// The p actually used: the explicit value if set, else n/(n+alpha).
double effective_p(const ExperimentConfig& cfg);

/// Parses a TOML-style key/value text ("key = value" lines, '#' comments,
/// optional double quotes around strings).  Unknown keys and malformed
/// values are collected into `problems` rather than thrown, so a caller can
/// report every issue at once.
ExperimentConfig parse_config_text(const std::string& text,
                                   std::vector<std::string>* problems);
ExperimentConfig parse_config_file(const std::string& path,
                                   std::vector<std::string>* problems);

/// Every semantic problem with the config (empty means valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

struct ReportRow {
  int instance = 0;
  unsigned seed = 0;
  bool failed = false;
  std::string error;
  double headline = 0.0;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> notes;
  std::string provenance;  ///< operations that produced the headline number
};

struct Report {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  double headline_min = 0.0;
  double headline_max = 0.0;
  double headline_median = 0.0;
  int failures = 0;
  double elapsed_seconds = 0.0;  ///< wall clock; reported only in the JSON
  std::string env_stamp;
};

/// Runs the configured experiment over `instances` seeded instances.
/// Validation problems are all reported in one InvalidArgument error before
/// any compute; per-instance failures are recorded in their row and the run
/// continues.  Writes report.json, rows.csv, and the experiment's .dat
/// curve(s) into output_dir.
Report run_experiment(const ExperimentConfig& cfg);

/// Threshold breaches for assert-mode runs (empty means clean).  Any failed
/// instance is a breach; on top of that each experiment asserts its own
/// envelope: solve residuals at tolerance, rhi columns monotone, schauder
/// quotients non-degenerate, sparse rows verified, iterate level sums
/// contracting, and every headline finite.
std::vector<std::string> report_breaches(const Report& r);

std::string report_to_json(const Report& r);

/// CSV rows; the environment stamp is a leading "# env:" comment line, the
/// only part that may differ between reruns of an identical config.
std::string report_to_csv(const Report& r);

std::string config_to_text(const ExperimentConfig& cfg);

std::string environment_stamp();

}  // namespace ellab
