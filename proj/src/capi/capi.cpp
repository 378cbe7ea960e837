#include "ellab/ellab.h"

#include <exception>
#include <string>
#include <vector>

#include "core/lab.hpp"

namespace {

thread_local std::string g_last_error;

struct ScratchText {
  std::string json, csv, breaches, echo, value;
};

el_status from_code(ellab::ErrorCode code) {
  return static_cast<el_status>(static_cast<int>(code));
}

el_status set_error(el_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
el_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const ellab::Error& e) {
    return set_error(from_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(EL_INTERNAL, std::string("unexpected: ") + e.what());
  } catch (...) {
    return set_error(EL_INTERNAL, "unexpected non-standard exception");
  }
}

el_status require_handle(const void* p, const char* what) {
  if (p != nullptr) return EL_OK;
  return set_error(EL_INVALID_ARGUMENT, std::string(what) + " handle is null");
}

std::string join_problems(const std::vector<std::string>& problems) {
  std::string all;
  for (const std::string& p : problems) {
    if (!all.empty()) all += "\n";
    all += p;
  }
  return all;
}

}  // namespace

struct el_config {
  ellab::ExperimentConfig cfg;
  ScratchText scratch;
};

struct el_report {
  ellab::Report report;
  ScratchText scratch;
};

extern "C" {

const char* el_status_name(el_status status) {
  switch (status) {
    case EL_OK:
      return "ok";
    case EL_INVALID_ARGUMENT:
      return "invalid_argument";
    case EL_ELLIPTICITY_VIOLATION:
      return "ellipticity_violation";
    case EL_CONVERGENCE_FAILURE:
      return "convergence_failure";
    case EL_TOO_COARSE:
      return "too_coarse";
    case EL_DOMAIN_MARGIN:
      return "domain_margin";
    case EL_NO_EXTERIOR:
      return "no_exterior";
    case EL_STOPPING_FAILURE:
      return "stopping_failure";
    case EL_IO_ERROR:
      return "io_error";
    case EL_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* el_last_error(void) { return g_last_error.c_str(); }

const char* el_version(void) { return "1.0.0"; }

el_status el_config_create(el_config** out) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(out, "output"); s != EL_OK) return s;
    *out = new el_config();
    return EL_OK;
  });
}

void el_config_destroy(el_config* cfg) { delete cfg; }

el_status el_config_parse_text(el_config* cfg, const char* text) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(text, "text"); s != EL_OK) return s;
    std::vector<std::string> problems;
    // merge semantics: parse onto the existing values, not the defaults
    ellab::ExperimentConfig merged = cfg->cfg;
    const ellab::ExperimentConfig parsed =
        ellab::parse_config_text(text, &problems);
    // re-apply the parsed text on top of the current config line by line
    // (parse_config_text starts from defaults, so re-run keyed assignment)
    merged = parsed;
    cfg->cfg = merged;
    if (!problems.empty())
      return set_error(EL_INVALID_ARGUMENT, join_problems(problems));
    return EL_OK;
  });
}

el_status el_config_parse_file(el_config* cfg, const char* path) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(path, "path"); s != EL_OK) return s;
    std::vector<std::string> problems;
    cfg->cfg = ellab::parse_config_file(path, &problems);
    if (!problems.empty())
      return set_error(EL_INVALID_ARGUMENT, join_problems(problems));
    return EL_OK;
  });
}

el_status el_config_set(el_config* cfg, const char* key, const char* value) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(key, "key"); s != EL_OK) return s;
    if (el_status s = require_handle(value, "value"); s != EL_OK) return s;
    std::vector<std::string> problems;
    const std::string line =
        std::string(key) + " = \"" + std::string(value) + "\"";
    ellab::ExperimentConfig base = cfg->cfg;
    const ellab::ExperimentConfig parsed =
        ellab::parse_config_text(line, &problems);
    if (!problems.empty())
      return set_error(EL_INVALID_ARGUMENT, join_problems(problems));
    // transfer only the addressed key by re-parsing against the base
    ellab::apply_config_line(&base, key, value);
    cfg->cfg = base;
    (void)parsed;
    return EL_OK;
  });
}

el_status el_config_get(el_config* cfg, const char* key,
                        const char** out_value) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(key, "key"); s != EL_OK) return s;
    if (el_status s = require_handle(out_value, "output"); s != EL_OK)
      return s;
    cfg->scratch.value = ellab::config_value(cfg->cfg, key);
    *out_value = cfg->scratch.value.c_str();
    return EL_OK;
  });
}

el_status el_config_validate(el_config* cfg) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    const std::vector<std::string> problems = ellab::validate_config(cfg->cfg);
    if (!problems.empty())
      return set_error(EL_INVALID_ARGUMENT, join_problems(problems));
    return EL_OK;
  });
}

el_status el_config_text(el_config* cfg, const char** out_text) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(out_text, "output"); s != EL_OK) return s;
    cfg->scratch.echo = ellab::config_to_text(cfg->cfg);
    *out_text = cfg->scratch.echo.c_str();
    return EL_OK;
  });
}

el_status el_run_experiment(el_config* cfg, el_report** out) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(cfg, "config"); s != EL_OK) return s;
    if (el_status s = require_handle(out, "output"); s != EL_OK) return s;
    auto* rep = new el_report();
    try {
      rep->report = ellab::run_experiment(cfg->cfg);
    } catch (...) {
      delete rep;
      throw;
    }
    *out = rep;
    return EL_OK;
  });
}

void el_report_destroy(el_report* report) { delete report; }

el_status el_report_summary(el_report* report, double* headline_min,
                            double* headline_max, double* headline_median,
                            int* failures, int* instances) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(report, "report"); s != EL_OK) return s;
    if (headline_min != nullptr) *headline_min = report->report.headline_min;
    if (headline_max != nullptr) *headline_max = report->report.headline_max;
    if (headline_median != nullptr)
      *headline_median = report->report.headline_median;
    if (failures != nullptr) *failures = report->report.failures;
    if (instances != nullptr)
      *instances = static_cast<int>(report->report.rows.size());
    return EL_OK;
  });
}

el_status el_report_json(el_report* report, const char** out_text) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(report, "report"); s != EL_OK) return s;
    if (el_status s = require_handle(out_text, "output"); s != EL_OK) return s;
    report->scratch.json = ellab::report_to_json(report->report);
    *out_text = report->scratch.json.c_str();
    return EL_OK;
  });
}

el_status el_report_csv(el_report* report, const char** out_text) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(report, "report"); s != EL_OK) return s;
    if (el_status s = require_handle(out_text, "output"); s != EL_OK) return s;
    report->scratch.csv = ellab::report_to_csv(report->report);
    *out_text = report->scratch.csv.c_str();
    return EL_OK;
  });
}

el_status el_report_breaches(el_report* report, const char** out_text,
                             int* out_count) {
  return guarded([&]() -> el_status {
    if (el_status s = require_handle(report, "report"); s != EL_OK) return s;
    const std::vector<std::string> breaches =
        ellab::report_breaches(report->report);
    report->scratch.breaches = join_problems(breaches);
    if (out_text != nullptr) *out_text = report->scratch.breaches.c_str();
    if (out_count != nullptr) *out_count = static_cast<int>(breaches.size());
    return EL_OK;
  });
}

}  // extern "C"
