#include "core/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>

#include "core/iterate.hpp"
#include "core/norms.hpp"
#include "core/serialize.hpp"
#include "core/solver.hpp"
#include "core/sparse.hpp"
#include "json.hpp"

namespace ellab {
namespace {

const std::set<std::string> kExperiments = {"solve",        "rhi",     "schauder",
                                            "sparse-bound", "iterate", "norms"};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double* out) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

bool parse_integer(const std::string& s, long* out) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

Cube unit_domain(int n) {
  return Cube({0.5, 0.5, n == 3 ? 0.5 : 0.0}, 0.5, n);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> rhi_grid() {
  std::vector<double> qs;
  for (int j = 0; j <= 9; ++j) qs.push_back(2.1 + 0.1 * j);
  return qs;
}

std::string rhi_name(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ratio_q%.1f", q);
  return buf;
}

SolveReport solve_instance(const GeneratedInstance& inst, bool with_load) {
  EllipticProblem prob;
  prob.a = inst.a;
  prob.f = with_load ? inst.f : VectorField(inst.a.base.spec);
  prob.bc = BoundaryCondition::inherited(inst.bc_trace);
  return solve_dirichlet(prob, 1e-10);
}

void drive_solve(const ExperimentConfig& cfg, const GeneratedInstance& inst,
                 ReportRow* row) {
  const SolveReport rep = solve_instance(inst, true);
  row->headline = rep.residual;
  // timings stay out of the rows: reruns must produce identical CSV bytes
  row->values = {{"residual", rep.residual},
                 {"iterations", static_cast<double>(rep.iterations)},
                 {"damp_events", static_cast<double>(inst.damp_events)}};
  row->provenance = "generate_instance;solve_dirichlet";
  (void)cfg;
}

void drive_rhi(const ExperimentConfig& cfg, const GeneratedInstance& inst,
               ReportRow* row) {
  const SolveReport rep = solve_instance(inst, true);
  const Cube domain = inst.a.base.spec.domain;
  const Cube q_in(domain.center, 0.5 * domain.half_side, domain.n);
  const std::vector<double> qs = rhi_grid();
  const std::vector<MeyersPoint> scan = meyers_scan(rep.grad_u, q_in, qs);
  const std::vector<MeyersPoint> head =
      meyers_scan(rep.grad_u, q_in, {cfg.q});
  row->headline = head.front().ratio;
  row->values.emplace_back("ratio_at_q", head.front().ratio);
  for (const MeyersPoint& pt : scan)
    row->values.emplace_back(rhi_name(pt.q), pt.ratio);
  row->provenance = "generate_instance;solve_dirichlet;meyers_scan";
}

void drive_schauder(const ExperimentConfig& cfg, const GeneratedInstance& inst,
                    ReportRow* row) {
  const SolveReport rep = solve_instance(inst, false);
  const Cube domain = inst.a.base.spec.domain;
  const Cube q0(domain.center, 0.25 * domain.half_side, domain.n);
  const GradientBounds gb =
      gradient_bounds_from_duality(inst.a, rep.u, q0, cfg.alpha);
  row->headline = gb.holder_quotient;
  row->values = {{"holder_quotient", gb.holder_quotient},
                 {"sup_grad", gb.sup_norm},
                 {"l2_avg_grad", gb.l2_avg},
                 {"degenerate", gb.degenerate ? 1.0 : 0.0}};
  row->provenance =
      "generate_instance;solve_dirichlet;gradient_bounds_from_duality";
}

void drive_sparse(const ExperimentConfig& cfg, const GeneratedInstance& inst,
                  ReportRow* row) {
  const SolveReport rep = solve_instance(inst, true);
  const Cube domain = inst.a.base.spec.domain;
  const Cube q(domain.center, domain.half_side / 6.0, domain.n);
  const ScalarField phi = make_pairing_bump(q, 1.0, 49);
  const double p = effective_p(cfg);
  const SparseFamily fam =
      build_sparse_family(rep.grad_u, inst.g, q, phi, cfg.eps, p);
  const SparseCheck chk = verify_sparse(fam);
  const double lhs = pairing_lhs(phi, rep.grad_u, inst.g, q);
  const double rhs = sparse_rhs(fam, inst.f, inst.g, p);
  const double c_emp = rhs > 0.0 ? lhs / rhs
                       : lhs == 0.0
                           ? 0.0
                           : std::numeric_limits<double>::infinity();
  row->headline = c_emp;
  row->values = {{"lhs", lhs},
                 {"rhs", rhs},
                 {"C_emp", c_emp},
                 {"family_size", static_cast<double>(fam.cubes.size())},
                 {"epsilon", fam.epsilon},
                 {"verify_sparse", chk.valid ? 1.0 : 0.0},
                 {"worst_fraction", chk.worst_fraction},
                 {"max_overlap", static_cast<double>(chk.max_overlap)}};
  row->provenance =
      "generate_instance;solve_dirichlet;build_sparse_family;verify_sparse;"
      "pairing_lhs;sparse_rhs";
}

void drive_iterate(const ExperimentConfig& cfg, const GeneratedInstance& inst,
                   ReportRow* row) {
  const SolveReport rep = solve_instance(inst, false);
  const bool holder = cfg.coefficient_class == CoefficientClass::holder;
  const SplitVariant variant =
      holder ? SplitVariant::holder : SplitVariant::lq;
  const Cube domain = inst.a.base.spec.domain;
  const Cube q0(domain.center, domain.half_side / (holder ? 4.0 : 3.0),
                domain.n);
  const double exponent = holder ? effective_p(cfg) : cfg.q;
  const IterationTrace tr =
      run_iteration(inst.a, rep.u, inst.g, q0, 3, variant, exponent, 8,
                    row->seed, 13);
  row->headline = tr.decay_ratio;
  row->values = {{"decay_ratio", tr.decay_ratio},
                 {"truncated", tr.truncated ? 1.0 : 0.0},
                 {"levels", static_cast<double>(tr.levels.size())}};
  for (const IterationLevel& lv : tr.levels) {
    row->values.emplace_back("term_" + std::to_string(lv.k), lv.term_sum);
  }
  const std::filesystem::path out(cfg.output_dir);
  const std::string tag = "trace_" + std::to_string(row->instance);
  write_text_file((out / (tag + ".json")).string(), trace_to_json(tr));
  std::string csv = "level,term_sum,remainder\n";
  for (const IterationLevel& lv : tr.levels) {
    csv += std::to_string(lv.k) + "," + format_g17(lv.term_sum) + "," +
           format_g17(lv.remainder) + "\n";
  }
  write_text_file((out / (tag + ".csv")).string(), csv);
  row->provenance = "generate_instance;solve_dirichlet;run_iteration";
}

void drive_norms(const ExperimentConfig& cfg, const GeneratedInstance& inst,
                 ReportRow* row) {
  const GridSpec& grid = inst.a.base.spec;
  const Cube domain = grid.domain;
  const Cube q(domain.center, 0.5 * domain.half_side, domain.n);
  ScalarField rough(grid);
  for (long i = 0; i < grid.node_count(); ++i) rough.v[i] = inst.g.at(i)[0];
  const ScalarField& smooth = inst.bc_trace;
  const double p = effective_p(cfg);
  const HardyNormResult hz = hardy_z_norm(rough, q, p);
  const HardyNormResult hr = hardy_r_norm(rough, q, p);
  const double cr = campanato(smooth, q, cfg.alpha, 'r');
  const double cz = campanato(smooth, q, cfg.alpha, 'z');
  const DualityGap gap = duality_gap(smooth, rough, q, p, 'z');
  row->headline = gap.ratio;
  row->values = {{"hardy_z", hz.value},     {"hardy_r", hr.value},
                 {"campanato_r", cr},       {"campanato_z", cz},
                 {"gap_lhs", gap.lhs},      {"gap_rhs", gap.rhs},
                 {"gap_ratio", gap.ratio}};
  row->notes = {{"hardy_r_extension", hr.extension_used}};
  row->provenance =
      "generate_instance;hardy_z_norm;hardy_r_norm;campanato;duality_gap";
}

void run_one(const ExperimentConfig& cfg, ReportRow* row) {
  const GridSpec grid(unit_domain(cfg.n), cfg.m);
  GeneratedInstance inst =
      generate_instance(grid, cfg.coefficient_class, cfg.lambda, cfg.Lambda,
                        cfg.alpha, row->seed);
  if (cfg.experiment == "solve") {
    drive_solve(cfg, inst, row);
  } else if (cfg.experiment == "rhi") {
    drive_rhi(cfg, inst, row);
  } else if (cfg.experiment == "schauder") {
    drive_schauder(cfg, inst, row);
  } else if (cfg.experiment == "sparse-bound") {
    drive_sparse(cfg, inst, row);
  } else if (cfg.experiment == "iterate") {
    drive_iterate(cfg, inst, row);
  } else if (cfg.experiment == "norms") {
    drive_norms(cfg, inst, row);
  } else {
    fail(ErrorCode::Internal, "unvalidated experiment name");
  }
}

std::optional<double> metric_of(const ReportRow& row, const std::string& name) {
  for (const auto& kv : row.values)
    if (kv.first == name) return kv.second;
  return std::nullopt;
}

std::vector<double> metric_median_curve(const std::vector<ReportRow>& rows,
                                        const std::vector<std::string>& names) {
  std::vector<double> out;
  for (const std::string& name : names) {
    std::vector<double> vals;
    for (const ReportRow& row : rows) {
      if (row.failed) continue;
      if (auto v = metric_of(row, name)) vals.push_back(*v);
    }
    out.push_back(median_of(std::move(vals)));
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void emit_curves(const Report& r) {
  const std::filesystem::path out(r.config.output_dir);
  std::vector<double> xs, ys;
  for (const ReportRow& row : r.rows) {
    if (row.failed) continue;
    xs.push_back(static_cast<double>(row.instance));
    ys.push_back(row.headline);
  }
  write_dat((out / "headline.dat").string(), xs, ys);

  if (r.config.experiment == "rhi") {
    const std::vector<double> qs = rhi_grid();
    std::vector<std::string> names;
    for (double q : qs) names.push_back(rhi_name(q));
    write_dat((out / "rhi_curve.dat").string(), qs,
              metric_median_curve(r.rows, names));
  }
  if (r.config.experiment == "iterate") {
    int max_level = 0;
    for (const ReportRow& row : r.rows) {
      for (const auto& kv : row.values) {
        if (kv.first.rfind("term_", 0) == 0)
          max_level = std::max(max_level, std::atoi(kv.first.c_str() + 5));
      }
    }
    std::vector<double> levels;
    std::vector<std::string> names;
    for (int k = 0; k <= max_level; ++k) {
      levels.push_back(static_cast<double>(k));
      names.push_back("term_" + std::to_string(k));
    }
    write_dat((out / "decay.dat").string(), levels,
              metric_median_curve(r.rows, names));
  }
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["lambda"] = cfg.lambda;
  j["Lambda"] = cfg.Lambda;
  j["alpha"] = cfg.alpha;
  j["p"] = cfg.p;
  j["effective_p"] = effective_p(cfg);
  j["q"] = cfg.q;
  j["eps"] = cfg.eps;
  j["instances"] = cfg.instances;
  j["coefficient_class"] = to_string(cfg.coefficient_class);
  j["experiment"] = cfg.experiment;
  j["output_dir"] = cfg.output_dir;
  return j;
}

}  // namespace

double effective_p(const ExperimentConfig& cfg) {
  if (cfg.p > 0.0) return cfg.p;
  return static_cast<double>(cfg.n) / (cfg.n + cfg.alpha);
}

ExperimentConfig parse_config_text(const std::string& text,
                                   std::vector<std::string>* problems) {
  ExperimentConfig cfg;
  size_t start = 0;
  int line_no = 0;
  auto problem = [&](const std::string& msg) {
    if (problems != nullptr)
      problems->push_back("line " + std::to_string(line_no) + ": " + msg);
  };
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    // strip comments (a '#' outside quotes)
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      problem("expected 'key = value': " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    const std::string value = unquote(raw);
    long iv = 0;
    double rv = 0.0;
    if (key == "seed") {
      if (parse_integer(value, &iv) && iv >= 0)
        cfg.seed = static_cast<unsigned>(iv);
      else
        problem("seed must be a non-negative integer, got '" + raw + "'");
    } else if (key == "n") {
      if (parse_integer(value, &iv)) cfg.n = static_cast<int>(iv);
      else problem("n must be an integer, got '" + raw + "'");
    } else if (key == "m") {
      if (parse_integer(value, &iv)) cfg.m = static_cast<int>(iv);
      else problem("m must be an integer, got '" + raw + "'");
    } else if (key == "instances") {
      if (parse_integer(value, &iv)) cfg.instances = static_cast<int>(iv);
      else problem("instances must be an integer, got '" + raw + "'");
    } else if (key == "lambda") {
      if (parse_real(value, &rv)) cfg.lambda = rv;
      else problem("lambda must be a real, got '" + raw + "'");
    } else if (key == "Lambda") {
      if (parse_real(value, &rv)) cfg.Lambda = rv;
      else problem("Lambda must be a real, got '" + raw + "'");
    } else if (key == "alpha") {
      if (parse_real(value, &rv)) cfg.alpha = rv;
      else problem("alpha must be a real, got '" + raw + "'");
    } else if (key == "p") {
      if (parse_real(value, &rv)) cfg.p = rv;
      else problem("p must be a real, got '" + raw + "'");
    } else if (key == "q") {
      if (parse_real(value, &rv)) cfg.q = rv;
      else problem("q must be a real, got '" + raw + "'");
    } else if (key == "eps") {
      if (parse_real(value, &rv)) cfg.eps = rv;
      else problem("eps must be a real, got '" + raw + "'");
    } else if (key == "coefficient_class") {
      try {
        cfg.coefficient_class = coefficient_class_from_string(value);
      } catch (const Error& e) {
        problem(e.what());
      }
    } else if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      problem("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path,
                                   std::vector<std::string>* problems) {
  return parse_config_text(read_text_file(path), problems);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.n != 2 && cfg.n != 3) out.push_back("n must be 2 or 3");
  if (cfg.m < 9 || cfg.m % 2 == 0)
    out.push_back("m must be an odd node count >= 9");
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
    out.push_back("lambda must be a positive real");
  if (!(cfg.Lambda >= cfg.lambda) || !std::isfinite(cfg.Lambda))
    out.push_back("Lambda must satisfy Lambda >= lambda");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    out.push_back("alpha must lie in (0,1)");
  if (cfg.p != 0.0) {
    const double lower = static_cast<double>(cfg.n) / (cfg.n + 1);
    if (!(cfg.p > lower && cfg.p <= 1.0)) {
      out.push_back("p must lie in (n/(n+1), 1]");
    } else if (cfg.alpha > 0.0 && cfg.alpha < 1.0) {
      const double tied = static_cast<double>(cfg.n) / (cfg.n + cfg.alpha);
      if (std::abs(cfg.p - tied) > 1e-9 * tied)
        out.push_back("p and alpha are tied: p must equal n/(n+alpha) "
                      "(leave p unset to derive it)");
    }
  }
  if (!(cfg.q > 2.0) || !std::isfinite(cfg.q))
    out.push_back("q must be a real > 2");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
    out.push_back("eps must lie in (0,1)");
  if (cfg.instances < 1) out.push_back("instances must be >= 1");
  if (kExperiments.count(cfg.experiment) == 0)
    out.push_back("experiment must be one of solve | rhi | schauder | "
                  "sparse-bound | iterate | norms");
  if (cfg.output_dir.empty()) out.push_back("output_dir must be non-empty");
  return out;
}

Report run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> problems = validate_config(cfg);
  if (!problems.empty()) {
    std::string all = "invalid config:";
    for (const std::string& p : problems) all += "\n  - " + p;
    fail(ErrorCode::InvalidArgument, all);
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  require(!ec, ErrorCode::IoError,
          "cannot create output_dir '" + cfg.output_dir + "': " + ec.message());

  Report r;
  r.config = cfg;
  r.env_stamp = environment_stamp();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < cfg.instances; ++i) {
    ReportRow row;
    row.instance = i;
    row.seed = cfg.seed + static_cast<unsigned>(i);
    try {
      run_one(cfg, &row);
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = std::string("unexpected: ") + e.what();
    }
    if (row.failed) ++r.failures;
    r.rows.push_back(std::move(row));
  }
  r.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::vector<double> headlines;
  for (const ReportRow& row : r.rows)
    if (!row.failed) headlines.push_back(row.headline);
  if (!headlines.empty()) {
    r.headline_min = *std::min_element(headlines.begin(), headlines.end());
    r.headline_max = *std::max_element(headlines.begin(), headlines.end());
    r.headline_median = median_of(headlines);
  }

  const std::filesystem::path out(cfg.output_dir);
  write_text_file((out / "report.json").string(), report_to_json(r));
  write_text_file((out / "rows.csv").string(), report_to_csv(r));
  emit_curves(r);
  return r;
}

std::vector<std::string> report_breaches(const Report& r) {
  std::vector<std::string> out;
  auto tag = [](const ReportRow& row) {
    return "instance " + std::to_string(row.instance);
  };
  for (const ReportRow& row : r.rows) {
    if (row.failed) {
      out.push_back(tag(row) + " failed: " + row.error);
      continue;
    }
    if (!std::isfinite(row.headline)) {
      out.push_back(tag(row) + ": non-finite headline");
      continue;
    }
    if (r.config.experiment == "solve" && row.headline > 1e-10) {
      out.push_back(tag(row) + ": residual above solver tolerance");
    } else if (r.config.experiment == "rhi") {
      double prev = 0.0;
      for (const auto& kv : row.values) {
        if (kv.first.rfind("ratio_q", 0) != 0) continue;
        if (kv.second < prev - 1e-12) {
          out.push_back(tag(row) + ": ratio columns not monotone");
          break;
        }
        prev = kv.second;
      }
    } else if (r.config.experiment == "schauder") {
      if (auto v = metric_of(row, "degenerate"); v && *v != 0.0)
        out.push_back(tag(row) + ": degenerate gradient bound");
    } else if (r.config.experiment == "sparse-bound") {
      if (auto v = metric_of(row, "verify_sparse"); v && *v != 1.0)
        out.push_back(tag(row) + ": sparse family failed verification");
    } else if (r.config.experiment == "iterate") {
      if (row.headline >= 1.0)
        out.push_back(tag(row) + ": level sums are not contracting");
    }
  }
  return out;
}

std::string report_to_json(const Report& r) {
  nlohmann::json j;
  j["config"] = config_json(r.config);
  j["env"] = r.env_stamp;
  j["aggregate"] = {{"headline_min", r.headline_min},
                    {"headline_max", r.headline_max},
                    {"headline_median", r.headline_median},
                    {"failures", r.failures},
                    {"instances", static_cast<int>(r.rows.size())},
                    {"elapsed_seconds", r.elapsed_seconds}};
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& row : r.rows) {
    nlohmann::json jr;
    jr["instance"] = row.instance;
    jr["seed"] = row.seed;
    jr["failed"] = row.failed;
    jr["headline"] = row.headline;
    jr["provenance"] = row.provenance;
    if (row.failed) jr["error"] = row.error;
    nlohmann::json vals;
    for (const auto& kv : row.values) vals[kv.first] = kv.second;
    jr["values"] = vals;
    for (const auto& kv : row.notes) jr[kv.first] = kv.second;
    j["rows"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& r) {
  std::string out = "# env: " + r.env_stamp + "\n";
  std::vector<std::string> metric_names, note_names;
  for (const ReportRow& row : r.rows) {
    if (row.failed) continue;
    for (const auto& kv : row.values) metric_names.push_back(kv.first);
    for (const auto& kv : row.notes) note_names.push_back(kv.first);
    break;
  }
  out += "instance,seed,failed,headline,provenance";
  for (const std::string& name : metric_names) out += "," + name;
  for (const std::string& name : note_names) out += "," + name;
  out += ",error\n";
  for (const ReportRow& row : r.rows) {
    out += std::to_string(row.instance) + "," + std::to_string(row.seed) +
           "," + (row.failed ? "1" : "0") + "," + format_g17(row.headline) +
           "," + csv_quote(row.provenance);
    for (const std::string& name : metric_names) {
      out += ",";
      if (auto v = metric_of(row, name)) out += format_g17(*v);
    }
    for (const std::string& name : note_names) {
      out += ",";
      for (const auto& kv : row.notes)
        if (kv.first == name) out += csv_quote(kv.second);
    }
    out += "," + csv_quote(row.error) + "\n";
  }
  return out;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::string out;
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "n = " + std::to_string(cfg.n) + "\n";
  out += "m = " + std::to_string(cfg.m) + "\n";
  out += "lambda = " + format_g17(cfg.lambda) + "\n";
  out += "Lambda = " + format_g17(cfg.Lambda) + "\n";
  out += "alpha = " + format_g17(cfg.alpha) + "\n";
  out += "p = " + format_g17(cfg.p) + "\n";
  out += "q = " + format_g17(cfg.q) + "\n";
  out += "eps = " + format_g17(cfg.eps) + "\n";
  out += "instances = " + std::to_string(cfg.instances) + "\n";
  out += "coefficient_class = \"" + to_string(cfg.coefficient_class) + "\"\n";
  out += "experiment = \"" + cfg.experiment + "\"\n";
  out += "output_dir = \"" + cfg.output_dir + "\"\n";
  return out;
}

std::string environment_stamp() {
  std::string s = "gcc ";
  s += __VERSION__;
  s += "; " + std::to_string(sizeof(void*) * 8) + "-bit";
#ifdef __linux__
  s += " linux";
#endif
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  s += "; run ";
  s += buf;
  return s;
}

}  // namespace ellab
