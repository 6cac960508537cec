#include "secjam/cli.hpp"

#include "secjam/config.hpp"
#include "secjam/planner.hpp"
#include "secjam/results_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace secjam::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string scheme;
  std::vector<std::string> schemes;
  std::string sweep_param;
  std::vector<std::string> values;
  std::string out = "out";
  int jobs = 1;
  std::optional<double> eps_override;
  std::optional<double> horizon_override;
  bool timing = false;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Scenario load_with_overrides(const Flags& f) {
  Scenario s = load_scenario(f.config);
  if (f.horizon_override) s = with_override(s, "horizon_s", *f.horizon_override);
  if (f.eps_override) s = with_override(s, "eve_eps_m", *f.eps_override);
  return s;
}

struct Timed {
  Plan plan;
  double wall_ms = 0.0;
};

Timed timed_run(const Scenario& s, Scheme scheme, bool timing) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed r{run_scheme(s, scheme), 0.0};
  if (timing) r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int cmd_single(const Flags& f, Scheme scheme, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = load_with_overrides(f);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }
  const auto r = timed_run(s, scheme, f.timing);
  try {
    write_plan(f.out, r.plan, s, r.wall_ms);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOutput;
  }
  out << to_string(scheme) << " avg_rbar=" << num(r.plan.avg_rbar) << " avg_rtilde=" << num(r.plan.avg_rtilde)
      << " outer_rounds=" << r.plan.outer_rounds << " -> " << f.out << "\n";
  if (r.plan.failed) {
    err << "error: solver failure: " << r.plan.message << "\n";
    return kSolverFailure;
  }
  return kOk;
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
  // Parsed here rather than by CLI11 so an empty token is a usage error, not 0.
  std::vector<double> values;
  for (const auto& tok : f.values) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) {
      err << "error: --values: '" << tok << "' is not a number\n";
      return kUsage;
    }
    values.push_back(v);
  }
  if (values.empty()) {
    err << "error: --values needs at least one value\n";
    return kUsage;
  }
  std::vector<Scheme> schemes;
  for (const auto& name : f.schemes.empty() ? std::vector<std::string>{"proposed", "fhf_adaptive", "fhf_constant"}
                                            : f.schemes) {
    auto sc = parse_scheme(name);
    if (!sc) {
      err << "error: unknown scheme '" << name << "'\n";
      return kUsage;
    }
    schemes.push_back(*sc);
  }
  std::stable_sort(values.begin(), values.end());

  Scenario base;
  try {
    base = load_with_overrides(f);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  struct Point {
    double value;
    Scheme scheme;
    Scenario s;
  };
  std::vector<Point> points;
  for (double v : values) {
    Scenario s;
    try {
      s = with_override(base, f.sweep_param, v);
    } catch (const ConfigError& e) {
      err << "error: " << f.sweep_param << " = " << short_num(v) << ": " << e.what() << "\n";
      return kConfig;
    }
    for (Scheme sc : schemes) points.push_back({v, sc, s});
  }

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& p = points[i];
      SweepRow& row = rows[i];
      row.param = f.sweep_param;
      row.value = p.value;
      row.dir = f.sweep_param + "_" + short_num(p.value) + "/" + to_string(p.scheme);
      try {
        const auto r = timed_run(p.s, p.scheme, f.timing);
        row.summary = summary_row(r.plan, p.s, r.wall_ms);
        write_plan(fs::path(f.out) / row.dir, r.plan, p.s, r.wall_ms);
        row.status = r.plan.failed ? "solver_failure" : "ok";
        row.message = r.plan.message;
      } catch (const std::exception& e) {
        row.summary.scheme = to_string(p.scheme);
        row.summary.horizon_s = p.s.horizon();
        row.summary.eps_m = p.s.eve_uncertainty;
        row.status = "error";
        row.message = e.what();
      }
      std::lock_guard lock(log_mutex);
      out << row.dir << ": " << row.status;
      if (row.status == "ok") out << " avg_rbar=" << num(row.summary.avg_rbar);
      out << "\n";
    }
  };
  const int jobs = std::clamp(f.jobs, 1, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  try {
    fs::create_directories(f.out);
    write_file_atomic(fs::path(f.out) / "sweep.csv", format_sweep_csv(rows));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOutput;
  }
  const auto bad = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; });
  if (bad > 0) {
    err << "error: " << bad << " of " << rows.size() << " sweep points failed\n";
    return kSolverFailure;
  }
  return kOk;
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = load_with_overrides(f);
    out << "PASS " << f.config << ": N=" << s.num_slots << " slots of " << num(s.slot_duration) << " s\n";
    return kOk;
  } catch (const ConfigError& e) {
    err << "FAIL " << f.config << ": " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace

Scenario with_override(Scenario s, const std::string& param, double value) {
  if (param == "horizon_s") {
    const double slots = value / s.slot_duration;
    const double rounded = std::round(slots);
    if (!(std::abs(slots - rounded) <= 1e-9 * std::max(1.0, rounded)) || rounded > 1e7)
      throw ConfigError(ConfigError::Kind::validation, "horizon_s", 0,
                        "horizon_s must be an integer multiple of slot_s");
    s.num_slots = static_cast<int>(rounded);
  } else if (param == "eve_eps_m") {
    s.eve_uncertainty = value;
  } else {
    throw ConfigError(ConfigError::Kind::validation, param, 0, "cannot override '" + param + "'");
  }
  if (const auto report = validate(s); !report.ok())
    throw ConfigError(ConfigError::Kind::validation, report.violations.front().field, 0,
                      "invalid scenario: " + report.to_string());
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secure UAV jamming planner"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "Scenario file")->required();
    sub->add_option("--eps-override", f.eps_override, "Replace eve_eps_m (m)");
    sub->add_option("--horizon-override", f.horizon_override, "Replace horizon_s (s)");
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_flag("--timing", f.timing, "Record wall-clock time (summary wall_ms; otherwise 0)");
  };

  auto* optimize = app.add_subcommand("optimize", "Run one scheme (default proposed) and write CSVs");
  add_common(optimize);
  add_run(optimize);
  optimize->add_option("--scheme", f.scheme, "proposed | fhf_constant | fhf_adaptive");

  auto* baseline = app.add_subcommand("baseline", "Run a fly-hover-fly baseline and write CSVs");
  add_common(baseline);
  add_run(baseline);
  baseline->add_option("--scheme", f.scheme, "fhf_constant | fhf_adaptive")->required();

  auto* sweep = app.add_subcommand("sweep", "Run schemes over a list of horizon_s or eve_eps_m values");
  add_common(sweep);
  add_run(sweep);
  sweep->add_option("--sweep-param", f.sweep_param, "horizon_s | eve_eps_m")
      ->required()
      ->check(CLI::IsMember({"horizon_s", "eve_eps_m"}));
  sweep->add_option("--values", f.values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--scheme", f.schemes, "Comma-separated schemes (default: all three)")->delimiter(',');
  sweep->add_option("--jobs", f.jobs, "Concurrent sweep points")->capture_default_str()->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Load a scenario and report whether it is valid");
  add_common(validate_cmd);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (optimize->parsed() || baseline->parsed()) {
    const std::string name = f.scheme.empty() ? "proposed" : f.scheme;
    const auto scheme = parse_scheme(name);
    if (!scheme || (baseline->parsed() && *scheme == Scheme::proposed)) {
      err << "error: unknown scheme '" << name << "' for " << (baseline->parsed() ? "baseline" : "optimize")
          << "\n";
      return kUsage;
    }
    return cmd_single(f, *scheme, out, err);
  }
  if (sweep->parsed()) return cmd_sweep(f, out, err);
  return cmd_validate(f, out, err);
}

}  // namespace secjam::cli
