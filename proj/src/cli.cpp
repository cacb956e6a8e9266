#include "umwave/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "umwave/errors.hpp"
#include "umwave/io.hpp"
#include "umwave/metrics.hpp"
#include "umwave/objective.hpp"
#include "umwave/solvers.hpp"

namespace umwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files are written into a hidden sibling directory and moved into the
// output directory only once every file has been produced.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path out_dir) : out_dir_(std::move(out_dir)) {
    const fs::path parent = out_dir_.has_parent_path() ? out_dir_.parent_path() : fs::path(".");
    std::random_device rd;
    fs::create_directories(parent);
    staging_ = parent / fmt::format(".{}.staging-{:08x}", out_dir_.filename().string(), rd());
    fs::create_directories(staging_);
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  ~StagedOutput() {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream os(staging_ / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (staging_ / name).string());
    return os;
  }

  void commit() {
    fs::create_directories(out_dir_);
    for (const auto& name : names_) fs::rename(staging_ / name, out_dir_ / name);
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path out_dir_;
  fs::path staging_;
  std::vector<std::string> names_;
};

json solver_parameters(const ScenarioConfig& cfg) {
  const auto& s = cfg.solver;
  switch (s.algorithm) {
    case Algorithm::kGd:
      return {{"step_size", s.gd.step_size}, {"max_iters", s.gd.max_iters}, {"grad_tol", s.gd.grad_tol}};
    case Algorithm::kAgd:
      return {{"t_bar", s.agd.t_bar},         {"beta", s.agd.beta},
              {"sigma", s.agd.sigma},         {"max_iters", s.agd.max_iters},
              {"grad_tol", s.agd.grad_tol},   {"max_backtracks", s.agd.max_backtracks}};
    case Algorithm::kSvrg:
      return {{"t0", s.svrg.t0},
              {"lambda", s.svrg.lambda},
              {"m_inner", s.svrg.m_inner},
              {"max_epochs", s.svrg.max_epochs},
              {"grad_tol", s.svrg.grad_tol},
              {"sampling_mode", to_string(s.svrg.sampling_mode)}};
  }
  return json::object();
}

PrecomputeOptions precompute_options_for(bool wants_merged, int m) {
  PrecomputeOptions opts;
  opts.merged = wants_merged && merged_storage_bytes(m) <= opts.memory_cap_bytes;
  return opts;
}

void set_threads(int threads) { Eigen::setNbThreads(std::max(threads, 1)); }

}  // namespace

ScenarioConfig load_scenario_or_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse failure: ") + e.what());
  }
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) throw ConfigError("config", "manifest has no config object");
    return parse_scenario(doc["config"]);
  }
  return parse_scenario(doc);
}

int cmd_design(const DesignOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  Precompute pre;
  try {
    cfg = load_scenario_or_manifest(opts.scenario);
    set_threads(opts.threads);
    PrecomputeOptions popts;
    popts.merged = cfg.solver.algorithm != Algorithm::kSvrg;
    pre = precompute(cfg, popts);
  } catch (const Error& e) {
    err << "umwave design: " << e.what() << '\n';
    return kExitUsage;
  }

  const ProductPoint p0 = random_point(cfg, pre);
  const SolverResult res = run_solver(cfg, pre, p0);
  if (res.report.status == SolverStatus::kError) {
    err << "umwave design: solver failed: " << res.report.diagnostic << '\n';
    return kExitCheckFailed;
  }

  try {
    StagedOutput stage(opts.out_dir);
    {
      auto os = stage.open("history.csv");
      write_history_csv(os, res.report, opts.deterministic);
    }
    {
      auto os = stage.open("waveform.csv");
      write_waveform_csv(os, res.point);
    }
    {
      auto os = stage.open("beampattern.csv");
      write_beampattern_csv(os, beampattern_curve(res.point.x, res.point.alpha, cfg));
    }
    {
      auto os = stage.open("correlation.csv");
      write_correlation_csv(os, correlation_table(res.point.x, cfg));
    }
    const auto& last = res.report.records.back();
    json manifest = {
        {"manifest_version", 1},
        {"umwave_version", UMWAVE_VERSION},
        {"scenario_path", opts.scenario.string()},
        {"config", scenario_to_json(cfg)},
        {"solver", {{"algorithm", to_string(cfg.solver.algorithm)}, {"parameters", solver_parameters(cfg)}}},
        {"seed", cfg.seed},
        {"threads", opts.threads},
        {"deterministic", opts.deterministic},
        {"status", to_string(res.report.status)},
        {"iterations", last.iter},
        {"final", {{"alpha", res.point.alpha}, {"f", last.f}, {"e", last.e}, {"P", last.P}}},
    };
    std::vector<std::string> outputs = stage.names();
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    {
      auto os = stage.open("manifest.json");
      os << manifest.dump(2) << '\n';
    }
    stage.commit();
    out << fmt::format("{} {} after {} iterations: f={} e={} P={}\n", to_string(cfg.solver.algorithm),
                       to_string(res.report.status), last.iter, format_double(last.f), format_double(last.e),
                       format_double(last.P));
    out << "wrote " << opts.out_dir.string() << '\n';
  } catch (const std::exception& e) {
    err << "umwave design: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

GradcheckSummary run_gradcheck(const ScenarioConfig& cfg, int trials, bool corrupt_gradient) {
  const Precompute pre = precompute(cfg, precompute_options_for(true, cfg.m_antennas));
  const PointFunction f = [&pre](const ProductPoint& p) { return eval_f(p, pre); };

  GradcheckSummary summary;
  summary.trials = std::max(trials, 0);
  for (int trial = 0; trial < summary.trials; ++trial) {
    Rng rng = make_rng(cfg.seed, streams::kGradcheck + static_cast<std::uint64_t>(trial));
    ProductPoint p = random_point(pre, rng);
    p.alpha += std::normal_distribution<double>(0.0, 1.0)(rng) * std::max(1.0, std::abs(p.alpha));
    ProductTangent t = random_tangent(p, rng);
    t *= 1.0 / norm(t);

    ProductTangent g = full_riemannian_gradient(p, pre);
    if (corrupt_gradient) g.x *= 1.05;
    const double analytic = directional_derivative({g.alpha, g.x}, t);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < kGradcheckSteps.size(); ++s) {
      const double fd = fd_directional(p, t, f, kGradcheckSteps[s]);
      const double scale = std::max({std::abs(analytic), std::abs(fd), std::numeric_limits<double>::min()});
      const double rel = std::abs(fd - analytic) / scale;
      summary.worst_per_step[s] = std::max(summary.worst_per_step[s], rel);
      best = std::min(best, rel);
    }
    if (best > summary.worst || summary.worst_trial < 0) {
      summary.worst = std::max(summary.worst, best);
      summary.worst_trial = trial;
    }
  }
  summary.passed = summary.worst < kGradcheckThreshold;
  return summary;
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario_or_manifest(opts.scenario);
  } catch (const Error& e) {
    err << "umwave gradcheck: " << e.what() << '\n';
    return kExitUsage;
  }
  const GradcheckSummary s = run_gradcheck(cfg, opts.trials, opts.corrupt_gradient);
  for (std::size_t i = 0; i < kGradcheckSteps.size(); ++i) {
    out << fmt::format("h={:.0e} worst_rel_error={:.3e}\n", kGradcheckSteps[i], s.worst_per_step[i]);
  }
  out << fmt::format("trials={} worst_rel_error={:.3e} threshold={:.0e} {}\n", s.trials, s.worst,
                     kGradcheckThreshold, s.passed ? "PASS" : "FAIL");
  if (!s.passed) {
    err << fmt::format("umwave gradcheck: worst trial {} (seed {}, stream {})\n", s.worst_trial, cfg.seed,
                       streams::kGradcheck + static_cast<std::uint64_t>(s.worst_trial));
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  ProductPoint p{0.0, WaveformMatrix(CMatrix())};
  try {
    cfg = load_scenario_or_manifest(opts.scenario);
    p = read_waveform_csv(opts.waveform, cfg.n_samples, cfg.m_antennas);
  } catch (const Error& e) {
    err << "umwave evaluate: " << e.what() << '\n';
    return kExitUsage;
  }
  PrecomputeOptions popts;
  popts.merged = false;
  const Precompute pre = precompute(cfg, popts);
  const ObjectiveParts parts = eval_parts(p, pre);
  const CorrelationTable table = correlation_table(p.x, cfg);
  double worst_db = -std::numeric_limits<double>::infinity();
  for (const auto& c : table) {
    if (c.theta_i_deg == c.theta_j_deg && c.tau == 0) continue;
    worst_db = std::max(worst_db, c.level_db);
  }
  out << "alpha=" << format_double(p.alpha) << '\n';
  out << "e=" << format_double(parts.e) << '\n';
  out << "P=" << format_double(parts.P) << '\n';
  out << "f=" << format_double(parts.f) << '\n';
  out << "max_correlation_db=" << format_double(worst_db) << '\n';
  if (opts.out_dir) {
    try {
      StagedOutput stage(*opts.out_dir);
      {
        auto os = stage.open("beampattern.csv");
        write_beampattern_csv(os, beampattern_curve(p.x, p.alpha, cfg));
      }
      {
        auto os = stage.open("correlation.csv");
        write_correlation_csv(os, table);
      }
      stage.commit();
    } catch (const std::exception& e) {
      err << "umwave evaluate: " << e.what() << '\n';
      return kExitCheckFailed;
    }
  }
  return kExitOk;
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  std::vector<Algorithm> algorithms;
  Precompute pre;
  try {
    cfg = load_scenario_or_manifest(opts.scenario);
    if (opts.algorithms.empty()) throw ConfigError("algorithms", "no algorithm given");
    for (const auto& name : opts.algorithms) algorithms.push_back(parse_algorithm(name));
    if (!(opts.budget >= 0.0)) throw ConfigError("budget", "must be nonnegative");
    set_threads(opts.threads);
    const bool wants_merged = std::any_of(algorithms.begin(), algorithms.end(),
                                          [](Algorithm a) { return a != Algorithm::kSvrg; });
    pre = precompute(cfg, precompute_options_for(wants_merged, cfg.m_antennas));
  } catch (const Error& e) {
    err << "umwave bench: " << e.what() << '\n';
    return kExitUsage;
  }

  const double n_delays = static_cast<double>(cfg.delay_set.size());
  const ProductPoint p0 = random_point(cfg, pre);
  std::ostringstream csv;
  csv << "algorithm,grad_number_norm,iter,epoch,f,e,P,grad_norm,wall_ns\n";
  bool failed = false;
  if (opts.budget > 0.0) {
    for (Algorithm a : algorithms) {
      ScenarioConfig run_cfg = cfg;
      run_cfg.solver.algorithm = a;
      const int iters = static_cast<int>(std::floor(opts.budget));
      run_cfg.solver.gd.max_iters = iters;
      run_cfg.solver.agd.max_iters = iters;
      const double per_epoch = (n_delays + run_cfg.solver.svrg.m_inner) / n_delays;
      run_cfg.solver.svrg.max_epochs = static_cast<int>(std::floor(opts.budget / per_epoch + 1e-12));
      const SolverResult res = run_solver(run_cfg, pre, p0);
      double reached = -1.0;
      for (const auto& r : res.report.records) {
        const double norm_count = static_cast<double>(r.p_units) / n_delays;
        if (reached < 0.0 && r.P < 1.0) reached = norm_count;
        csv << to_string(a) << ',' << format_double(norm_count) << ',' << r.iter << ',' << r.epoch << ','
            << format_double(r.f) << ',' << format_double(r.e) << ',' << format_double(r.P) << ','
            << format_double(r.grad_norm) << ',' << (opts.deterministic ? 0 : r.wall_ns) << '\n';
      }
      const auto& last = res.report.records.back();
      out << fmt::format("{}: status={} f={} P={} grad_number_norm={} P<1_at={}\n", to_string(a),
                         to_string(res.report.status), format_double(last.f), format_double(last.P),
                         format_double(static_cast<double>(last.p_units) / n_delays),
                         reached < 0.0 ? std::string("never") : format_double(reached));
      if (res.report.status == SolverStatus::kError) {
        err << "umwave bench: " << to_string(a) << " failed: " << res.report.diagnostic << '\n';
        failed = true;
      }
    }
  }

  try {
    StagedOutput stage(opts.out_dir);
    {
      auto os = stage.open("bench.csv");
      os << csv.str();
    }
    stage.commit();
  } catch (const std::exception& e) {
    err << "umwave bench: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace umwave::cli
