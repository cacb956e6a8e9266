// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails. Usage: umwave_acceptance <scenarios dir>

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "umwave/cli.hpp"
#include "umwave/manifold.hpp"
#include "umwave/metrics.hpp"
#include "umwave/objective.hpp"
#include "umwave/scenario.hpp"
#include "umwave/solvers.hpp"

using namespace umwave;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr int kGradcheckTrials = 20;
constexpr double kGradcheckTol = 1e-4;
constexpr double kGradcheckSeconds = 10.0;

constexpr int kManifoldCases = 100;
constexpr double kProjectionTol = 1e-12;
constexpr double kTangencyTol = 1e-12;
constexpr double kModulusTol = 1e-12;
constexpr double kRigidityTol = 1e-5;
constexpr double kManifoldSeconds = 5.0;

constexpr int kArmijoIters = 2000;
constexpr double kArmijoSeconds = 600.0;

// Both solvers pick their best step from the same grid 1e-7 * 2^k.
constexpr int kStepGridLo = -2;
constexpr int kStepGridHi = 6;
constexpr int kRaceIters = 2000;

constexpr double kQualityTbar = 6.4e-6;
constexpr int kQualityIters = 200000;
constexpr double kMainlobeRatio = 10.0;
constexpr double kCorrelationDb = -60.0;
constexpr int kQualityTauMax = 16;

constexpr double kUnbiasedTol = 1e-9;
constexpr double kSvrgStructSeconds = 5.0;

constexpr int kScalingSteps = 1500;
constexpr int kScalingRepeats = 3;
constexpr double kScalingRatio = 1.5;

constexpr double kBudget = 200.0;
const std::vector<double> kGdSteps = {1e-9, 2e-9, 3e-9, 4e-9, 6e-9};

constexpr double kMergedTol = 1e-9;
constexpr double kSparsePTol = 1e-10;
constexpr double kOracleSeconds = 5.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  fmt::print("[{}] criterion {}: {}\n", pass ? "PASS" : "FAIL", id, what);
  std::fflush(stdout);
  failures += !pass;
}

CMatrix gaussian(Eigen::Index n, Eigen::Index m, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, m);
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double re = g(rng);
    const double im = g(rng);
    z.data()[k] = cdouble(re, im);
  }
  return z;
}

// First iteration whose P is below one, or -1.
long first_below_one(const SolverReport& r) {
  for (const auto& rec : r.records) {
    if (rec.P < 1.0) return rec.iter;
  }
  return -1;
}

void criterion_gradcheck(const fs::path& dir) {
  const auto t0 = Clock::now();
  const auto cfg = load_scenario(dir / "gradcheck.json");
  const auto s = cli::run_gradcheck(cfg, kGradcheckTrials, false);
  const double secs = seconds_since(t0);
  const double at_1e6 = s.worst_per_step[1];
  const bool ok = s.trials >= kGradcheckTrials && cfg.angle_grid.size() == 37 && at_1e6 < kGradcheckTol &&
                  secs < kGradcheckSeconds;
  report(1, ok,
         fmt::format("gradcheck M={} N={} |Theta|={} |D|={}: {} trials, worst rel err at h=1e-6 {:.3e} (< {:.0e}), "
                     "{:.2f} s (< {} s)",
                     cfg.m_antennas, cfg.n_samples, cfg.angle_grid.size(), cfg.delay_set.size(), s.trials, at_1e6,
                     kGradcheckTol, secs, kGradcheckSeconds));
}

void criterion_manifold() {
  const auto t0 = Clock::now();
  Rng rng = make_rng(2024, 0);
  std::uniform_int_distribution<int> dim_n(1, 64), dim_m(1, 16);
  double idem = 0, tang = 0, modulus = 0, rigid = 0, transport = 0;
  for (int c = 0; c < kManifoldCases; ++c) {
    const int n = dim_n(rng);
    const int m = dim_m(rng);
    const auto x = random_waveform(n, m, rng);
    const CMatrix z = gaussian(n, m, rng);
    const CMatrix pz = project_tangent(x, z);
    idem = std::max(idem, (project_tangent(x, pz) - pz).norm() / std::max(1.0, pz.norm()));
    tang = std::max(tang, tangency_defect(x, pz) / std::max(1.0, z.cwiseAbs().maxCoeff()));

    const ProductPoint p{0.0, x};
    ProductTangent t = random_tangent(p, rng);
    t *= 5.0 / norm(t) * (1.0 + c % 7);
    modulus = std::max(modulus, retract(p, t).x.max_modulus_error());

    const double h = 1e-7;
    const CMatrix d = (retract(p, h * t).x.matrix() - retract(p, -h * t).x.matrix()) / (2 * h);
    rigid = std::max(rigid, (d - t.x).norm() / t.x.norm());

    const ProductPoint target{1.0, random_waveform(n, m, rng)};
    const ProductTangent moved = transport_to(target, t);
    transport = std::max(transport, tangency_defect(target.x, moved.x) / std::max(1.0, t.x.cwiseAbs().maxCoeff()));
  }
  const double secs = seconds_since(t0);
  const bool ok = idem < kProjectionTol && tang < kTangencyTol && modulus < kModulusTol && rigid < kRigidityTol &&
                  transport < kTangencyTol && secs < kManifoldSeconds;
  report(2, ok,
         fmt::format("manifold suite, {} cases each: idempotence {:.1e}, tangency {:.1e}, unit modulus {:.1e}, "
                     "rigidity {:.1e} (< {:.0e}), transport tangency {:.1e}, {:.2f} s (< {} s)",
                     kManifoldCases, idem, tang, modulus, rigid, kRigidityTol, transport, secs, kManifoldSeconds));
}

void criterion_armijo(const ScenarioConfig& cfg, const Precompute& pre, const ProductPoint& p0) {
  const auto t0 = Clock::now();
  AgdConfig agd = cfg.solver.agd;
  agd.max_iters = kArmijoIters;
  agd.grad_tol = 0.0;
  const auto res = run_um_agd(p0, agd, pre);
  const double secs = seconds_since(t0);
  const auto& r = res.report.records;
  long rises = 0, violations = 0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    rises += r[k + 1].f > r[k].f;
    violations += r[k].f - r[k + 1].f < agd.sigma * r[k].step * r[k].grad_norm_sq;
  }
  const bool ok = res.report.status == SolverStatus::kMaxIters && r.size() == kArmijoIters + 1 && rises == 0 &&
                  violations == 0 && secs < kArmijoSeconds;
  report(3, ok,
         fmt::format("UM-AGD {} iterations on M={} N={}: status {}, {} increases of f, {} sufficient-decrease "
                     "violations, f {:.6e} -> {:.6e}, {:.1f} s",
                     r.size() - 1, cfg.m_antennas, cfg.n_samples, to_string(res.report.status), rises, violations,
                     r.front().f, r.back().f, secs));
}

void criterion_race(const Precompute& pre, const ProductPoint& p0) {
  long best_gd = -1, best_agd = -1;
  double gd_step = 0, agd_tbar = 0;
  auto better = [](long a, long b) { return a >= 0 && (b < 0 || a < b); };
  for (int k = kStepGridLo; k <= kStepGridHi; ++k) {
    const double t = 1e-7 * std::ldexp(1.0, k);
    GdConfig gd;
    gd.step_size = t;
    gd.max_iters = kRaceIters;
    const long g = first_below_one(run_um_gd(p0, gd, pre).report);
    if (better(g, best_gd)) {
      best_gd = g;
      gd_step = t;
    }
    AgdConfig agd;
    agd.t_bar = t;
    agd.max_iters = kRaceIters;
    const long a = first_below_one(run_um_agd(p0, agd, pre).report);
    if (better(a, best_agd)) {
      best_agd = a;
      agd_tbar = t;
    }
  }
  const bool ok = best_agd >= 0 && (best_gd < 0 || best_agd < best_gd);
  const std::string ratio =
      best_agd > 0 && best_gd > 0 ? fmt::format("{:.2f}", static_cast<double>(best_gd) / best_agd) : "n/a";
  report(4, ok,
         fmt::format("first iteration with P < 1, best step on the grid 1e-7*2^[{},{}]: UM-AGD {} (t_bar {:.1e}), "
                     "UM-GD {} (step {:.1e}), GD/AGD ratio {}",
                     kStepGridLo, kStepGridHi, best_agd, agd_tbar, best_gd, gd_step, ratio));
}

void criterion_quality(const ScenarioConfig& cfg, const Precompute& pre, const ProductPoint& p0) {
  AgdConfig agd;
  agd.t_bar = kQualityTbar;
  agd.max_iters = kQualityIters;
  const auto res = run_um_agd(p0, agd, pre);

  const auto curve = beampattern_curve(res.point.x, res.point.alpha, cfg);
  double main_sum = 0, side_sum = 0, main_min = std::numeric_limits<double>::infinity();
  long main_n = 0, side_n = 0;
  for (const auto& pt : curve) {
    if (desired_beampattern(pt.angle_deg, cfg) > 0) {
      main_sum += pt.power;
      main_min = std::min(main_min, pt.power);
      ++main_n;
    } else {
      side_sum += pt.power;
      ++side_n;
    }
  }
  const double side_mean = side_sum / side_n;
  const double mean_ratio = main_sum / main_n / side_mean;

  double worst = -std::numeric_limits<double>::infinity(), best = std::numeric_limits<double>::infinity();
  for (const auto& c : correlation_table(res.point.x, cfg)) {
    if (c.tau < 1 || c.tau > kQualityTauMax) continue;
    worst = std::max(worst, c.level_db);
    best = std::min(best, c.level_db);
  }
  const bool ok_a = mean_ratio >= kMainlobeRatio;
  const bool ok_b = worst < kCorrelationDb;
  report(5, ok_a && ok_b,
         fmt::format("UM-AGD t_bar {:.1e}, {} iterations (P {:.3e}): (a) mean mainlobe / mean sidelobe power {:.2f} "
                     "(>= {}), weakest mainlobe point {:.2f}x [{}]; (b) correlation levels over tau in [1,{}] "
                     "span {:.1f} .. {:.1f} dB (max < {} dB) [{}]",
                     kQualityTbar, res.report.records.size() - 1, res.report.records.back().P, mean_ratio,
                     kMainlobeRatio, main_min / side_mean, ok_a ? "pass" : "fail", kQualityTauMax, best, worst,
                     kCorrelationDb, ok_b ? "pass" : "fail"));
}

void criterion_svrg_structure() {
  const auto t0 = Clock::now();
  const auto cfg = fixture::small(2, 6, 20.0, 3);  // |Theta| = 8, |D| = 4
  const auto pre = precompute(cfg);
  const auto snap = fixture::point(cfg, pre);
  const ProductTangent full = full_riemannian_gradient(snap, pre);

  bool identical = true;
  for (Eigen::Index k = 0; k < pre.grid_size(); ++k) {
    for (int tau : pre.delays) {
      const auto d = svrg_direction(snap, snap, full, k, tau, pre, SamplingMode::kUnbiased, true);
      identical = identical && d.alpha == full.alpha && d.x == full.x;
    }
  }

  Rng rng = make_rng(cfg.seed, 77);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    ProductTangent t = random_tangent(snap, rng);
    t *= 0.1 / norm(t);
    const ProductPoint x = retract(snap, t);
    ProductTangent mean{0.0, CMatrix::Zero(cfg.n_samples, cfg.m_antennas)};
    const double count = static_cast<double>(pre.grid_size()) * pre.delays.size();
    for (Eigen::Index k = 0; k < pre.grid_size(); ++k) {
      for (int tau : pre.delays) {
        const auto d = svrg_direction(x, snap, full, k, tau, pre, SamplingMode::kUnbiased, false);
        mean.alpha += d.alpha / count;
        mean.x += d.x / count;
      }
    }
    const ProductTangent g = full_riemannian_gradient(x, pre);
    worst = std::max(worst, norm(mean - g) / std::max(1.0, norm(g)));
  }
  const double secs = seconds_since(t0);
  const bool ok = identical && worst < kUnbiasedTol && secs < kSvrgStructSeconds;
  report(6, ok,
         fmt::format("SVRG on |Theta|={} |D|={}: snapshot direction bitwise equal to full gradient: {}; exhaustive "
                     "mean vs full gradient rel err {:.1e} (< {:.0e}), {:.2f} s (< {} s)",
                     pre.grid_size(), pre.delays.size(), identical ? "yes" : "no", worst, kUnbiasedTol, secs,
                     kSvrgStructSeconds));
}

double inner_step_ns(const ScenarioConfig& base, int delay_max) {
  auto doc = scenario_to_json(base);
  doc.erase("delay_set");
  doc["delay_max"] = delay_max;
  const auto cfg = parse_scenario(doc);
  const auto pre = precompute(cfg, {.merged = false});
  const auto p0 = random_point(cfg, pre);
  SvrgConfig s = cfg.solver.svrg;
  s.m_inner = kScalingSteps;
  s.max_epochs = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kScalingRepeats; ++r) {
    Rng rng = make_rng(cfg.seed, streams::kSvrgSampling);
    const auto res = run_um_svrg(p0, s, pre, rng);
    best = std::min(best, static_cast<double>(res.report.inner_ns) / res.report.inner_steps);
  }
  return best;
}

void criterion_scaling(const ScenarioConfig& large) {
  const double small_ns = inner_step_ns(large, 8);
  const double big_ns = inner_step_ns(large, 64);
  const double ratio = std::max(small_ns, big_ns) / std::min(small_ns, big_ns);
  report(7, ratio < kScalingRatio,
         fmt::format("UM-SVRG inner step at M={} N={}: {:.1f} us with |D|=9, {:.1f} us with |D|=65, ratio {:.2f} "
                     "(< {})",
                     large.m_antennas, large.n_samples, small_ns / 1e3, big_ns / 1e3, ratio, kScalingRatio));
}

void criterion_svrg_vs_gd(const ScenarioConfig& cfg) {
  const auto pre = precompute(cfg);
  const auto p0 = random_point(cfg, pre);
  const double d = static_cast<double>(pre.delays.size());

  double gd_f = std::numeric_limits<double>::infinity(), gd_step = 0;
  for (double t : kGdSteps) {
    GdConfig gd;
    gd.step_size = t;
    gd.max_iters = static_cast<int>(kBudget);
    const auto res = run_um_gd(p0, gd, pre);
    const double f = res.report.records.back().f;
    if (f < gd_f) {
      gd_f = f;
      gd_step = t;
    }
  }

  SvrgConfig s = cfg.solver.svrg;
  s.sampling_mode = SamplingMode::kUnbiased;
  s.grad_tol = 0.0;
  s.max_epochs = static_cast<int>(std::floor(kBudget * d / (d + s.m_inner)));
  Rng rng = make_rng(cfg.seed, streams::kSvrgSampling);
  const auto res = run_um_svrg(p0, s, pre, rng);
  const auto& last = res.report.records.back();
  const double count = last.p_units / d;
  const bool ok = count <= kBudget && last.f <= gd_f;
  report(8, ok,
         fmt::format("normalized gradient count {}: UM-SVRG f {:.6e} at count {} (t0 {:.1e}, m {}), best UM-GD f "
                     "{:.6e} (step {:.0e} from {} steps), SVRG/GD {:.6f}",
                     kBudget, last.f, count, s.t0, s.m_inner, gd_f, gd_step, kGdSteps.size(), last.f / gd_f));
}

void criterion_oracles() {
  const auto t0 = Clock::now();
  double merged = 0, sparse = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    for (auto [m, n] : {std::pair{1, 3}, std::pair{2, 4}, std::pair{3, 6}, std::pair{4, 8}}) {
      const auto cfg = fixture::small(m, n, 12.0, std::min(3, n), seed);
      const auto pre = precompute(cfg);
      const auto p = fixture::point(cfg, pre);
      const CMatrix naive = oracle::egrad_x_e(p.alpha + 0.25, p.x.matrix(), cfg);
      merged = std::max(merged, (egrad_x_e_merged(p.alpha + 0.25, p.x, pre) - naive).cwiseAbs().maxCoeff());
      sparse = std::max(sparse, std::abs(eval_P(p.x, pre) - oracle::P(p.x.matrix(), cfg)));
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = merged < kMergedTol && sparse < kSparsePTol && secs < kOracleSeconds;
  report(9, ok,
         fmt::format("merged vs per-angle e-gradient max abs diff {:.1e} (< {:.0e}), sparse vs dense P {:.1e} "
                     "(< {:.0e}), {:.2f} s (< {} s)",
                     merged, kMergedTol, sparse, kSparsePTol, secs, kOracleSeconds));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    fmt::print(stderr, "usage: umwave_acceptance <scenarios dir>\n");
    return 2;
  }
  const fs::path dir = argv[1];
  try {
    criterion_gradcheck(dir);
    criterion_manifold();

    const auto normal = load_scenario(dir / "normal.json");
    const auto pre = precompute(normal);
    const auto p0 = random_point(normal, pre);
    criterion_armijo(normal, pre, p0);
    criterion_race(pre, p0);
    criterion_quality(normal, pre, p0);

    criterion_svrg_structure();
    const auto large = load_scenario(dir / "large_desk.json");
    criterion_scaling(large);
    criterion_svrg_vs_gd(large);
    criterion_oracles();
  } catch (const std::exception& ex) {
    fmt::print("[FAIL] aborted: {}\n", ex.what());
    return 1;
  }
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
