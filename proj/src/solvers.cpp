#include "umwave/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "umwave/errors.hpp"

namespace umwave {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

struct UnitCost {
  std::uint64_t full;    // |Theta| + |D|
  std::uint64_t p_full;  // |D|
};

UnitCost unit_cost(const Precompute& pre) {
  const auto d = static_cast<std::uint64_t>(pre.delays.size());
  return {static_cast<std::uint64_t>(pre.grid_size()) + d, d};
}

void warn_if_unmerged(const Precompute& pre) {
  if (!pre.sum_AA) {
    std::clog << "umwave: warning: sum_AA not precomputed, using per-angle e-gradient summation\n";
  }
}

SolverRecord make_record(std::int64_t iter, std::int64_t epoch, const ObjectiveParts& parts, double gn2) {
  SolverRecord r;
  r.iter = iter;
  r.epoch = epoch;
  r.f = parts.f;
  r.e = parts.e;
  r.P = parts.P;
  r.grad_norm_sq = gn2;
  r.grad_norm = std::sqrt(gn2);
  return r;
}

}  // namespace

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIters: return "max_iters";
    case SolverStatus::kError: return "error";
  }
  return "unknown";
}

ProductTangent riemannian_gradient(const ProductPoint& p, const EuclideanGradient& g) {
  return {g.d_alpha, project_tangent(p.x, g.d_x)};
}

ProductTangent full_riemannian_gradient(const ProductPoint& p, const Precompute& pre) {
  return riemannian_gradient(p, egrad(p, pre));
}

double init_alpha(const WaveformMatrix& x, const Precompute& pre) {
  if (!(pre.sum_p2 > 0.0)) return 0.0;
  const CMatrix gram = x.matrix().adjoint() * x.matrix();
  const double trace = (gram.array() * pre.sum_pa.transpose().array()).sum().real();
  return trace / pre.sum_p2;
}

ProductPoint random_point(const Precompute& pre, Rng& rng) {
  WaveformMatrix x = random_waveform(pre.n, pre.m, rng);
  const double alpha = init_alpha(x, pre);
  return {alpha, std::move(x)};
}

ProductPoint random_point(const ScenarioConfig& cfg, const Precompute& pre) {
  Rng rng = make_rng(cfg.seed, streams::kInitialPoint);
  return random_point(pre, rng);
}

SolverResult run_um_gd(const ProductPoint& p0, const GdConfig& cfg, const Precompute& pre) {
  warn_if_unmerged(pre);
  const auto start = Clock::now();
  const UnitCost cost = unit_cost(pre);
  SolverResult res{p0, {}};
  ProductPoint& p = res.point;
  try {
    for (std::int64_t k = 0;; ++k) {
      const ObjectiveParts parts = eval_parts(p, pre);
      if (!std::isfinite(parts.f)) {
        res.report.status = SolverStatus::kError;
        res.report.diagnostic = "non-finite objective at iteration " + std::to_string(k) +
                                "; the step size is likely above 2/L";
        break;
      }
      const ProductTangent g = full_riemannian_gradient(p, pre);
      SolverRecord rec = make_record(k, k, parts, inner(g, g));
      rec.grad_units = static_cast<std::uint64_t>(k) * cost.full;
      rec.p_units = static_cast<std::uint64_t>(k) * cost.p_full;
      rec.wall_ns = elapsed_ns(start);
      if (rec.grad_norm <= cfg.grad_tol) {
        res.report.status = SolverStatus::kConverged;
        res.report.records.push_back(rec);
        break;
      }
      if (k >= cfg.max_iters) {
        res.report.status = SolverStatus::kMaxIters;
        res.report.records.push_back(rec);
        break;
      }
      rec.step = cfg.step_size;
      res.report.records.push_back(rec);
      p = retract(p, -cfg.step_size * g);
    }
  } catch (const RetractionError& e) {
    res.report.status = SolverStatus::kError;
    res.report.diagnostic = e.what();
  }
  return res;
}

SolverResult run_um_agd(const ProductPoint& p0, const AgdConfig& cfg, const Precompute& pre) {
  warn_if_unmerged(pre);
  const auto start = Clock::now();
  const UnitCost cost = unit_cost(pre);
  SolverResult res{p0, {}};
  ProductPoint& p = res.point;
  ObjectiveParts parts = eval_parts(p, pre);
  if (!std::isfinite(parts.f)) {
    res.report.status = SolverStatus::kError;
    res.report.diagnostic = "non-finite objective at the initial point";
    return res;
  }
  try {
    for (std::int64_t k = 0;; ++k) {
      const ProductTangent g = full_riemannian_gradient(p, pre);
      const double gn2 = inner(g, g);
      SolverRecord rec = make_record(k, k, parts, gn2);
      rec.grad_units = static_cast<std::uint64_t>(k) * cost.full;
      rec.p_units = static_cast<std::uint64_t>(k) * cost.p_full;
      rec.wall_ns = elapsed_ns(start);
      if (rec.grad_norm <= cfg.grad_tol) {
        res.report.status = SolverStatus::kConverged;
        res.report.records.push_back(rec);
        break;
      }
      if (k >= cfg.max_iters) {
        res.report.status = SolverStatus::kMaxIters;
        res.report.records.push_back(rec);
        break;
      }

      // Armijo: shrink t until f(x) - f(R(-t g)) >= sigma * t * <g, g>.
      double t = cfg.t_bar;
      bool accepted = false;
      int backtracks = 0;
      ProductPoint trial = p;
      ObjectiveParts trial_parts;
      for (; backtracks <= cfg.max_backtracks; ++backtracks) {
        trial = retract(p, -t * g);
        trial_parts = eval_parts(trial, pre);
        if (std::isfinite(trial_parts.f) && parts.f - trial_parts.f >= cfg.sigma * t * gn2) {
          accepted = true;
          break;
        }
        t *= cfg.beta;
      }
      if (!accepted) {
        res.report.status = SolverStatus::kError;
        res.report.diagnostic = "Armijo backtracking exceeded " + std::to_string(cfg.max_backtracks) +
                                " halvings at iteration " + std::to_string(k) +
                                "; check t_bar and sigma";
        res.report.records.push_back(rec);
        break;
      }
      rec.step = t;
      rec.backtracks = backtracks;
      res.report.records.push_back(rec);
      p = std::move(trial);
      parts = trial_parts;
    }
  } catch (const RetractionError& e) {
    res.report.status = SolverStatus::kError;
    res.report.diagnostic = e.what();
  }
  return res;
}

double svrg_step_size(std::uint64_t k1, const SvrgConfig& cfg) {
  const auto m = static_cast<std::uint64_t>(std::max(cfg.m_inner, 1));
  return cfg.t0 / (1.0 + cfg.t0 * cfg.lambda * static_cast<double>(k1 / m));
}

ProductTangent svrg_direction(const ProductPoint& x, const ProductPoint& snapshot,
                              const ProductTangent& snapshot_full_grad, Eigen::Index theta_index, int tau,
                              const Precompute& pre, SamplingMode mode, bool at_snapshot) {
  if (at_snapshot) {
    // The sampled term cancels exactly against itself and the transport is
    // the identity, leaving the stored full gradient.
    return snapshot_full_grad;
  }
  const ProductTangent gi_x = riemannian_gradient(x, stoch_egrad(x, theta_index, tau, pre, mode));
  const ProductTangent gi_snap = riemannian_gradient(snapshot, stoch_egrad(snapshot, theta_index, tau, pre, mode));
  return (gi_x - transport_to(x, gi_snap)) + transport_to(x, snapshot_full_grad);
}

SolverResult run_um_svrg(const ProductPoint& p0, const SvrgConfig& cfg, const Precompute& pre, Rng& rng) {
  const auto start = Clock::now();
  const UnitCost cost = unit_cost(pre);
  SolverResult res{p0, {}};
  ProductPoint& snapshot = res.point;
  if (pre.delays.empty() || pre.grid_size() == 0) {
    res.report.status = SolverStatus::kError;
    res.report.diagnostic = "UM-SVRG needs a nonempty angle grid and delay set";
    return res;
  }
  std::uniform_int_distribution<Eigen::Index> pick_theta(0, pre.grid_size() - 1);
  std::uniform_int_distribution<std::size_t> pick_tau(0, pre.delays.size() - 1);

  std::uint64_t k1 = 0;
  std::uint64_t units = 0;
  std::uint64_t p_units = 0;
  try {
    for (std::int64_t epoch = 0;; ++epoch) {
      const ObjectiveParts parts = eval_parts(snapshot, pre);
      if (!std::isfinite(parts.f)) {
        res.report.status = SolverStatus::kError;
        res.report.diagnostic = "non-finite objective at epoch " + std::to_string(epoch) +
                                "; lower t0 or raise lambda";
        break;
      }
      const ProductTangent full = full_riemannian_gradient(snapshot, pre);
      SolverRecord rec = make_record(static_cast<std::int64_t>(k1), epoch, parts, inner(full, full));
      rec.grad_units = units;
      rec.p_units = p_units;
      rec.wall_ns = elapsed_ns(start);
      if (rec.grad_norm <= cfg.grad_tol) {
        res.report.status = SolverStatus::kConverged;
        res.report.records.push_back(rec);
        break;
      }
      if (epoch >= cfg.max_epochs) {
        res.report.status = SolverStatus::kMaxIters;
        res.report.records.push_back(rec);
        break;
      }
      rec.step = svrg_step_size(k1, cfg);
      res.report.records.push_back(rec);
      units += cost.full;
      p_units += cost.p_full;

      const auto inner_start = Clock::now();
      ProductPoint x = snapshot;
      for (int q = 1; q <= cfg.m_inner; ++q) {
        const Eigen::Index theta = pick_theta(rng);
        const int tau = pre.delays[pick_tau(rng)];
        const ProductTangent dir = svrg_direction(x, snapshot, full, theta, tau, pre, cfg.sampling_mode, q == 1);
        x = retract(x, -svrg_step_size(k1, cfg) * dir);
        ++k1;
        ++units;
        ++p_units;
      }
      res.report.inner_ns += elapsed_ns(inner_start);
      res.report.inner_steps += static_cast<std::uint64_t>(cfg.m_inner);
      snapshot = std::move(x);
    }
  } catch (const RetractionError& e) {
    res.report.status = SolverStatus::kError;
    res.report.diagnostic = e.what();
  }
  return res;
}

SolverResult run_solver(const ScenarioConfig& cfg, const Precompute& pre, const ProductPoint& p0) {
  switch (cfg.solver.algorithm) {
    case Algorithm::kGd: return run_um_gd(p0, cfg.solver.gd, pre);
    case Algorithm::kAgd: return run_um_agd(p0, cfg.solver.agd, pre);
    case Algorithm::kSvrg: {
      Rng rng = make_rng(cfg.seed, streams::kSvrgSampling);
      return run_um_svrg(p0, cfg.solver.svrg, pre, rng);
    }
  }
  throw DomainError("unknown algorithm");
}

}  // namespace umwave
