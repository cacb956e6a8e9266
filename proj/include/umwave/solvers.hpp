#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "umwave/manifold.hpp"
#include "umwave/objective.hpp"
#include "umwave/scenario.hpp"

namespace umwave {

enum class SolverStatus { kConverged, kMaxIters, kError };
std::string to_string(SolverStatus s);

/// One history row. For UM-GD/UM-AGD `iter` is the iteration k and `step`
/// is the step taken from this iterate (0 on the last row). For UM-SVRG a row
/// is written per snapshot: `iter` counts inner steps so far and `epoch` the
/// completed outer loops.
struct SolverRecord {
  std::int64_t iter = 0;
  std::int64_t epoch = 0;
  double f = 0.0;
  double e = 0.0;
  double P = 0.0;
  double grad_norm = 0.0;
  double grad_norm_sq = 0.0;
  double step = 0.0;
  int backtracks = 0;
  // Loss-term gradient evaluations spent to reach this iterate. A full
  // gradient costs |Theta| + |D| units, a stochastic inner step costs 1.
  std::uint64_t grad_units = 0;
  // Same count restricted to the P-part (|D| per full gradient, 1 per inner
  // step); p_units / |D| is the normalized gradient count.
  std::uint64_t p_units = 0;
  std::int64_t wall_ns = 0;
};

struct SolverReport {
  std::vector<SolverRecord> records;
  SolverStatus status = SolverStatus::kMaxIters;
  std::string diagnostic;
  // UM-SVRG only: time and count of inner steps, snapshot passes excluded.
  std::int64_t inner_ns = 0;
  std::uint64_t inner_steps = 0;
};

struct SolverResult {
  ProductPoint point;
  SolverReport report;
};

/// (g.d_alpha, P_X(g.d_x)).
ProductTangent riemannian_gradient(const ProductPoint& p, const EuclideanGradient& g);

/// Full Riemannian gradient of f at p.
ProductTangent full_riemannian_gradient(const ProductPoint& p, const Precompute& pre);

/// Closed-form minimizer of e over alpha: Re Tr(X^H X sum_pa) / sum_p2, or 0
/// when the desired pattern is identically zero.
double init_alpha(const WaveformMatrix& x, const Precompute& pre);

/// Random phases with alpha fitted by init_alpha.
ProductPoint random_point(const Precompute& pre, Rng& rng);
ProductPoint random_point(const ScenarioConfig& cfg, const Precompute& pre);

SolverResult run_um_gd(const ProductPoint& p0, const GdConfig& cfg, const Precompute& pre);
SolverResult run_um_agd(const ProductPoint& p0, const AgdConfig& cfg, const Precompute& pre);

/// t0 / (1 + t0 * lambda * floor(k1 / m_inner)).
double svrg_step_size(std::uint64_t k1, const SvrgConfig& cfg);

/// Modified stochastic gradient
///   (grad f_i(x) - T(grad f_i(x_snap))) + T(grad f(x_snap)),
/// with T the identity when `at_snapshot` is set (x is the snapshot itself).
ProductTangent svrg_direction(const ProductPoint& x, const ProductPoint& snapshot,
                              const ProductTangent& snapshot_full_grad,
                              Eigen::Index theta_index, int tau, const Precompute& pre,
                              SamplingMode mode, bool at_snapshot);

SolverResult run_um_svrg(const ProductPoint& p0, const SvrgConfig& cfg, const Precompute& pre,
                         Rng& rng);

/// Dispatch on cfg.solver.algorithm; SVRG draws from the scenario seed.
SolverResult run_solver(const ScenarioConfig& cfg, const Precompute& pre, const ProductPoint& p0);

}  // namespace umwave
