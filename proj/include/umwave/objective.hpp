#pragma once

// Beampattern-matching term e(alpha, X), correlation term P(X), the weighted
// objective f = e + wc^2 * P, and their Euclidean gradients.
//
// Gradient convention: every X-gradient G returned here is the Wirtinger
// derivative df/dX*, so for any direction Xi
//     d/dh f(X + h*Xi) |_{h=0} = 2 * Re Tr(G^H Xi).
// The alpha component is the ordinary derivative df/dalpha.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "umwave/manifold.hpp"
#include "umwave/scenario.hpp"
#include "umwave/types.hpp"

namespace umwave {

struct PrecomputeOptions {
  /// Build sum_AA for the merged e-gradient (UM-GD / UM-AGD path).
  bool merged = true;
  std::size_t memory_cap_bytes = std::size_t{1} << 30;
};

/// Scenario data that stays fixed across iterations.
struct Precompute {
  int m = 0;
  int n = 0;
  CMatrix grid_steering;      // M x |Theta|
  RVector desired;            // P_bar over the grid
  CMatrix sum_pa;             // sum P_bar a a^H, M x M
  std::optional<CMatrix> sum_AA;  // sum vec(aa^H) vec(aa^H)^H, M^2 x M^2
  double sum_p2 = 0.0;        // sum |P_bar|^2
  CMatrix interest_steering;  // M x |Theta_hat|
  std::vector<int> delays;
  double wc2 = 0.0;           // w_c^2

  Eigen::Index grid_size() const noexcept { return grid_steering.cols(); }
  Eigen::Index interest_size() const noexcept { return interest_steering.cols(); }
};

Precompute precompute(const ScenarioConfig& cfg, const PrecomputeOptions& opts = {});

/// Bytes needed to store sum_AA for M antennas.
std::size_t merged_storage_bytes(int m);

struct EuclideanGradient {
  double d_alpha = 0.0;
  CMatrix d_x;
};

enum class ShiftDirection { kForward, kTransposed };

/// S_tau v (kForward: out[n] = v[n + tau], zero tail) or S_tau^T v
/// (kTransposed: out[n + tau] = v[n], zero head). tau in [0, N].
CVector shift_apply(int tau, const CVector& v, ShiftDirection dir = ShiftDirection::kForward);

/// b_i^H S_tau b_j for synthesized signals b = X a.
cdouble correlation_of_signals(const CVector& b_i, const CVector& b_j, int tau);

/// P_{i,j,tau} = a_i^H X^H S_tau X a_j.
cdouble correlation(const WaveformMatrix& x, const CVector& a_i, const CVector& a_j, int tau);

double eval_e(double alpha, const WaveformMatrix& x, const Precompute& pre);
double eval_P(const WaveformMatrix& x, const Precompute& pre);
/// Terms of P(X) at a single delay; the tau = 0 auto terms are excluded so
/// that summing over the delay set reproduces eval_P.
double eval_P_tau(const WaveformMatrix& x, int tau, const Precompute& pre);
double eval_f(const ProductPoint& p, const Precompute& pre);

struct ObjectiveParts {
  double e = 0.0;
  double P = 0.0;
  double f = 0.0;
};
ObjectiveParts eval_parts(const ProductPoint& p, const Precompute& pre);

double egrad_alpha(double alpha, const WaveformMatrix& x, const Precompute& pre);

/// Merged form through sum_AA when available, per-angle summation otherwise.
CMatrix egrad_x_e(double alpha, const WaveformMatrix& x, const Precompute& pre);
/// -2 alpha X sum_pa + 2 unvec((I (x) X) sum_AA vec(X^H X)); requires sum_AA.
CMatrix egrad_x_e_merged(double alpha, const WaveformMatrix& x, const Precompute& pre);
/// 2 sum_theta (a^H X^H X a - alpha P_bar) X a a^H without sum_AA.
CMatrix egrad_x_e_direct(double alpha, const WaveformMatrix& x, const Precompute& pre);

CMatrix egrad_x_P(const WaveformMatrix& x, const Precompute& pre);
CMatrix egrad_x_P_tau(const WaveformMatrix& x, int tau, const Precompute& pre);

/// (egrad_alpha, egrad_x_e + wc^2 * egrad_x_P).
EuclideanGradient egrad(const ProductPoint& p, const Precompute& pre);

/// Gradient of one loss term f_i = e_theta + wc^2 P_tau. In unbiased mode the
/// terms are weighted by |Theta| and |D| so that the uniform average over
/// Theta x D equals the full gradient.
EuclideanGradient stoch_egrad(const ProductPoint& p, Eigen::Index theta_index, int tau,
                              const Precompute& pre, SamplingMode mode);

/// Directional derivative implied by a Euclidean gradient along t:
/// g.d_alpha * t.alpha + 2 Re Tr(g.d_x^H t.x).
double directional_derivative(const EuclideanGradient& g, const ProductTangent& t);

using PointFunction = std::function<double(const ProductPoint&)>;

/// (f(R(p, h t)) - f(R(p, -h t))) / (2h).
double fd_directional(const ProductPoint& p, const ProductTangent& t, const PointFunction& func,
                      double h);

}  // namespace umwave
