#include "umwave/objective.hpp"

#include <cmath>
#include <string>

#include "umwave/errors.hpp"

namespace umwave {

namespace {

// For a ULA, a^H G a = c_0 + 2 Re sum_{k>0} c_k e^{j pi k sin(theta)} where c_k
// is the sum of the k-th superdiagonal of G, so row k of A^T carries the phase.
RVector toeplitz_quadratic(const CMatrix& g, const CMatrix& steering) {
  const Eigen::Index m = g.rows();
  CVector c(m);
  c[0] = g.diagonal().sum().real();
  for (Eigen::Index k = 1; k < m; ++k) c[k] = 2.0 * g.diagonal(k).sum();
  return (steering.transpose() * c).real();
}

// p_theta = a^H X^H X a for every grid column.
RVector grid_powers(const WaveformMatrix& x, const Precompute& pre) {
  const CMatrix gram = x.matrix().adjoint() * x.matrix();
  return toeplitz_quadratic(gram, pre.grid_steering);
}

// sum_theta w_theta a a^H is Hermitian Toeplitz with first column A w.
CMatrix weighted_outer_sum(const RVector& w, const CMatrix& steering) {
  const Eigen::Index m = steering.rows();
  const CVector t = steering * w.cast<cdouble>();
  CMatrix k(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) k(r, c) = r >= c ? t[r - c] : std::conj(t[c - r]);
  }
  return k;
}

// Adds d|P_ij,tau|^2/dX* for all interest pairs at one delay into C, where
// the gradient is C * A_hat^H. Column i of C collects conj(P_ij) S b_j and
// column j collects P_ij S^T b_i.
void accumulate_P_tau(const CMatrix& b, int tau, CMatrix& c) {
  const Eigen::Index n = b.rows();
  const Eigen::Index len = n - tau;
  if (len <= 0) return;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (i == j && tau == 0) continue;
      const cdouble pij = b.col(i).head(len).dot(b.col(j).segment(tau, len));
      c.col(i).head(len) += std::conj(pij) * b.col(j).segment(tau, len);
      c.col(j).segment(tau, len) += pij * b.col(i).head(len);
    }
  }
}

double sum_P_tau(const CMatrix& b, int tau) {
  const Eigen::Index len = b.rows() - tau;
  if (len <= 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (i == j && tau == 0) continue;
      total += std::norm(b.col(i).head(len).dot(b.col(j).segment(tau, len)));
    }
  }
  return total;
}

void check_delay(int tau, Eigen::Index n) {
  if (tau < 0 || tau > n) {
    throw DomainError("delay " + std::to_string(tau) + " outside [0, " + std::to_string(n) + "]");
  }
}

}  // namespace

std::size_t merged_storage_bytes(int m) {
  const auto mm = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  return mm * mm * sizeof(cdouble);
}

Precompute precompute(const ScenarioConfig& cfg, const PrecomputeOptions& opts) {
  Precompute pre;
  pre.m = cfg.m_antennas;
  pre.n = cfg.n_samples;
  pre.grid_steering = steering_matrix(cfg.angle_grid, cfg.m_antennas);
  pre.desired.resize(static_cast<Eigen::Index>(cfg.angle_grid.size()));
  for (std::size_t k = 0; k < cfg.angle_grid.size(); ++k) {
    pre.desired[static_cast<Eigen::Index>(k)] = desired_beampattern(cfg.angle_grid[k], cfg);
  }
  pre.sum_p2 = pre.desired.squaredNorm();
  pre.sum_pa = weighted_outer_sum(pre.desired, pre.grid_steering);

  if (opts.merged) {
    const std::size_t bytes = merged_storage_bytes(cfg.m_antennas);
    if (bytes > opts.memory_cap_bytes) {
      throw MemoryCapError("merged gradient needs " + std::to_string(bytes) + " bytes for sum_AA (cap " +
                           std::to_string(opts.memory_cap_bytes) + "); use UM-SVRG for this array size");
    }
    const Eigen::Index m = cfg.m_antennas;
    CMatrix vecs(m * m, pre.grid_steering.cols());
    for (Eigen::Index k = 0; k < pre.grid_steering.cols(); ++k) {
      const CVector a = pre.grid_steering.col(k);
      const CMatrix outer = a * a.adjoint();
      vecs.col(k) = Eigen::Map<const CVector>(outer.data(), m * m);
    }
    pre.sum_AA = vecs * vecs.adjoint();
  }

  pre.interest_steering = steering_matrix(cfg.interest_angles, cfg.m_antennas);
  pre.delays = cfg.delay_set;
  pre.wc2 = cfg.weight_wc * cfg.weight_wc;
  return pre;
}

CVector shift_apply(int tau, const CVector& v, ShiftDirection dir) {
  const Eigen::Index n = v.size();
  check_delay(tau, n);
  CVector out = CVector::Zero(n);
  const Eigen::Index len = n - tau;
  if (len > 0) {
    if (dir == ShiftDirection::kForward) {
      out.head(len) = v.segment(tau, len);
    } else {
      out.segment(tau, len) = v.head(len);
    }
  }
  return out;
}

cdouble correlation_of_signals(const CVector& b_i, const CVector& b_j, int tau) {
  check_delay(tau, b_i.size());
  const Eigen::Index len = b_i.size() - tau;
  if (len <= 0) return {0.0, 0.0};
  return b_i.head(len).dot(b_j.segment(tau, len));
}

cdouble correlation(const WaveformMatrix& x, const CVector& a_i, const CVector& a_j, int tau) {
  return correlation_of_signals(x.matrix() * a_i, x.matrix() * a_j, tau);
}

double eval_e(double alpha, const WaveformMatrix& x, const Precompute& pre) {
  const RVector p = grid_powers(x, pre);
  return (alpha * pre.desired - p).squaredNorm();
}

double eval_P_tau(const WaveformMatrix& x, int tau, const Precompute& pre) {
  check_delay(tau, x.rows());
  const CMatrix b = x.matrix() * pre.interest_steering;
  return sum_P_tau(b, tau);
}

double eval_P(const WaveformMatrix& x, const Precompute& pre) {
  const CMatrix b = x.matrix() * pre.interest_steering;
  double total = 0.0;
  for (int tau : pre.delays) total += sum_P_tau(b, tau);
  return total;
}

ObjectiveParts eval_parts(const ProductPoint& p, const Precompute& pre) {
  ObjectiveParts parts;
  parts.e = eval_e(p.alpha, p.x, pre);
  parts.P = eval_P(p.x, pre);
  parts.f = parts.e + pre.wc2 * parts.P;
  return parts;
}

double eval_f(const ProductPoint& p, const Precompute& pre) { return eval_parts(p, pre).f; }

double egrad_alpha(double alpha, const WaveformMatrix& x, const Precompute& pre) {
  const CMatrix gram = x.matrix().adjoint() * x.matrix();
  // Tr(G S) = sum_ij G_ij S_ji; the imaginary part vanishes for Hermitian G, S.
  const double trace = (gram.array() * pre.sum_pa.transpose().array()).sum().real();
  return 2.0 * (alpha * pre.sum_p2 - trace);
}

CMatrix egrad_x_e_merged(double alpha, const WaveformMatrix& x, const Precompute& pre) {
  if (!pre.sum_AA) throw DomainError("merged e-gradient requires sum_AA in the precompute");
  const Eigen::Index m = x.cols();
  const CMatrix& X = x.matrix();
  const CMatrix gram = X.adjoint() * X;
  const CVector v = *pre.sum_AA * Eigen::Map<const CVector>(gram.data(), m * m);
  // (I_M (x) X) vec(K) = vec(X K)
  const Eigen::Map<const CMatrix> k(v.data(), m, m);
  return -2.0 * alpha * (X * pre.sum_pa) + 2.0 * (X * k);
}

CMatrix egrad_x_e_direct(double alpha, const WaveformMatrix& x, const Precompute& pre) {
  const RVector p = grid_powers(x, pre);
  const RVector w = 2.0 * (p - alpha * pre.desired);
  return x.matrix() * weighted_outer_sum(w, pre.grid_steering);
}

CMatrix egrad_x_e(double alpha, const WaveformMatrix& x, const Precompute& pre) {
  return pre.sum_AA ? egrad_x_e_merged(alpha, x, pre) : egrad_x_e_direct(alpha, x, pre);
}

CMatrix egrad_x_P_tau(const WaveformMatrix& x, int tau, const Precompute& pre) {
  check_delay(tau, x.rows());
  const CMatrix b = x.matrix() * pre.interest_steering;
  CMatrix c = CMatrix::Zero(b.rows(), b.cols());
  accumulate_P_tau(b, tau, c);
  return c * pre.interest_steering.adjoint();
}

CMatrix egrad_x_P(const WaveformMatrix& x, const Precompute& pre) {
  const CMatrix b = x.matrix() * pre.interest_steering;
  CMatrix c = CMatrix::Zero(b.rows(), b.cols());
  for (int tau : pre.delays) accumulate_P_tau(b, tau, c);
  return c * pre.interest_steering.adjoint();
}

EuclideanGradient egrad(const ProductPoint& p, const Precompute& pre) {
  EuclideanGradient g;
  g.d_alpha = egrad_alpha(p.alpha, p.x, pre);
  g.d_x = egrad_x_e(p.alpha, p.x, pre) + pre.wc2 * egrad_x_P(p.x, pre);
  return g;
}

EuclideanGradient stoch_egrad(const ProductPoint& p, Eigen::Index theta_index, int tau,
                              const Precompute& pre, SamplingMode mode) {
  if (theta_index < 0 || theta_index >= pre.grid_size()) throw DomainError("sampled angle index out of range");
  const double e_weight = mode == SamplingMode::kUnbiased ? static_cast<double>(pre.grid_size()) : 1.0;
  const double p_weight = mode == SamplingMode::kUnbiased ? static_cast<double>(pre.delays.size()) : 1.0;

  const CVector a = pre.grid_steering.col(theta_index);
  const double pbar = pre.desired[theta_index];
  const CVector b = p.x.matrix() * a;
  const double power = b.squaredNorm();  // a^H X^H X a
  const double residual = power - p.alpha * pbar;

  EuclideanGradient g;
  g.d_alpha = e_weight * 2.0 * (p.alpha * pbar * pbar - pbar * power);
  g.d_x = (e_weight * 2.0 * residual) * (b * a.adjoint());
  g.d_x += (p_weight * pre.wc2) * egrad_x_P_tau(p.x, tau, pre);
  return g;
}

double directional_derivative(const EuclideanGradient& g, const ProductTangent& t) {
  return g.d_alpha * t.alpha + 2.0 * (g.d_x.array().conjugate() * t.x.array()).real().sum();
}

double fd_directional(const ProductPoint& p, const ProductTangent& t, const PointFunction& func, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const ProductPoint plus = retract(p, h * t);
  const ProductPoint minus = retract(p, -h * t);
  return (func(plus) - func(minus)) / (2.0 * h);
}

}  // namespace umwave
