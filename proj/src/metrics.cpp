#include "umwave/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "umwave/errors.hpp"
#include "umwave/objective.hpp"

namespace umwave {

BeampatternCurve synthesized_beampattern(const WaveformMatrix& x, const std::vector<double>& grid) {
  BeampatternCurve curve;
  curve.reserve(grid.size());
  const int m = static_cast<int>(x.cols());
  for (double theta : grid) {
    const CVector b = x.matrix() * steering_vector(theta, m).entries;
    curve.push_back({theta, b.squaredNorm(), 0.0});
  }
  return curve;
}

BeampatternCurve beampattern_curve(const WaveformMatrix& x, double alpha, const ScenarioConfig& cfg) {
  BeampatternCurve curve = synthesized_beampattern(x, cfg.angle_grid);
  for (auto& pt : curve) pt.desired_scaled = alpha * desired_beampattern(pt.angle_deg, cfg);
  return curve;
}

double normalized_correlation_db(const WaveformMatrix& x, double theta_i_deg, double theta_j_deg, int tau) {
  const int m = static_cast<int>(x.cols());
  const CVector b_i = x.matrix() * steering_vector(theta_i_deg, m).entries;
  const CVector b_j = x.matrix() * steering_vector(theta_j_deg, m).entries;
  const double num = std::abs(correlation_of_signals(b_i, b_j, tau));
  // |P_ii,0| = |b_i|^2
  const double den = std::max(b_i.squaredNorm(), b_j.squaredNorm());
  if (!(den > 0.0)) throw EvaluationError("zero-lag correlation vanished; cannot normalize");
  if (theta_i_deg == theta_j_deg && tau == 0) return 0.0;
  return 10.0 * std::log10(num / den);
}

CorrelationTable correlation_table(const WaveformMatrix& x, const ScenarioConfig& cfg) {
  CorrelationTable table;
  for (int tau : cfg.delay_set) {
    for (double ti : cfg.interest_angles) {
      for (double tj : cfg.interest_angles) {
        table.push_back({ti, tj, tau, normalized_correlation_db(x, ti, tj, tau)});
      }
    }
  }
  return table;
}

}  // namespace umwave
