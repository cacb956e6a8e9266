#pragma once

#include <vector>

#include "umwave/manifold.hpp"
#include "umwave/scenario.hpp"

namespace umwave {

struct BeampatternPoint {
  double angle_deg = 0.0;
  double power = 0.0;           // a^H X^H X a = |X a|^2
  double desired_scaled = 0.0;  // alpha * P_bar
};
using BeampatternCurve = std::vector<BeampatternPoint>;

struct CorrelationEntry {
  double theta_i_deg = 0.0;
  double theta_j_deg = 0.0;
  int tau = 0;
  double level_db = 0.0;
};
using CorrelationTable = std::vector<CorrelationEntry>;

/// |X a_theta|^2 for each grid angle; desired_scaled is left at 0.
BeampatternCurve synthesized_beampattern(const WaveformMatrix& x, const std::vector<double>& grid);

/// Beampattern over the scenario grid with the fitted alpha * P_bar overlay.
BeampatternCurve beampattern_curve(const WaveformMatrix& x, double alpha, const ScenarioConfig& cfg);

/// 10 log10(|P_ij,tau| / max(|P_ii,0|, |P_jj,0|)).
double normalized_correlation_db(const WaveformMatrix& x, double theta_i_deg, double theta_j_deg,
                                 int tau);

/// All ordered interest-angle pairs for every delay in the scenario.
CorrelationTable correlation_table(const WaveformMatrix& x, const ScenarioConfig& cfg);

}  // namespace umwave
