#pragma once

#include <json.hpp>

#include "umwave/objective.hpp"
#include "umwave/scenario.hpp"
#include "umwave/solvers.hpp"

namespace fixture {

inline umwave::ScenarioConfig config(nlohmann::json doc) { return umwave::parse_scenario(doc); }

// Small problem with a coarse grid so brute-force oracles stay cheap.
inline umwave::ScenarioConfig small(int m = 2, int n = 4, double spacing = 30.0, int delay_max = 2,
                                    std::uint64_t seed = 3) {
  return config({{"m_antennas", m},
                 {"n_samples", n},
                 {"angle_spacing_deg", spacing},
                 {"delay_max", delay_max},
                 {"seed", seed}});
}

inline umwave::ScenarioConfig normal_scale() {
  return config({{"m_antennas", 8},
                 {"n_samples", 64},
                 {"angle_spacing_deg", 0.1},
                 {"interest_angles_deg", {-40, 30}},
                 {"delay_max", 16},
                 {"weight_wc", 25},
                 {"seed", 1}});
}

inline umwave::ProductPoint point(const umwave::ScenarioConfig& cfg, const umwave::Precompute& pre,
                                  std::uint64_t stream = 100) {
  umwave::Rng rng = umwave::make_rng(cfg.seed, stream);
  return umwave::random_point(pre, rng);
}

}  // namespace fixture
