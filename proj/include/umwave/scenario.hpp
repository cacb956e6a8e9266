#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "umwave/types.hpp"

namespace umwave {

enum class Algorithm { kGd, kAgd, kSvrg };
enum class SamplingMode { kPaperFaithful, kUnbiased };

std::string to_string(Algorithm a);
std::string to_string(SamplingMode m);
Algorithm parse_algorithm(const std::string& name);
SamplingMode parse_sampling_mode(const std::string& name);

/// Fixed-step Riemannian gradient descent. The step must lie in (0, 2/L)
/// for the sufficient-decrease guarantee; L is not known in closed form, so
/// choosing it is left to the caller.
struct GdConfig {
  double step_size = 1e-9;
  int max_iters = 1000;
  double grad_tol = 0.0;
};

/// Armijo backtracking: t_k = beta^m * t_bar with the smallest m >= 0 that
/// gives f(x_k) - f(R(-t_k g)) >= sigma * t_k * |g|^2.
struct AgdConfig {
  double t_bar = 1.0;
  double beta = 0.5;
  double sigma = 1e-4;
  int max_iters = 1000;
  double grad_tol = 0.0;
  int max_backtracks = 80;
};

struct SvrgConfig {
  int m_inner = 0;  // 0 resolves to 2*|D| when a scenario is loaded
  double t0 = 1e-9;
  double lambda = 0.0;
  int max_epochs = 50;
  double grad_tol = 0.0;
  SamplingMode sampling_mode = SamplingMode::kUnbiased;
};

struct SolverSettings {
  Algorithm algorithm = Algorithm::kAgd;
  GdConfig gd;
  AgdConfig agd;
  SvrgConfig svrg;
};

struct Mainlobe {
  double center_deg = 0.0;
  double half_width_deg = 0.0;
};

/// Fully validated, immutable problem description.
struct ScenarioConfig {
  int m_antennas = 0;
  int n_samples = 0;
  double angle_spacing_deg = 0.1;
  std::vector<double> angle_grid;       // open interval (-90, 90), increasing
  std::vector<double> interest_angles;  // snapped onto angle_grid
  std::vector<int> delay_set;           // sorted, unique, each in [0, N]
  std::vector<Mainlobe> mainlobes;
  double weight_wc = 25.0;
  std::uint64_t seed = 0;
  SolverSettings solver;
};

/// Raw scenario fields before validation; absent optionals take defaults.
struct ScenarioInput {
  std::optional<int> m_antennas;
  std::optional<int> n_samples;
  std::optional<double> angle_spacing_deg;
  std::optional<std::vector<double>> interest_angles_deg;
  std::optional<int> delay_max;
  std::optional<std::vector<int>> delay_set;
  std::optional<std::vector<Mainlobe>> mainlobes;
  std::optional<double> weight_wc;
  std::optional<std::uint64_t> seed;
  SolverSettings solver;
  // Solver keys present in the input; unset ones are resolved from the scenario.
  bool has_gd_grad_tol = false;
  bool has_agd_grad_tol = false;
  bool has_svrg_grad_tol = false;
};

struct SteeringVector {
  CVector entries;
  double angle_deg = 0.0;
};

/// Angles -90 + k*spacing strictly inside (-90, 90).
std::vector<double> build_angle_grid(double spacing_deg);

/// Half-wavelength ULA: a[k] = exp(j*pi*k*sin(theta)), k = 0..m-1.
SteeringVector steering_vector(double theta_deg, int m);

/// M x |angles| matrix whose columns are steering vectors.
CMatrix steering_matrix(const std::vector<double>& angles_deg, int m);

/// 1 inside any [center - half_width, center + half_width], else 0.
double desired_beampattern(double theta_deg, const std::vector<Mainlobe>& mainlobes);
double desired_beampattern(double theta_deg, const ScenarioConfig& cfg);

ScenarioConfig validate_scenario(const ScenarioInput& input);
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Round-trippable scenario document (uses `delay_set`).
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

}  // namespace umwave
