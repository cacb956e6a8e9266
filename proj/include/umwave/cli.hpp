#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "umwave/scenario.hpp"

namespace umwave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct DesignOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir = "out";
  int threads = 1;
  bool deterministic = false;
};

struct GradcheckOptions {
  std::filesystem::path scenario;
  int trials = 20;
  // Test fixture: perturbs the analytic gradient so the check must fail.
  bool corrupt_gradient = false;
};

struct EvaluateOptions {
  std::filesystem::path scenario;
  std::filesystem::path waveform;
  std::optional<std::filesystem::path> out_dir;
};

struct BenchOptions {
  std::filesystem::path scenario;
  std::vector<std::string> algorithms;
  // Normalized gradient budget (gradient evaluations / |D|).
  double budget = 100.0;
  std::filesystem::path out_dir = "bench";
  int threads = 1;
  bool deterministic = false;
};

inline constexpr std::array<double, 3> kGradcheckSteps = {1e-5, 1e-6, 1e-7};
inline constexpr double kGradcheckThreshold = 1e-4;

struct GradcheckSummary {
  int trials = 0;
  std::array<double, 3> worst_per_step{};  // worst relative error at each h
  double worst = 0.0;                      // worst over trials of the best h
  int worst_trial = -1;
  bool passed = true;
};

/// Relative error between the analytic directional derivative and the
/// central difference along a retraction curve, over `trials` seeded
/// (point, tangent) pairs drawn from the scenario seed.
GradcheckSummary run_gradcheck(const ScenarioConfig& cfg, int trials, bool corrupt_gradient);

int cmd_design(const DesignOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

/// Scenario file or the `config` object of a run manifest.
ScenarioConfig load_scenario_or_manifest(const std::filesystem::path& path);

}  // namespace umwave::cli
