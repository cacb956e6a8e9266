#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umwave/cli.hpp"

namespace cli = umwave::cli;

int main(int argc, char** argv) {
  CLI::App app{"Unimodular MIMO radar waveform design"};
  app.set_version_flag("--version", std::string(UMWAVE_VERSION));
  app.require_subcommand(1);

  cli::DesignOptions design;
  auto* design_cmd = app.add_subcommand("design", "optimize a waveform and write out/ artifacts");
  design_cmd->add_option("scenario", design.scenario, "scenario JSON or run manifest")->required();
  design_cmd->add_option("--out", design.out_dir, "output directory")->capture_default_str();
  design_cmd->add_option("--threads", design.threads, "threads for dense linear algebra")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  design_cmd->add_flag("--deterministic", design.deterministic, "zero wall-clock columns");

  cli::EvaluateOptions evaluate;
  std::string eval_out;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score an existing waveform");
  evaluate_cmd->add_option("scenario", evaluate.scenario, "scenario JSON or run manifest")->required();
  evaluate_cmd->add_option("--waveform", evaluate.waveform, "waveform.csv from a design run")->required();
  evaluate_cmd->add_option("--out", eval_out, "write beampattern.csv and correlation.csv here");

  cli::GradcheckOptions gradcheck;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  gradcheck_cmd->add_option("scenario", gradcheck.scenario, "scenario JSON or run manifest")->required();
  gradcheck_cmd->add_option("--trials", gradcheck.trials, "random (point, direction) pairs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gradcheck_cmd->add_flag("--corrupt-gradient", gradcheck.corrupt_gradient)->group("");

  cli::BenchOptions bench;
  std::string algorithms = "um-gd,um-agd,um-svrg";
  auto* bench_cmd = app.add_subcommand("bench", "run several solvers for a fixed gradient budget");
  bench_cmd->add_option("scenario", bench.scenario, "scenario JSON or run manifest")->required();
  bench_cmd->add_option("--algorithms", algorithms, "comma separated solver list")->capture_default_str();
  bench_cmd->add_option("--budget", bench.budget, "normalized gradient budget")->capture_default_str();
  bench_cmd->add_option("--out", bench.out_dir, "output directory")->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "threads for dense linear algebra")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_flag("--deterministic", bench.deterministic, "zero wall-clock columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (*design_cmd) return cli::cmd_design(design, std::cout, std::cerr);
  if (*evaluate_cmd) {
    if (!eval_out.empty()) evaluate.out_dir = eval_out;
    return cli::cmd_evaluate(evaluate, std::cout, std::cerr);
  }
  if (*gradcheck_cmd) return cli::cmd_gradcheck(gradcheck, std::cout, std::cerr);
  if (*bench_cmd) {
    std::stringstream ss(algorithms);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) bench.algorithms.push_back(item);
    }
    return cli::cmd_bench(bench, std::cout, std::cerr);
  }
  return cli::kExitUsage;
}
