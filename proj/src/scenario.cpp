#include "umwave/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "umwave/errors.hpp"

namespace umwave {

namespace {

using nlohmann::json;

constexpr double kAngleTol = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double round_angle(double v) { return std::round(v * 1e10) / 1e10; }

const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys = {
      "m_antennas", "n_samples", "angle_spacing_deg", "interest_angles_deg", "delay_max",
      "delay_set",  "mainlobes", "weight_wc",         "seed",                "solver"};
  return keys;
}

const std::set<std::string>& solver_keys() {
  static const std::set<std::string> keys = {
      "algorithm", "step_size", "t_bar",      "beta",     "sigma",         "t0",
      "lambda",    "m_inner",   "max_iters",  "max_epochs", "grad_tol", "sampling_mode",
      "max_backtracks"};
  return keys;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + item.key(), "unknown key");
    }
  }
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

long long get_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<long long>();
}

int get_int(const json& v, const std::string& field) {
  const long long x = get_integer(v, field);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "integer out of range");
  }
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array");
  return v;
}

void parse_solver(const json& s, ScenarioInput& in) {
  if (!s.is_object()) throw ConfigError("solver", "expected an object");
  reject_unknown(s, solver_keys(), "solver.");
  SolverSettings& out = in.solver;
  auto field = [](const char* k) { return std::string("solver.") + k; };
  if (s.contains("algorithm")) {
    try {
      out.algorithm = parse_algorithm(get_string(s["algorithm"], field("algorithm")));
    } catch (const DomainError& e) {
      throw ConfigError(field("algorithm"), e.what());
    }
  }
  if (s.contains("step_size")) out.gd.step_size = get_number(s["step_size"], field("step_size"));
  if (s.contains("t_bar")) out.agd.t_bar = get_number(s["t_bar"], field("t_bar"));
  if (s.contains("beta")) out.agd.beta = get_number(s["beta"], field("beta"));
  if (s.contains("sigma")) out.agd.sigma = get_number(s["sigma"], field("sigma"));
  if (s.contains("max_backtracks")) {
    out.agd.max_backtracks = get_int(s["max_backtracks"], field("max_backtracks"));
  }
  if (s.contains("t0")) out.svrg.t0 = get_number(s["t0"], field("t0"));
  if (s.contains("lambda")) out.svrg.lambda = get_number(s["lambda"], field("lambda"));
  if (s.contains("m_inner")) out.svrg.m_inner = get_int(s["m_inner"], field("m_inner"));
  if (s.contains("max_iters")) {
    const int it = get_int(s["max_iters"], field("max_iters"));
    out.gd.max_iters = it;
    out.agd.max_iters = it;
  }
  if (s.contains("max_epochs")) out.svrg.max_epochs = get_int(s["max_epochs"], field("max_epochs"));
  if (s.contains("grad_tol")) {
    const double tol = get_number(s["grad_tol"], field("grad_tol"));
    out.gd.grad_tol = out.agd.grad_tol = out.svrg.grad_tol = tol;
    in.has_gd_grad_tol = in.has_agd_grad_tol = in.has_svrg_grad_tol = true;
  }
  if (s.contains("sampling_mode")) {
    try {
      out.svrg.sampling_mode = parse_sampling_mode(get_string(s["sampling_mode"], field("sampling_mode")));
    } catch (const DomainError& e) {
      throw ConfigError(field("sampling_mode"), e.what());
    }
  }
}

void validate_solver(SolverSettings& s, const ScenarioInput& in, int n, int m, std::size_t n_delays) {
  const double default_tol = 1e-6 * std::sqrt(static_cast<double>(n) * m);
  if (!in.has_gd_grad_tol) s.gd.grad_tol = default_tol;
  if (!in.has_agd_grad_tol) s.agd.grad_tol = default_tol;
  if (!in.has_svrg_grad_tol) s.svrg.grad_tol = default_tol;
  if (s.svrg.m_inner == 0) s.svrg.m_inner = static_cast<int>(2 * n_delays);
  if (s.svrg.lambda == 0.0 && s.svrg.t0 > 0.0) s.svrg.lambda = 0.01 / s.svrg.t0;

  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("solver.") + name, "must be positive");
  };
  auto open_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string("solver.") + name, "must lie in (0, 1)");
  };
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string("solver.") + name, "must be nonnegative");
  };
  positive(s.gd.step_size, "step_size");
  positive(s.agd.t_bar, "t_bar");
  open_unit(s.agd.beta, "beta");
  open_unit(s.agd.sigma, "sigma");
  positive(s.svrg.t0, "t0");
  positive(s.svrg.lambda, "lambda");
  nonneg(s.gd.grad_tol, "grad_tol");
  nonneg(s.agd.grad_tol, "grad_tol");
  nonneg(s.svrg.grad_tol, "grad_tol");
  if (s.gd.max_iters < 0 || s.agd.max_iters < 0) throw ConfigError("solver.max_iters", "must be nonnegative");
  if (s.svrg.max_epochs < 0) throw ConfigError("solver.max_epochs", "must be nonnegative");
  if (s.svrg.m_inner < 1) throw ConfigError("solver.m_inner", "must be positive");
  if (s.agd.max_backtracks < 1) throw ConfigError("solver.max_backtracks", "must be positive");
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)));
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kGd: return "um-gd";
    case Algorithm::kAgd: return "um-agd";
    case Algorithm::kSvrg: return "um-svrg";
  }
  return "unknown";
}

std::string to_string(SamplingMode m) {
  return m == SamplingMode::kUnbiased ? "unbiased" : "paper-faithful";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "um-gd") return Algorithm::kGd;
  if (name == "um-agd") return Algorithm::kAgd;
  if (name == "um-svrg") return Algorithm::kSvrg;
  throw DomainError("unknown algorithm '" + name + "' (expected um-gd, um-agd or um-svrg)");
}

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "unbiased") return SamplingMode::kUnbiased;
  if (name == "paper-faithful") return SamplingMode::kPaperFaithful;
  throw DomainError("unknown sampling mode '" + name + "' (expected unbiased or paper-faithful)");
}

std::vector<double> build_angle_grid(double spacing_deg) {
  if (!(spacing_deg > 0.0) || !(spacing_deg < 180.0) || !std::isfinite(spacing_deg)) {
    throw ConfigError("angle_spacing_deg", "must lie in (0, 180)");
  }
  const double ratio = 180.0 / spacing_deg;
  const double nearest = std::round(ratio);
  // Multiples landing on +90 (within roundoff) belong to the closed endpoint.
  const auto count = static_cast<std::size_t>(
      std::abs(ratio - nearest) < 1e-9 * std::max(1.0, ratio) ? nearest - 1.0 : std::floor(ratio));
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    grid.push_back(round_angle(-90.0 + static_cast<double>(k) * spacing_deg));
  }
  return grid;
}

SteeringVector steering_vector(double theta_deg, int m) {
  if (!(std::abs(theta_deg) < 90.0)) throw DomainError("steering angle must lie in (-90, 90) degrees");
  if (m < 1) throw DomainError("steering vector needs at least one element");
  const double phase = std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
  SteeringVector sv;
  sv.angle_deg = theta_deg;
  sv.entries.resize(m);
  for (int k = 0; k < m; ++k) sv.entries[k] = std::polar(1.0, phase * k);
  return sv;
}

CMatrix steering_matrix(const std::vector<double>& angles_deg, int m) {
  CMatrix a(m, static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t i = 0; i < angles_deg.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = steering_vector(angles_deg[i], m).entries;
  }
  return a;
}

double desired_beampattern(double theta_deg, const std::vector<Mainlobe>& mainlobes) {
  for (const auto& lobe : mainlobes) {
    if (std::abs(theta_deg - lobe.center_deg) <= lobe.half_width_deg + kAngleTol) return 1.0;
  }
  return 0.0;
}

double desired_beampattern(double theta_deg, const ScenarioConfig& cfg) {
  return desired_beampattern(theta_deg, cfg.mainlobes);
}

ScenarioConfig validate_scenario(const ScenarioInput& in) {
  ScenarioConfig cfg;
  if (!in.m_antennas) throw ConfigError("m_antennas", "required");
  if (!in.n_samples) throw ConfigError("n_samples", "required");
  cfg.m_antennas = *in.m_antennas;
  cfg.n_samples = *in.n_samples;
  if (cfg.m_antennas < 1) throw ConfigError("m_antennas", "must be positive");
  if (cfg.n_samples <= cfg.m_antennas) {
    throw ConfigError("n_samples", "n_samples must exceed m_antennas");
  }

  cfg.angle_spacing_deg = in.angle_spacing_deg.value_or(0.1);
  cfg.angle_grid = build_angle_grid(cfg.angle_spacing_deg);

  cfg.mainlobes = in.mainlobes.value_or(std::vector<Mainlobe>{{-40.0, 10.0}, {30.0, 10.0}});
  for (const auto& lobe : cfg.mainlobes) {
    if (!(std::abs(lobe.center_deg) < 90.0)) throw ConfigError("mainlobes", "center_deg must lie in (-90, 90)");
    if (!(lobe.half_width_deg >= 0.0)) throw ConfigError("mainlobes", "half_width_deg must be nonnegative");
  }

  std::vector<double> requested;
  if (in.interest_angles_deg) {
    requested = *in.interest_angles_deg;
  } else {
    for (const auto& lobe : cfg.mainlobes) requested.push_back(lobe.center_deg);
  }
  if (requested.empty()) throw ConfigError("interest_angles_deg", "must not be empty");
  for (double theta : requested) {
    if (!(std::abs(theta) < 90.0)) throw ConfigError("interest_angles_deg", "angles must lie in (-90, 90)");
    const auto it = std::lower_bound(cfg.angle_grid.begin(), cfg.angle_grid.end(), theta);
    double best = std::numeric_limits<double>::infinity();
    double snapped = theta;
    for (auto cand : {it, it == cfg.angle_grid.begin() ? it : std::prev(it)}) {
      if (cand == cfg.angle_grid.end()) continue;
      if (std::abs(*cand - theta) < best) {
        best = std::abs(*cand - theta);
        snapped = *cand;
      }
    }
    if (best > 0.5 * cfg.angle_spacing_deg + kAngleTol) {
      throw ConfigError("interest_angles_deg", "angle " + std::to_string(theta) + " is not on the angle grid");
    }
    if (std::find(cfg.interest_angles.begin(), cfg.interest_angles.end(), snapped) != cfg.interest_angles.end()) {
      throw ConfigError("interest_angles_deg", "duplicate angle after snapping to the grid");
    }
    cfg.interest_angles.push_back(snapped);
  }

  if (in.delay_max && in.delay_set) throw ConfigError("delay_set", "give either delay_max or delay_set, not both");
  if (in.delay_max) {
    if (*in.delay_max < 0 || *in.delay_max > cfg.n_samples) {
      throw ConfigError("delay_max", "must lie in [0, n_samples]");
    }
    for (int t = 0; t <= *in.delay_max; ++t) cfg.delay_set.push_back(t);
  } else if (in.delay_set) {
    cfg.delay_set = *in.delay_set;
    if (cfg.delay_set.empty()) throw ConfigError("delay_set", "must not be empty");
    for (int t : cfg.delay_set) {
      if (t < 0 || t > cfg.n_samples) throw ConfigError("delay_set", "delay " + std::to_string(t) + " outside [0, n_samples]");
    }
    std::sort(cfg.delay_set.begin(), cfg.delay_set.end());
    if (std::adjacent_find(cfg.delay_set.begin(), cfg.delay_set.end()) != cfg.delay_set.end()) {
      throw ConfigError("delay_set", "duplicate delay");
    }
  } else {
    throw ConfigError("delay_set", "one of delay_max or delay_set is required");
  }

  cfg.weight_wc = in.weight_wc.value_or(25.0);
  if (!(cfg.weight_wc > 0.0) || !std::isfinite(cfg.weight_wc)) throw ConfigError("weight_wc", "must be positive");
  cfg.seed = in.seed.value_or(0);

  cfg.solver = in.solver;
  validate_solver(cfg.solver, in, cfg.n_samples, cfg.m_antennas, cfg.delay_set.size());
  return cfg;
}

ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "scenario must be a JSON object");
  reject_unknown(doc, scenario_keys(), "");
  ScenarioInput in;
  if (doc.contains("m_antennas")) in.m_antennas = get_int(doc["m_antennas"], "m_antennas");
  if (doc.contains("n_samples")) in.n_samples = get_int(doc["n_samples"], "n_samples");
  if (doc.contains("angle_spacing_deg")) {
    in.angle_spacing_deg = get_number(doc["angle_spacing_deg"], "angle_spacing_deg");
  }
  if (doc.contains("interest_angles_deg")) {
    std::vector<double> v;
    for (const auto& x : get_array(doc["interest_angles_deg"], "interest_angles_deg")) {
      v.push_back(get_number(x, "interest_angles_deg"));
    }
    in.interest_angles_deg = std::move(v);
  }
  if (doc.contains("delay_max")) in.delay_max = get_int(doc["delay_max"], "delay_max");
  if (doc.contains("delay_set")) {
    std::vector<int> v;
    for (const auto& x : get_array(doc["delay_set"], "delay_set")) v.push_back(get_int(x, "delay_set"));
    in.delay_set = std::move(v);
  }
  if (doc.contains("mainlobes")) {
    std::vector<Mainlobe> lobes;
    for (const auto& x : get_array(doc["mainlobes"], "mainlobes")) {
      if (!x.is_object() || !x.contains("center_deg") || !x.contains("half_width_deg")) {
        throw ConfigError("mainlobes", "each entry needs center_deg and half_width_deg");
      }
      reject_unknown(x, {"center_deg", "half_width_deg"}, "mainlobes.");
      lobes.push_back({get_number(x["center_deg"], "mainlobes.center_deg"),
                       get_number(x["half_width_deg"], "mainlobes.half_width_deg")});
    }
    in.mainlobes = std::move(lobes);
  }
  if (doc.contains("weight_wc")) in.weight_wc = get_number(doc["weight_wc"], "weight_wc");
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    in.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("solver")) parse_solver(doc["solver"], in);
  return validate_scenario(in);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse failure: ") + e.what());
  }
  return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json lobes = json::array();
  for (const auto& l : cfg.mainlobes) lobes.push_back({{"center_deg", l.center_deg}, {"half_width_deg", l.half_width_deg}});
  const auto& s = cfg.solver;
  json solver = {
      {"algorithm", to_string(s.algorithm)},
      {"step_size", s.gd.step_size},
      {"t_bar", s.agd.t_bar},
      {"beta", s.agd.beta},
      {"sigma", s.agd.sigma},
      {"max_backtracks", s.agd.max_backtracks},
      {"t0", s.svrg.t0},
      {"lambda", s.svrg.lambda},
      {"m_inner", s.svrg.m_inner},
      {"max_iters", s.algorithm == Algorithm::kGd ? s.gd.max_iters : s.agd.max_iters},
      {"max_epochs", s.svrg.max_epochs},
      {"grad_tol", s.algorithm == Algorithm::kGd    ? s.gd.grad_tol
                   : s.algorithm == Algorithm::kAgd ? s.agd.grad_tol
                                                    : s.svrg.grad_tol},
      {"sampling_mode", to_string(s.svrg.sampling_mode)},
  };
  return {
      {"m_antennas", cfg.m_antennas},
      {"n_samples", cfg.n_samples},
      {"angle_spacing_deg", cfg.angle_spacing_deg},
      {"interest_angles_deg", cfg.interest_angles},
      {"delay_set", cfg.delay_set},
      {"mainlobes", lobes},
      {"weight_wc", cfg.weight_wc},
      {"seed", cfg.seed},
      {"solver", solver},
  };
}

}  // namespace umwave
