#include "umwave/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "umwave/errors.hpp"

namespace umwave {

namespace {

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, int line_no) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw EvaluationError(fmt::format("{}:{}: not a number: '{}'", path.string(), line_no, cell));
    }
  }
  return values;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_history_csv(std::ostream& os, const SolverReport& report, bool zero_wall_clock) {
  os << "iter,epoch,f,e,P,grad_norm,step,grad_units,wall_ns\n";
  for (const auto& r : report.records) {
    os << r.iter << ',' << r.epoch << ',' << format_double(r.f) << ',' << format_double(r.e) << ','
       << format_double(r.P) << ',' << format_double(r.grad_norm) << ',' << format_double(r.step) << ','
       << r.grad_units << ',' << (zero_wall_clock ? 0 : r.wall_ns) << '\n';
  }
}

void write_waveform_csv(std::ostream& os, const ProductPoint& p) {
  os << "alpha," << format_double(p.alpha) << '\n';
  const CMatrix& x = p.x.matrix();
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index m = 0; m < x.cols(); ++m) {
      if (m > 0) os << ',';
      os << format_double(x(n, m).real()) << ',' << format_double(x(n, m).imag());
    }
    os << '\n';
  }
}

ProductPoint read_waveform_csv(const std::filesystem::path& path, int n, int m, double modulus_tol) {
  std::ifstream is(path);
  if (!is) throw EvaluationError("cannot open waveform file " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("alpha,", 0) != 0) {
    throw EvaluationError(path.string() + ": first line must be 'alpha,<value>'");
  }
  const auto alpha_row = parse_row(line.substr(6), path, 1);
  if (alpha_row.size() != 1) throw EvaluationError(path.string() + ": malformed alpha line");

  CMatrix x(n, m);
  int rows = 0;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto values = parse_row(line, path, line_no);
    if (rows >= n) throw EvaluationError(fmt::format("{}: more than {} waveform rows", path.string(), n));
    if (values.size() != static_cast<std::size_t>(2 * m)) {
      throw EvaluationError(fmt::format("{}:{}: expected {} values ({} re,im pairs), got {}", path.string(),
                                        line_no, 2 * m, m, values.size()));
    }
    for (int k = 0; k < m; ++k) x(rows, k) = cdouble(values[2 * k], values[2 * k + 1]);
    ++rows;
  }
  if (rows != n) throw EvaluationError(fmt::format("{}: expected {} waveform rows, got {}", path.string(), n, rows));

  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double dev = std::abs(std::abs(x(i, j)) - 1.0);
      if (!(dev <= modulus_tol)) {
        throw EvaluationError(fmt::format("{}: entry ({}, {}) has modulus {} (not unimodular)", path.string(), i, j,
                                          std::abs(x(i, j))));
      }
    }
  }
  if (x.size() > 0 && (x.cwiseAbs().array() - 1.0).abs().maxCoeff() <= WaveformMatrix::kModulusTolerance) {
    return {alpha_row[0], WaveformMatrix(std::move(x))};
  }
  return {alpha_row[0], WaveformMatrix::normalize(x)};
}

void write_beampattern_csv(std::ostream& os, const BeampatternCurve& curve) {
  os << "theta_deg,power,desired_scaled\n";
  for (const auto& pt : curve) {
    os << format_double(pt.angle_deg) << ',' << format_double(pt.power) << ',' << format_double(pt.desired_scaled)
       << '\n';
  }
}

void write_correlation_csv(std::ostream& os, const CorrelationTable& table) {
  os << "theta_i_deg,theta_j_deg,tau,level_db\n";
  for (const auto& c : table) {
    os << format_double(c.theta_i_deg) << ',' << format_double(c.theta_j_deg) << ',' << c.tau << ','
       << format_double(c.level_db) << '\n';
  }
}

}  // namespace umwave
