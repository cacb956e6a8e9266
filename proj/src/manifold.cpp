#include "umwave/manifold.hpp"

#include <cmath>
#include <numbers>

#include "umwave/errors.hpp"

namespace umwave {

namespace {
constexpr double kRetractionFloor = 1e-14;
}

WaveformMatrix::WaveformMatrix(CMatrix entries, double tol) : x_(std::move(entries)) {
  const double err = max_modulus_error();
  if (!(err <= tol)) {
    throw DomainError("waveform entries must have unit modulus (max deviation " + std::to_string(err) + ")");
  }
}

WaveformMatrix WaveformMatrix::from_phases(const Eigen::MatrixXd& phases) {
  CMatrix x(phases.rows(), phases.cols());
  for (Eigen::Index j = 0; j < phases.cols(); ++j) {
    for (Eigen::Index i = 0; i < phases.rows(); ++i) x(i, j) = std::polar(1.0, phases(i, j));
  }
  return WaveformMatrix(std::move(x), Unchecked{});
}

WaveformMatrix WaveformMatrix::normalize(const CMatrix& z) {
  CMatrix x(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double mag = std::abs(z(i, j));
      if (!(mag >= kRetractionFloor)) {
        throw RetractionError("retraction singularity: |x + xi| = " + std::to_string(mag) + " at (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      x(i, j) = z(i, j) / mag;
    }
  }
  return WaveformMatrix(std::move(x), Unchecked{});
}

double WaveformMatrix::max_modulus_error() const {
  if (x_.size() == 0) return 0.0;
  return (x_.cwiseAbs().array() - 1.0).abs().maxCoeff();
}

ProductTangent& ProductTangent::operator+=(const ProductTangent& o) {
  alpha += o.alpha;
  x += o.x;
  return *this;
}

ProductTangent& ProductTangent::operator-=(const ProductTangent& o) {
  alpha -= o.alpha;
  x -= o.x;
  return *this;
}

ProductTangent& ProductTangent::operator*=(double s) {
  alpha *= s;
  x *= s;
  return *this;
}

ProductTangent operator+(ProductTangent a, const ProductTangent& b) { return a += b; }
ProductTangent operator-(ProductTangent a, const ProductTangent& b) { return a -= b; }
ProductTangent operator*(double s, ProductTangent t) { return t *= s; }

CMatrix project_tangent(const WaveformMatrix& x, const CMatrix& z) {
  const CMatrix& X = x.matrix();
  // Re(z * conj(x)) is the radial component of each entry.
  const Eigen::ArrayXXd radial = (z.array() * X.array().conjugate()).real();
  return z.array() - radial.cast<cdouble>() * X.array();
}

double tangency_defect(const WaveformMatrix& x, const CMatrix& xi) {
  if (xi.size() == 0) return 0.0;
  return (xi.array() * x.matrix().array().conjugate()).real().abs().maxCoeff();
}

double inner(const ProductTangent& u, const ProductTangent& v) {
  // Re Tr(U^H V) = sum Re(conj(u) v)
  return u.alpha * v.alpha + (u.x.array().conjugate() * v.x.array()).real().sum();
}

double norm(const ProductTangent& u) { return std::sqrt(inner(u, u)); }

ProductPoint retract(const ProductPoint& p, const ProductTangent& t) {
  return {p.alpha + t.alpha, WaveformMatrix::normalize(p.x.matrix() + t.x)};
}

ProductTangent transport_to(const ProductPoint& target, const ProductTangent& t) {
  return {t.alpha, project_tangent(target.x, t.x)};
}

WaveformMatrix random_waveform(int n, int m, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::MatrixXd phases(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) phases(i, j) = phase(rng);
  }
  return WaveformMatrix::from_phases(phases);
}

ProductTangent random_tangent(const ProductPoint& p, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(p.x.rows(), p.x.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double re = g(rng);
      const double im = g(rng);
      z(i, j) = cdouble(re, im);
    }
  }
  const double a = g(rng);
  return {a, project_tangent(p.x, z)};
}

}  // namespace umwave
