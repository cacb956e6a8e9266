#pragma once

#include "umwave/types.hpp"

namespace umwave {

/// Point on UM(N,M): an N x M complex matrix with unit-modulus entries.
class WaveformMatrix {
 public:
  static constexpr double kModulusTolerance = 1e-12;

  /// Validates |x_nm| = 1 within `tol`; throws DomainError otherwise.
  explicit WaveformMatrix(CMatrix entries, double tol = kModulusTolerance);

  /// Entrywise exp(j*phase).
  static WaveformMatrix from_phases(const Eigen::MatrixXd& phases);

  /// Entrywise z / |z|. Throws RetractionError when some |z| < 1e-14.
  static WaveformMatrix normalize(const CMatrix& z);

  const CMatrix& matrix() const noexcept { return x_; }
  Eigen::Index rows() const noexcept { return x_.rows(); }
  Eigen::Index cols() const noexcept { return x_.cols(); }

  double max_modulus_error() const;

 private:
  struct Unchecked {};
  WaveformMatrix(CMatrix entries, Unchecked) : x_(std::move(entries)) {}

  CMatrix x_;
};

struct ProductPoint {
  double alpha = 0.0;
  WaveformMatrix x;
};

/// Tangent vector (xi_alpha, Xi) at some point of R x UM(N,M). The anchor
/// point is implied by the call site.
struct ProductTangent {
  double alpha = 0.0;
  CMatrix x;

  ProductTangent& operator+=(const ProductTangent& o);
  ProductTangent& operator-=(const ProductTangent& o);
  ProductTangent& operator*=(double s);
};

ProductTangent operator+(ProductTangent a, const ProductTangent& b);
ProductTangent operator-(ProductTangent a, const ProductTangent& b);
ProductTangent operator*(double s, ProductTangent t);

/// Orthogonal projection onto T_X UM: Z - Re(Z o X*) o X.
CMatrix project_tangent(const WaveformMatrix& x, const CMatrix& z);

/// Largest |Re(Xi o X*)| entry; zero for exact tangent vectors.
double tangency_defect(const WaveformMatrix& x, const CMatrix& xi);

/// Product metric xi_a*eta_a + Re Tr(Xi^H Eta). It does not depend on the point.
double inner(const ProductTangent& u, const ProductTangent& v);
double norm(const ProductTangent& u);

/// (alpha + xi_alpha, (X + Xi) / |X + Xi| entrywise).
ProductPoint retract(const ProductPoint& p, const ProductTangent& t);

/// Projection transport onto the tangent space at `target`; alpha passes through.
ProductTangent transport_to(const ProductPoint& target, const ProductTangent& t);

/// i.i.d. phases uniform on [0, 2*pi).
WaveformMatrix random_waveform(int n, int m, Rng& rng);

/// Standard complex Gaussian matrix projected onto T_X; alpha ~ N(0, 1).
ProductTangent random_tangent(const ProductPoint& p, Rng& rng);

}  // namespace umwave
