#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace umwave {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

using Rng = std::mt19937_64;

// Independent generator for a named stream of a scenario seed. Streams are
// derived by hashing (seed, stream) so that consumers never share draws.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t kInitialPoint = 1;
inline constexpr std::uint64_t kSvrgSampling = 2;
inline constexpr std::uint64_t kGradcheck = 3;
}  // namespace streams

}  // namespace umwave
