#pragma once

#include <Eigen/Core>

#include "srprompt/image.hpp"

namespace srprompt {

/// Square, odd-sized blur kernel. Weights are kept in double regardless of
/// the image scalar.
template <typename Scalar>
using Kernel = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using KernelMatrix = Kernel<double>;

/// Isotropic Gaussian, weights proportional to exp(-(di^2 + dj^2) / (2 sigma^2)),
/// normalized to unit sum. Row index is the vertical offset.
template <typename Scalar = double>
Kernel<Scalar> gaussian_kernel_iso(int eta, Scalar sigma);

/// Rotated bivariate Gaussian with covariance R(theta) diag(sx^2, sy^2) R(theta)^T.
/// sigma_x acts along the horizontal axis at theta = 0.
template <typename Scalar = double>
Kernel<Scalar> gaussian_kernel_aniso(int eta, Scalar sigma_x, Scalar sigma_y, Scalar theta);

/// 2-D convolution with reflect-101 borders, each channel independently.
/// Output is not clamped.
template <typename Scalar>
Image<Scalar> convolve(const Image<Scalar>& image, const KernelMatrix& kernel);

/// Reflect-101 index: -1 -> 1, n -> n - 2.
inline Index reflect101(Index i, Index n) {
  if (n == 1) return 0;
  const Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace srprompt
