#include "srprompt/filter.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace srprompt {

namespace {

void check_eta(int eta) {
  if (eta < 3 || eta % 2 == 0)
    throw InvalidArgument("kernel width must be odd and >= 3, got " + std::to_string(eta));
}

template <typename Scalar>
void check_sigma(Scalar sigma, const char* name) {
  if (!(sigma > Scalar(0)) || !std::isfinite(static_cast<double>(sigma)))
    throw InvalidArgument(std::string(name) + " must be positive");
}

using PlaneD = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PlaneD pad_reflect101(const PlaneD& src, Index radius) {
  const Index h = src.rows(), w = src.cols();
  PlaneD out(h + 2 * radius, w + 2 * radius);
  for (Index y = 0; y < out.rows(); ++y) {
    const Index sy = reflect101(y - radius, h);
    for (Index x = 0; x < out.cols(); ++x) out(y, x) = src(sy, reflect101(x - radius, w));
  }
  return out;
}

// Rank-1 test: a Gaussian with axis-aligned covariance factors exactly into
// its row and column marginals.
bool separable(const KernelMatrix& k, Eigen::VectorXd& vertical, Eigen::RowVectorXd& horizontal) {
  vertical = k.rowwise().sum();
  horizontal = k.colwise().sum();
  const double err = (k - vertical * horizontal).cwiseAbs().maxCoeff();
  return err <= 1e-12 * k.cwiseAbs().maxCoeff();
}

PlaneD convolve_plane(const PlaneD& src, const KernelMatrix& k) {
  const Index r = k.rows() / 2;
  const Index h = src.rows(), w = src.cols();
  const PlaneD padded = pad_reflect101(src, r);

  Eigen::VectorXd vertical;
  Eigen::RowVectorXd horizontal;
  if (separable(k, vertical, horizontal)) {
    // Horizontal pass over the padded rows, then vertical.
    PlaneD tmp = PlaneD::Zero(h + 2 * r, w);
    for (Index j = 0; j < k.cols(); ++j)
      tmp += horizontal(j) * padded.block(0, 2 * r - j, h + 2 * r, w);
    PlaneD out = PlaneD::Zero(h, w);
    for (Index i = 0; i < k.rows(); ++i) out += vertical(i) * tmp.block(2 * r - i, 0, h, w);
    return out;
  }

  PlaneD out = PlaneD::Zero(h, w);
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = 0; j < k.cols(); ++j) {
      const double weight = k(i, j);
      if (weight == 0.0) continue;
      out += weight * padded.block(2 * r - i, 2 * r - j, h, w);
    }
  return out;
}

}  // namespace

template <typename Scalar>
Kernel<Scalar> gaussian_kernel_iso(int eta, Scalar sigma) {
  check_eta(eta);
  check_sigma(sigma, "sigma");
  const int r = eta / 2;
  const Scalar denom = Scalar(2) * sigma * sigma;
  Kernel<Scalar> k(eta, eta);
  for (int i = 0; i < eta; ++i)
    for (int j = 0; j < eta; ++j) {
      const Scalar di = Scalar(i - r), dj = Scalar(j - r);
      k(i, j) = std::exp(-(di * di + dj * dj) / denom);
    }
  return k / k.sum();
}

template <typename Scalar>
Kernel<Scalar> gaussian_kernel_aniso(int eta, Scalar sigma_x, Scalar sigma_y, Scalar theta) {
  check_eta(eta);
  check_sigma(sigma_x, "sigma_x");
  check_sigma(sigma_y, "sigma_y");
  using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  const Scalar c = std::cos(theta), s = std::sin(theta);
  Mat2 rot;
  rot << c, -s, s, c;
  const Vec2 inv_var(Scalar(1) / (sigma_x * sigma_x), Scalar(1) / (sigma_y * sigma_y));
  const Mat2 precision = rot * inv_var.asDiagonal() * rot.transpose();

  const int r = eta / 2;
  Kernel<Scalar> k(eta, eta);
  for (int i = 0; i < eta; ++i)
    for (int j = 0; j < eta; ++j) {
      const Vec2 d(Scalar(j - r), Scalar(i - r));  // (horizontal, vertical)
      k(i, j) = std::exp(Scalar(-0.5) * d.dot(precision * d));
    }
  return k / k.sum();
}

template <typename Scalar>
Image<Scalar> convolve(const Image<Scalar>& image, const KernelMatrix& kernel) {
  if (kernel.rows() != kernel.cols() || kernel.rows() % 2 == 0)
    throw InvalidArgument("kernel must be square with odd side");
  std::vector<typename Image<Scalar>::Plane> out;
  out.reserve(static_cast<std::size_t>(image.channels()));
  for (Index c = 0; c < image.channels(); ++c)
    out.push_back(convolve_plane(image.plane(c).template cast<double>(), kernel)
                      .template cast<Scalar>());
  return Image<Scalar>(std::move(out));
}

template Kernel<double> gaussian_kernel_iso<double>(int, double);
template Kernel<float> gaussian_kernel_iso<float>(int, float);
template Kernel<double> gaussian_kernel_aniso<double>(int, double, double, double);
template Kernel<float> gaussian_kernel_aniso<float>(int, float, float, float);
template Image<float> convolve<float>(const Image<float>&, const KernelMatrix&);
template Image<double> convolve<double>(const Image<double>&, const KernelMatrix&);

}  // namespace srprompt
