#include "srprompt/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srprompt {

std::string_view to_string(ResizeMethod m) {
  switch (m) {
    case ResizeMethod::area: return "area";
    case ResizeMethod::bilinear: return "bilinear";
    case ResizeMethod::bicubic: return "bicubic";
  }
  return "?";
}

ResizeMethod resize_method_from_string(std::string_view s) {
  if (s == "area") return ResizeMethod::area;
  if (s == "bilinear") return ResizeMethod::bilinear;
  if (s == "bicubic") return ResizeMethod::bicubic;
  throw InvalidArgument("unknown resize method: " + std::string(s));
}

namespace {

double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  return 0.0;
}

}  // namespace

Eigen::MatrixXd resample_matrix(Index in_size, Index out_size, ResizeMethod method) {
  if (in_size <= 0 || out_size <= 0) throw InvalidArgument("resize dimensions must be >= 1");
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(out_size, in_size);
  const auto clamp_index = [&](Index i) { return std::clamp<Index>(i, 0, in_size - 1); };

  for (Index d = 0; d < out_size; ++d) {
    switch (method) {
      case ResizeMethod::area: {
        const double lo = static_cast<double>(d) * scale;
        const double hi = lo + scale;
        for (Index s = static_cast<Index>(std::floor(lo)); s < in_size && static_cast<double>(s) < hi; ++s) {
          const double overlap =
              std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
          if (overlap > 0.0) m(d, s) += overlap / scale;
        }
        break;
      }
      case ResizeMethod::bilinear: {
        const double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double frac = src - base;
        const auto i0 = static_cast<Index>(base);
        m(d, clamp_index(i0)) += 1.0 - frac;
        m(d, clamp_index(i0 + 1)) += frac;
        break;
      }
      case ResizeMethod::bicubic: {
        const double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double frac = src - base;
        const auto i0 = static_cast<Index>(base);
        for (Index k = -1; k <= 2; ++k)
          m(d, clamp_index(i0 + k)) += cubic_weight(static_cast<double>(k) - frac);
        break;
      }
    }
  }
  return m;
}

template <typename Scalar>
Image<Scalar> resize(const Image<Scalar>& image, Index out_height, Index out_width,
                     ResizeMethod method) {
  if (out_height <= 0 || out_width <= 0) throw InvalidArgument("resize dimensions must be >= 1");
  const Eigen::MatrixXd rows = resample_matrix(image.height(), out_height, method);
  const Eigen::MatrixXd cols = resample_matrix(image.width(), out_width, method);
  std::vector<typename Image<Scalar>::Plane> out;
  out.reserve(static_cast<std::size_t>(image.channels()));
  for (Index c = 0; c < image.channels(); ++c) {
    const Eigen::MatrixXd src = image.plane(c).template cast<double>().matrix();
    const Eigen::MatrixXd dst = rows * src * cols.transpose();
    out.push_back(dst.array().template cast<Scalar>());
  }
  return Image<Scalar>(std::move(out));
}

template Image<float> resize<float>(const Image<float>&, Index, Index, ResizeMethod);
template Image<double> resize<double>(const Image<double>&, Index, Index, ResizeMethod);

}  // namespace srprompt
