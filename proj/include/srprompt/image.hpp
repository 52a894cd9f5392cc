#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <vector>

#include "srprompt/error.hpp"

namespace srprompt {

using Index = Eigen::Index;

/// Planar H x W x C image. Each channel is a row-major Eigen array so that
/// whole-plane arithmetic stays in expression form.
template <typename Scalar>
class Image {
 public:
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Image() = default;

  Image(Index height, Index width, Index channels, Scalar fill = Scalar(0)) {
    if (height <= 0 || width <= 0) throw InvalidArgument("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw InvalidArgument("image must have 1 or 3 channels");
    planes_.assign(static_cast<std::size_t>(channels), Plane::Constant(height, width, fill));
  }

  explicit Image(std::vector<Plane> planes) : planes_(std::move(planes)) {
    if (planes_.size() != 1 && planes_.size() != 3)
      throw InvalidArgument("image must have 1 or 3 channels");
    for (const auto& p : planes_)
      if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols())
        throw InvalidArgument("channel planes differ in size");
  }

  Index height() const { return planes_.empty() ? 0 : planes_[0].rows(); }
  Index width() const { return planes_.empty() ? 0 : planes_[0].cols(); }
  Index channels() const { return static_cast<Index>(planes_.size()); }
  bool empty() const { return planes_.empty(); }

  Plane& plane(Index c) { return planes_[static_cast<std::size_t>(c)]; }
  const Plane& plane(Index c) const { return planes_[static_cast<std::size_t>(c)]; }

  Scalar& operator()(Index y, Index x, Index c) { return plane(c)(y, x); }
  Scalar operator()(Index y, Index x, Index c) const { return plane(c)(y, x); }

  template <typename Other>
  Image<Other> cast() const {
    std::vector<typename Image<Other>::Plane> out;
    out.reserve(planes_.size());
    for (const auto& p : planes_) out.push_back(p.template cast<Other>());
    return Image<Other>(std::move(out));
  }

  bool all_finite() const {
    for (const auto& p : planes_)
      if (!p.isFinite().all()) return false;
    return true;
  }

  friend bool operator==(const Image& a, const Image& b) {
    if (a.channels() != b.channels() || a.height() != b.height() || a.width() != b.width())
      return false;
    for (Index c = 0; c < a.channels(); ++c)
      if ((a.plane(c) != b.plane(c)).any()) return false;
    return true;
  }

 private:
  std::vector<Plane> planes_;
};

using ImageBuffer = Image<float>;

template <typename Scalar>
Image<Scalar> clamp01(Image<Scalar> image) {
  for (Index c = 0; c < image.channels(); ++c)
    image.plane(c) = image.plane(c).max(Scalar(0)).min(Scalar(1));
  return image;
}

/// Rec. 601 luma; single-channel images are returned unchanged.
template <typename Scalar>
typename Image<Scalar>::Plane luma(const Image<Scalar>& image) {
  if (image.channels() == 1) return image.plane(0);
  return Scalar(0.299) * image.plane(0) + Scalar(0.587) * image.plane(1) +
         Scalar(0.114) * image.plane(2);
}

template <typename Scalar>
Image<Scalar> crop(const Image<Scalar>& image, Index top, Index left, Index height, Index width) {
  if (top < 0 || left < 0 || top + height > image.height() || left + width > image.width())
    throw InvalidArgument("crop window outside image");
  std::vector<typename Image<Scalar>::Plane> out;
  for (Index c = 0; c < image.channels(); ++c)
    out.push_back(image.plane(c).block(top, left, height, width));
  return Image<Scalar>(std::move(out));
}

/// Mean squared error over all samples, in unit-interval units.
template <typename Scalar>
double mse(const Image<Scalar>& a, const Image<Scalar>& b) {
  if (a.channels() != b.channels() || a.height() != b.height() || a.width() != b.width())
    throw InvalidArgument("mse: shape mismatch");
  double acc = 0.0;
  for (Index c = 0; c < a.channels(); ++c)
    acc += (a.plane(c).template cast<double>() - b.plane(c).template cast<double>())
               .square()
               .sum();
  return acc / static_cast<double>(a.channels() * a.height() * a.width());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// 8-bit interleaved pixels, the storage form for codecs.
struct Image8 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;  // row-major, interleaved
};

/// Quantizes to 8 bits, rounding to nearest after clamping to [0,1].
Image8 to_8bit(const ImageBuffer& image);
ImageBuffer from_8bit(const Image8& image);

}  // namespace srprompt
