#include "srprompt/image.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>

namespace srprompt {

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / e);
}

Image8 to_8bit(const ImageBuffer& image) {
  Image8 out;
  out.height = static_cast<int>(image.height());
  out.width = static_cast<int>(image.width());
  out.channels = static_cast<int>(image.channels());
  out.data.resize(static_cast<std::size_t>(out.height) * out.width * out.channels);
  // 255 * float is exact in double and never lands on a half, so the tie rule is moot.
  std::size_t i = 0;
  for (Index y = 0; y < image.height(); ++y)
    for (Index x = 0; x < image.width(); ++x)
      for (Index c = 0; c < image.channels(); ++c) {
        const double v = std::clamp(static_cast<double>(image(y, x, c)), 0.0, 1.0) * 255.0;
        out.data[i++] = static_cast<std::uint8_t>(std::nearbyint(v));
      }
  return out;
}

ImageBuffer from_8bit(const Image8& image) {
  ImageBuffer out(image.height, image.width, image.channels);
  std::size_t i = 0;
  for (Index y = 0; y < out.height(); ++y)
    for (Index x = 0; x < out.width(); ++x)
      for (Index c = 0; c < out.channels(); ++c)
        out(y, x, c) = static_cast<float>(image.data[i++]) / 255.0f;
  return out;
}

}  // namespace srprompt
