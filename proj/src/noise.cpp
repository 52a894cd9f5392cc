#include "srprompt/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace srprompt {

namespace {

void check_level(double level, const char* what) {
  if (!(level > 0.0) || !std::isfinite(level))
    throw InvalidArgument(std::string(what) + " noise level must be positive");
}

double poisson_sample(double lambda, Rng& rng) {
  if (lambda <= 0.0) return 0.0;
  std::poisson_distribution<long long> dist(lambda);
  return static_cast<double>(dist(rng));
}

}  // namespace

ImageBuffer add_gaussian_noise(const ImageBuffer& image, double level, bool gray, Rng& rng) {
  check_level(level, "gaussian");
  std::normal_distribution<double> normal(0.0, level / 255.0);
  const Index h = image.height(), w = image.width();
  ImageBuffer out = image;

  if (gray) {
    ImageBuffer::Plane noise(h, w);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) noise(y, x) = static_cast<float>(normal(rng));
    for (Index c = 0; c < out.channels(); ++c) out.plane(c) += noise;
  } else {
    for (Index c = 0; c < out.channels(); ++c)
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) out(y, x, c) += static_cast<float>(normal(rng));
  }
  return clamp01(std::move(out));
}

ImageBuffer add_poisson_noise(const ImageBuffer& image, double level, bool gray, Rng& rng) {
  check_level(level, "poisson");
  const double photons = 255.0 / level;
  const Index h = image.height(), w = image.width();
  ImageBuffer out = image;
  const auto count = [&](double intensity) {
    return poisson_sample(std::max(intensity, 0.0) * photons, rng) / photons;
  };

  if (gray) {
    const ImageBuffer::Plane mean = [&] {
      ImageBuffer::Plane m = ImageBuffer::Plane::Zero(h, w);
      for (Index c = 0; c < image.channels(); ++c) m += image.plane(c);
      return ImageBuffer::Plane(m / static_cast<float>(image.channels()));
    }();
    ImageBuffer::Plane residual(h, w);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        const double m = mean(y, x);
        residual(y, x) = static_cast<float>(count(m) - m);
      }
    for (Index c = 0; c < out.channels(); ++c) out.plane(c) += residual;
  } else {
    for (Index c = 0; c < out.channels(); ++c)
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) out(y, x, c) = static_cast<float>(count(image(y, x, c)));
  }
  return clamp01(std::move(out));
}

}  // namespace srprompt
