#pragma once

#include "srprompt/image.hpp"
#include "srprompt/rng.hpp"

namespace srprompt {

/// out = clamp01(in + n), n ~ N(0, (level/255)^2). With `gray`, one noise
/// plane is drawn and added to every channel.
ImageBuffer add_gaussian_noise(const ImageBuffer& image, double level, bool gray, Rng& rng);

/// Photon-count noise with scale k = 255 / level: out = clamp01(Poisson(in * k) / k).
/// With `gray`, the count is drawn once from the channel-mean intensity and the
/// resulting residual is added to every channel.
ImageBuffer add_poisson_noise(const ImageBuffer& image, double level, bool gray, Rng& rng);

}  // namespace srprompt
