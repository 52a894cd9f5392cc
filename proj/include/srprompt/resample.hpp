#pragma once

#include <Eigen/Core>

#include <string_view>

#include "srprompt/image.hpp"

namespace srprompt {

enum class ResizeMethod { area, bilinear, bicubic };

std::string_view to_string(ResizeMethod m);
ResizeMethod resize_method_from_string(std::string_view s);

/// Dense 1-D resampling operator mapping `in_size` samples to `out_size`.
/// Rows sum to one. Pixel-center alignment: src = (dst + 0.5) * in/out - 0.5.
/// Bilinear and bicubic (Keys, a = -0.5) replicate the border; area weights
/// are exact interval overlaps.
Eigen::MatrixXd resample_matrix(Index in_size, Index out_size, ResizeMethod method);

/// Separable resize: out = R_rows * plane * R_cols^T per channel. No clamping.
template <typename Scalar>
Image<Scalar> resize(const Image<Scalar>& image, Index out_height, Index out_width,
                     ResizeMethod method);

}  // namespace srprompt
