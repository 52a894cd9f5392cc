#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "srprompt/image.hpp"

namespace srprompt {

using Bytes = std::vector<std::uint8_t>;

enum class ChromaSubsampling { s420, s444 };

/// Baseline sequential JPEG with IJG quality scaling. Quality must lie in [1,100].
Bytes encode_jpeg(const Image8& image, int quality,
                  ChromaSubsampling subsampling = ChromaSubsampling::s420);
Image8 decode_jpeg(const Bytes& bytes);

/// Encode to JPEG and decode back. `quality` is rounded to the nearest
/// integer first; images must be at least 8x8.
ImageBuffer jpeg_roundtrip(const ImageBuffer& image, double quality,
                           ChromaSubsampling subsampling = ChromaSubsampling::s420);

/// 8-bit PNG, fixed zlib settings, no ancillary chunks: byte output is a pure
/// function of the pixels.
Bytes encode_png(const Image8& image);
Image8 decode_png(const Bytes& bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);

/// Decodes PNG or JPEG by signature. Alpha is dropped; gray stays one channel.
Image8 load_image8(const std::filesystem::path& path);
ImageBuffer load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const ImageBuffer& image);

/// Lowercase hex SHA-256.
std::string sha256_hex(const Bytes& bytes);

}  // namespace srprompt
