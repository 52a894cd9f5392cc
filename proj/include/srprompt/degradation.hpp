#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <numbers>
#include <string_view>
#include <vector>

#include "srprompt/codec.hpp"
#include "srprompt/image.hpp"
#include "srprompt/resample.hpp"
#include "srprompt/rng.hpp"

namespace srprompt {

enum class BlurKind { iso, aniso };
enum class NoiseKind { gaussian, poisson };
enum class Stage { blur, resize1, noise, compression, resize2 };
enum class OrderMode { fixed, shuffled };

inline constexpr std::array<Stage, 5> kFixedStageOrder = {
    Stage::blur, Stage::resize1, Stage::noise, Stage::compression, Stage::resize2};

std::string_view to_string(BlurKind k);
std::string_view to_string(NoiseKind k);
std::string_view to_string(Stage s);
std::string_view to_string(OrderMode m);
BlurKind blur_kind_from_string(std::string_view s);
NoiseKind noise_kind_from_string(std::string_view s);
Stage stage_from_string(std::string_view s);
OrderMode order_mode_from_string(std::string_view s);

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Range&) const = default;
};

/// Sampling distributions for one HR -> LR realization. Defaults reproduce the
/// standard x4 setting.
struct DegradationConfig {
  std::array<double, 2> blur_kind_prob{0.5, 0.5};  // iso, aniso
  std::vector<int> eta_choices{7, 9, 11, 13, 15, 17, 19, 21};
  Range sigma_range{0.2, 3.0};
  Range theta_range{0.0, std::numbers::pi};
  std::array<double, 3> resize_method_probs{0.3, 0.4, 0.3};  // area, bilinear, bicubic
  Range gamma1_range{0.15, 1.5};
  bool two_stage_resize = true;
  std::array<double, 2> noise_kind_prob{0.5, 0.5};  // gaussian, poisson
  Range phi1_range{1.0, 30.0};
  Range phi2_range{0.05, 3.0};
  double gray_noise_prob = 0.5;
  Range q_range{30.0, 95.0};
  int scale_factor = 4;
  OrderMode order_mode = OrderMode::fixed;
  ChromaSubsampling jpeg_chroma = ChromaSubsampling::s420;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;

  bool operator==(const DegradationConfig&) const = default;
};

struct DegradationSpec {
  BlurKind blur_kind = BlurKind::iso;
  int eta = 7;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;
  ResizeMethod resize1_method = ResizeMethod::bicubic;
  double gamma1 = 1.0;
  NoiseKind noise_kind = NoiseKind::gaussian;
  double noise_level = 1.0;  // phi1 or phi2 depending on noise_kind
  bool gray_noise = false;
  double jpeg_q = 95.0;
  ResizeMethod resize2_method = ResizeMethod::bicubic;
  std::array<Stage, 5> stage_order = kFixedStageOrder;
  int scale_factor = 4;

  bool operator==(const DegradationSpec&) const = default;
};

/// Draw order per call: blur kind, eta, sigma_x, sigma_y, theta, resize1
/// method, gamma1, noise kind, noise level, gray flag, q, resize2 method, then
/// the stage permutation when shuffled.
DegradationSpec sample_spec(const DegradationConfig& config, Rng& rng);

/// Runs the stages in `spec.stage_order`. The resize2 stage always lands on
/// HR dims / scale_factor; a resize1 scheduled after it becomes a scale
/// excursion (to round(dims * gamma1) and back) so the output size holds for
/// every order. Noise stages and the final output are clamped to [0,1].
ImageBuffer apply(const DegradationSpec& spec, const ImageBuffer& hr, Rng& rng,
                  ChromaSubsampling chroma = ChromaSubsampling::s420);

/// Flat canonical record; doubles round-trip exactly.
nlohmann::json spec_to_record(const DegradationSpec& spec);
/// Throws ParseError whose field() names the missing or invalid key.
DegradationSpec record_to_spec(const nlohmann::json& record);

nlohmann::json config_to_json(const DegradationConfig& config);
/// Missing keys keep their defaults; the result is validated.
DegradationConfig config_from_json(const nlohmann::json& j);

/// True when every spec field lies inside the ranges of `config`.
bool spec_within_config(const DegradationSpec& spec, const DegradationConfig& config);

}  // namespace srprompt
