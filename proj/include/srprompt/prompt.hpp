#pragma once

#include <array>
#include <string>
#include <string_view>

#include "srprompt/degradation.hpp"
#include "srprompt/rng.hpp"

namespace srprompt {

enum class Level { light, medium, heavy, unspecified };
enum class Direction { upsample, downsample, unchange, unspecified };

std::string_view to_string(Level l);
std::string_view to_string(Direction d);
Level level_from_string(std::string_view s);
Direction direction_from_string(std::string_view s);

/// Discretized degradation description. `resize2` is a presence flag; when
/// present it always reads "downsample".
struct PromptBins {
  Level blur = Level::unspecified;
  Direction resize1 = Direction::unspecified;
  Level noise = Level::unspecified;
  Level compression = Level::unspecified;
  bool resize2 = false;

  bool operator==(const PromptBins&) const = default;
};

/// The three leveled degradation components.
enum class Component { blur, noise, compression };
inline constexpr std::array<Component, 3> kComponents = {Component::blur, Component::noise,
                                                         Component::compression};
std::string_view to_string(Component c);
Component component_from_string(std::string_view s);
Level level_of(const PromptBins& bins, Component c);

/// Descriptor slots in canonical (fixed) order.
enum class Descriptor { blur, resize1, noise, compression, resize2 };
inline constexpr std::size_t kDescriptorCount = 5;

enum class PromptOrder { fixed, shuffled };

struct PromptFormat {
  PromptOrder order = PromptOrder::fixed;
  double dropout = 0.0;  // per-descriptor omission probability
  bool verbose = false;  // parameter-level wording, only for spec rendering

  void validate() const;
  bool operator==(const PromptFormat&) const = default;
};

/// Half-open thirds [lo, lo+w), [lo+w, lo+2w), [lo+2w, hi]. With `reversed`
/// the labels run heavy -> light as the value grows.
Level level_for(double value, const Range& range, bool reversed = false);
Direction direction_for(double gamma1);

/// Throws InvalidArgument when the spec lies outside the config ranges.
PromptBins bins_from_spec(const DegradationSpec& spec, const DegradationConfig& config);

struct RenderedPrompt {
  std::string text;
  std::array<bool, kDescriptorCount> kept{};  // indexed by Descriptor
};

/// Seven direction-token multisets cannot cover eight (resize1, resize2)
/// states. The one left out is a resize1 "downsample" with resize2 absent,
/// which reads back as resize2 and never comes out of the pipeline.
bool is_renderable(const PromptBins& bins);

/// Always draws one dropout variate per slot, then one five-slot shuffle when
/// shuffled, so rng consumption does not depend on the bins. Throws
/// InvalidArgument for bins that are not renderable.
RenderedPrompt render_detailed(const PromptBins& bins, const PromptFormat& format, Rng& rng);
std::string render(const PromptBins& bins, const PromptFormat& format, Rng& rng);

/// Parameter-level rendering, e.g. "gaussian noise with noise level 4.5".
/// Parses back to bins_from_spec(spec, config).
std::string render_verbose(const DegradationSpec& spec, const PromptFormat& format, Rng& rng);

/// Case-insensitive, order-agnostic. Direction tokens are bound as a
/// multiset: one non-"downsample" direction binds resize1; a lone
/// "downsample" marks resize2; two "downsample" tokens fill both slots.
/// Parameter-level descriptors are binned against `config`.
/// Throws ParseError whose field() is the first unrecognized word.
PromptBins parse(std::string_view text, const DegradationConfig& config = {});

std::size_t descriptor_count(const PromptBins& bins);

/// `weaker` equals `strong` or has unspecified/absent slots where they differ.
bool is_weakening(const PromptBins& weaker, const PromptBins& strong);

}  // namespace srprompt
