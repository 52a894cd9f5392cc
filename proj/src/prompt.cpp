#include "srprompt/prompt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace srprompt {

std::string_view to_string(Level l) {
  switch (l) {
    case Level::light: return "light";
    case Level::medium: return "medium";
    case Level::heavy: return "heavy";
    case Level::unspecified: return "unspecified";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::upsample: return "upsample";
    case Direction::downsample: return "downsample";
    case Direction::unchange: return "unchange";
    case Direction::unspecified: return "unspecified";
  }
  return "?";
}

Level level_from_string(std::string_view s) {
  for (Level l : {Level::light, Level::medium, Level::heavy, Level::unspecified})
    if (to_string(l) == s) return l;
  throw InvalidArgument("unknown level: " + std::string(s));
}

Direction direction_from_string(std::string_view s) {
  for (Direction d :
       {Direction::upsample, Direction::downsample, Direction::unchange, Direction::unspecified})
    if (to_string(d) == s) return d;
  throw InvalidArgument("unknown direction: " + std::string(s));
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::blur: return "blur";
    case Component::noise: return "noise";
    case Component::compression: return "compression";
  }
  return "?";
}

Component component_from_string(std::string_view s) {
  for (Component c : kComponents)
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown component: " + std::string(s));
}

Level level_of(const PromptBins& bins, Component c) {
  switch (c) {
    case Component::blur: return bins.blur;
    case Component::noise: return bins.noise;
    case Component::compression: return bins.compression;
  }
  return Level::unspecified;
}

void PromptFormat::validate() const {
  if (!(dropout >= 0.0 && dropout <= 1.0)) throw InvalidArgument("dropout must lie in [0,1]");
}

Level level_for(double value, const Range& range, bool reversed) {
  const double w = (range.hi - range.lo) / 3.0;
  int index = 2;
  if (value <= range.lo || value < range.lo + w) index = 0;
  else if (value < range.lo + 2.0 * w) index = 1;
  if (reversed) index = 2 - index;
  return static_cast<Level>(index);
}

Direction direction_for(double gamma1) {
  if (gamma1 < 0.95) return Direction::downsample;
  if (gamma1 > 1.05) return Direction::upsample;
  return Direction::unchange;
}

PromptBins bins_from_spec(const DegradationSpec& spec, const DegradationConfig& config) {
  if (!config.sigma_range.contains(spec.sigma_x) || !config.sigma_range.contains(spec.sigma_y))
    throw InvalidArgument("blur sigma outside configured sigma_range");
  const Range& noise_range =
      spec.noise_kind == NoiseKind::gaussian ? config.phi1_range : config.phi2_range;
  if (!noise_range.contains(spec.noise_level))
    throw InvalidArgument("noise level outside configured range");
  if (!config.q_range.contains(spec.jpeg_q))
    throw InvalidArgument("jpeg quality outside configured q_range");

  PromptBins b;
  b.blur = level_for(0.5 * (spec.sigma_x + spec.sigma_y), config.sigma_range);
  b.resize1 = direction_for(spec.gamma1);
  b.noise = level_for(spec.noise_level, noise_range);
  b.compression = level_for(spec.jpeg_q, config.q_range, /*reversed=*/true);
  b.resize2 = true;
  return b;
}

namespace {

using Slots = std::array<std::optional<std::string>, kDescriptorCount>;

RenderedPrompt render_slots(const Slots& slots, const PromptFormat& format, Rng& rng) {
  format.validate();
  RenderedPrompt out;
  for (std::size_t i = 0; i < kDescriptorCount; ++i) {
    const bool dropped = uniform01(rng) < format.dropout;
    out.kept[i] = slots[i].has_value() && !dropped;
  }

  // permute all five slots, then skip the empty ones
  std::array<std::size_t, kDescriptorCount> order{0, 1, 2, 3, 4};
  if (format.order == PromptOrder::shuffled) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = std::min(static_cast<std::size_t>(uniform01(rng) * i), i - 1);
      std::swap(order[i - 1], order[j]);
    }
  }
  for (std::size_t i : order) {
    if (!out.kept[i]) continue;
    if (!out.text.empty()) out.text += ", ";
    out.text += *slots[i];
  }
  return out;
}

Slots slots_from_bins(const PromptBins& b) {
  Slots s;
  if (b.blur != Level::unspecified) s[0] = std::string(to_string(b.blur)) + " blur";
  if (b.resize1 != Direction::unspecified) s[1] = std::string(to_string(b.resize1));
  if (b.noise != Level::unspecified) s[2] = std::string(to_string(b.noise)) + " noise";
  if (b.compression != Level::unspecified)
    s[3] = std::string(to_string(b.compression)) + " compression";
  if (b.resize2) s[4] = "downsample";
  return s;
}

std::string shortest(double v) { return nlohmann::json(v).dump(); }

}  // namespace

bool is_renderable(const PromptBins& bins) {
  return !(bins.resize1 == Direction::downsample && !bins.resize2);
}

RenderedPrompt render_detailed(const PromptBins& bins, const PromptFormat& format, Rng& rng) {
  if (!is_renderable(bins))
    throw InvalidArgument("resize1 downsample without resize2 has no unambiguous prompt");
  return render_slots(slots_from_bins(bins), format, rng);
}

std::string render(const PromptBins& bins, const PromptFormat& format, Rng& rng) {
  return render_detailed(bins, format, rng).text;
}

std::string render_verbose(const DegradationSpec& spec, const PromptFormat& format, Rng& rng) {
  Slots s;
  s[0] = "gaussian blur with sigma " + shortest(0.5 * (spec.sigma_x + spec.sigma_y));
  s[1] = std::string(to_string(direction_for(spec.gamma1)));
  s[2] = std::string(to_string(spec.noise_kind)) + " noise with noise level " +
         shortest(spec.noise_level);
  s[3] = "jpeg compression with quality " + shortest(spec.jpeg_q);
  s[4] = "downsample";
  return render_slots(s, format, rng).text;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string> split_words(std::string_view component) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : component) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::optional<double> to_number(const std::string& w) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || ptr != w.data() + w.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool known_word(const std::string& w) {
  static const std::array<std::string_view, 16> vocab = {
      "light",      "medium",   "heavy", "blur",     "noise", "compression",
      "upsample",   "downsample", "unchange", "gaussian", "poisson", "jpeg",
      "with",       "sigma",    "level", "quality"};
  return std::find(vocab.begin(), vocab.end(), w) != vocab.end() || to_number(w).has_value();
}

[[noreturn]] void reject(const std::vector<std::string>& words, std::string_view component) {
  std::string token;
  for (const auto& w : words)
    if (!known_word(w)) {
      token = w;
      break;
    }
  if (token.empty()) token = std::string(component);
  throw ParseError(token, "unrecognized prompt token '" + token + "' in descriptor '" +
                              std::string(component) + "'");
}

std::optional<Level> as_level(const std::string& w) {
  if (w == "light") return Level::light;
  if (w == "medium") return Level::medium;
  if (w == "heavy") return Level::heavy;
  return std::nullopt;
}

void bind_level(Level& slot, Level value, std::string_view component) {
  if (slot != Level::unspecified && slot != value)
    throw ParseError(std::string(component), "conflicting descriptor '" + std::string(component) + "'");
  slot = value;
}

Level verbose_level(const std::string& w, const Range& range, bool reversed,
                    const std::vector<std::string>& words, std::string_view component) {
  const auto v = to_number(w);
  if (!v) reject(words, component);
  if (!range.contains(*v))
    throw ParseError(std::string(component),
                     "parameter outside configured range in '" + std::string(component) + "'");
  return level_for(*v, range, reversed);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

PromptBins parse(std::string_view text, const DegradationConfig& config) {
  PromptBins bins;
  std::vector<Direction> directions;

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view component = trim(text.substr(start, comma - start));
    start = comma + 1;
    if (component.empty()) continue;

    const auto words = split_words(component);
    const auto n = words.size();
    if (n == 1) {
      if (words[0] == "upsample") directions.push_back(Direction::upsample);
      else if (words[0] == "downsample") directions.push_back(Direction::downsample);
      else if (words[0] == "unchange") directions.push_back(Direction::unchange);
      else reject(words, component);
    } else if (n == 2 && as_level(words[0])) {
      const Level l = *as_level(words[0]);
      if (words[1] == "blur") bind_level(bins.blur, l, component);
      else if (words[1] == "noise") bind_level(bins.noise, l, component);
      else if (words[1] == "compression") bind_level(bins.compression, l, component);
      else reject(words, component);
    } else if (n == 5 && words[0] == "gaussian" && words[1] == "blur" && words[2] == "with" &&
               words[3] == "sigma") {
      bind_level(bins.blur, verbose_level(words[4], config.sigma_range, false, words, component),
                 component);
    } else if (n == 6 && (words[0] == "gaussian" || words[0] == "poisson") &&
               words[1] == "noise" && words[2] == "with" && words[3] == "noise" &&
               words[4] == "level") {
      const Range& r = words[0] == "gaussian" ? config.phi1_range : config.phi2_range;
      bind_level(bins.noise, verbose_level(words[5], r, false, words, component), component);
    } else if (n == 5 && words[0] == "jpeg" && words[1] == "compression" && words[2] == "with" &&
               words[3] == "quality") {
      bind_level(bins.compression, verbose_level(words[4], config.q_range, true, words, component),
                 component);
    } else {
      reject(words, component);
    }
  }

  const auto downs = std::count(directions.begin(), directions.end(), Direction::downsample);
  std::vector<Direction> others;
  for (Direction d : directions)
    if (d != Direction::downsample) others.push_back(d);
  const auto too_many = [&] {
    throw ParseError(std::string(text), "too many resize descriptors in '" + std::string(text) + "'");
  };
  if (others.size() > 1 || downs > 2) too_many();
  if (others.size() == 1) {
    if (downs > 1) too_many();
    bins.resize1 = others[0];
    bins.resize2 = downs == 1;
  } else if (downs == 1) {
    bins.resize2 = true;
  } else if (downs == 2) {
    bins.resize1 = Direction::downsample;
    bins.resize2 = true;
  }
  return bins;
}

std::size_t descriptor_count(const PromptBins& b) {
  return (b.blur != Level::unspecified) + (b.resize1 != Direction::unspecified) +
         (b.noise != Level::unspecified) + (b.compression != Level::unspecified) + b.resize2;
}

bool is_weakening(const PromptBins& weaker, const PromptBins& strong) {
  const auto level_ok = [](Level w, Level s) { return w == s || w == Level::unspecified; };
  return level_ok(weaker.blur, strong.blur) && level_ok(weaker.noise, strong.noise) &&
         level_ok(weaker.compression, strong.compression) &&
         (weaker.resize1 == strong.resize1 || weaker.resize1 == Direction::unspecified) &&
         (weaker.resize2 == strong.resize2 || !weaker.resize2);
}

}  // namespace srprompt
