#include "srprompt/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srprompt/filter.hpp"
#include "srprompt/noise.hpp"

namespace srprompt {

using nlohmann::json;

std::string_view to_string(BlurKind k) { return k == BlurKind::iso ? "iso" : "aniso"; }
std::string_view to_string(NoiseKind k) { return k == NoiseKind::gaussian ? "gaussian" : "poisson"; }
std::string_view to_string(OrderMode m) { return m == OrderMode::fixed ? "fixed" : "shuffled"; }

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::blur: return "blur";
    case Stage::resize1: return "resize1";
    case Stage::noise: return "noise";
    case Stage::compression: return "compression";
    case Stage::resize2: return "resize2";
  }
  return "?";
}

BlurKind blur_kind_from_string(std::string_view s) {
  if (s == "iso") return BlurKind::iso;
  if (s == "aniso") return BlurKind::aniso;
  throw InvalidArgument("unknown blur kind: " + std::string(s));
}

NoiseKind noise_kind_from_string(std::string_view s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "poisson") return NoiseKind::poisson;
  throw InvalidArgument("unknown noise kind: " + std::string(s));
}

Stage stage_from_string(std::string_view s) {
  for (Stage st : kFixedStageOrder)
    if (to_string(st) == s) return st;
  throw InvalidArgument("unknown stage: " + std::string(s));
}

OrderMode order_mode_from_string(std::string_view s) {
  if (s == "fixed") return OrderMode::fixed;
  if (s == "shuffled") return OrderMode::shuffled;
  throw InvalidArgument("unknown order mode: " + std::string(s));
}

namespace {

template <std::size_t N>
void check_probs(const std::array<double, N>& p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + ": probabilities must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument(std::string(name) + ": must sum to 1");
}

void check_range(const Range& r, const char* name, double min_lo) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
    throw InvalidArgument(std::string(name) + ": need finite lo <= hi");
  if (r.lo < min_lo) throw InvalidArgument(std::string(name) + ": lower bound out of domain");
}

template <std::size_t N>
std::size_t categorical(const std::array<double, N>& p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return N - 1;
}

constexpr std::array<ResizeMethod, 3> kMethods = {ResizeMethod::area, ResizeMethod::bilinear,
                                                   ResizeMethod::bicubic};

}  // namespace

void DegradationConfig::validate() const {
  check_probs(blur_kind_prob, "blur_kind_prob");
  check_probs(resize_method_probs, "resize_method_probs");
  check_probs(noise_kind_prob, "noise_kind_prob");
  if (!(gray_noise_prob >= 0.0 && gray_noise_prob <= 1.0))
    throw InvalidArgument("gray_noise_prob must lie in [0,1]");
  if (eta_choices.empty()) throw InvalidArgument("eta_choices must not be empty");
  for (int eta : eta_choices)
    if (eta < 3 || eta % 2 == 0) throw InvalidArgument("eta_choices must all be odd and >= 3");
  check_range(sigma_range, "sigma_range", 0.0);
  if (sigma_range.lo <= 0.0) throw InvalidArgument("sigma_range must be positive");
  check_range(theta_range, "theta_range", 0.0);
  if (theta_range.hi > std::numbers::pi) throw InvalidArgument("theta_range must lie in [0, pi]");
  check_range(gamma1_range, "gamma1_range", 0.0);
  if (gamma1_range.lo <= 0.0) throw InvalidArgument("gamma1_range must be positive");
  check_range(phi1_range, "phi1_range", 0.0);
  check_range(phi2_range, "phi2_range", 0.0);
  if (phi1_range.lo <= 0.0 || phi2_range.lo <= 0.0)
    throw InvalidArgument("noise level ranges must be positive");
  check_range(q_range, "q_range", 1.0);
  if (q_range.hi > 100.0) throw InvalidArgument("q_range must lie in [1,100]");
  if (scale_factor < 1) throw InvalidArgument("scale_factor must be >= 1");
}

DegradationSpec sample_spec(const DegradationConfig& config, Rng& rng) {
  config.validate();
  DegradationSpec s;
  s.scale_factor = config.scale_factor;

  s.blur_kind = categorical(config.blur_kind_prob, rng) == 0 ? BlurKind::iso : BlurKind::aniso;
  const auto eta_pick = static_cast<std::size_t>(uniform01(rng) * config.eta_choices.size());
  s.eta = config.eta_choices[std::min(eta_pick, config.eta_choices.size() - 1)];
  s.sigma_x = uniform(rng, config.sigma_range.lo, config.sigma_range.hi);
  const double sigma_y = uniform(rng, config.sigma_range.lo, config.sigma_range.hi);
  const double theta = uniform(rng, config.theta_range.lo, config.theta_range.hi);
  if (s.blur_kind == BlurKind::iso) {
    s.sigma_y = s.sigma_x;
    s.theta = 0.0;
  } else {
    s.sigma_y = sigma_y;
    s.theta = theta;
  }

  s.resize1_method = kMethods[categorical(config.resize_method_probs, rng)];
  s.gamma1 = uniform(rng, config.gamma1_range.lo, config.gamma1_range.hi);
  if (!config.two_stage_resize) s.gamma1 = 1.0;

  s.noise_kind = categorical(config.noise_kind_prob, rng) == 0 ? NoiseKind::gaussian
                                                               : NoiseKind::poisson;
  const Range& level = s.noise_kind == NoiseKind::gaussian ? config.phi1_range : config.phi2_range;
  s.noise_level = uniform(rng, level.lo, level.hi);
  s.gray_noise = uniform01(rng) < config.gray_noise_prob;

  s.jpeg_q = uniform(rng, config.q_range.lo, config.q_range.hi);
  s.resize2_method = kMethods[categorical(config.resize_method_probs, rng)];

  s.stage_order = kFixedStageOrder;
  if (config.order_mode == OrderMode::shuffled) {
    // Fisher-Yates on our own uniform draws; std::shuffle is not portable.
    for (std::size_t i = s.stage_order.size() - 1; i > 0; --i) {
      const auto j = std::min(static_cast<std::size_t>(uniform01(rng) * (i + 1)), i);
      std::swap(s.stage_order[i], s.stage_order[j]);
    }
  }
  return s;
}

namespace {

Index scaled_dim(Index dim, double gamma) {
  return std::max<Index>(8, static_cast<Index>(std::lround(static_cast<double>(dim) * gamma)));
}

ImageBuffer resize_if_needed(const ImageBuffer& img, Index h, Index w, ResizeMethod m) {
  if (img.height() == h && img.width() == w) return img;
  return resize(img, h, w, m);
}

}  // namespace

ImageBuffer apply(const DegradationSpec& spec, const ImageBuffer& hr, Rng& rng,
                  ChromaSubsampling chroma) {
  const int s = spec.scale_factor;
  if (s < 1) throw InvalidArgument("scale_factor must be >= 1");
  if (hr.height() % s != 0 || hr.width() % s != 0)
    throw InvalidArgument("HR dimensions must be divisible by the scale factor");
  if (hr.height() < 8 * s || hr.width() < 8 * s)
    throw InvalidArgument("HR dimensions must be at least 8 * scale factor");
  const Index lr_h = hr.height() / s, lr_w = hr.width() / s;

  ImageBuffer img = hr;
  bool downscaled = false;
  for (Stage stage : spec.stage_order) {
    switch (stage) {
      case Stage::blur: {
        const KernelMatrix k =
            spec.blur_kind == BlurKind::iso
                ? gaussian_kernel_iso(spec.eta, spec.sigma_x)
                : gaussian_kernel_aniso(spec.eta, spec.sigma_x, spec.sigma_y, spec.theta);
        img = convolve(img, k);
        break;
      }
      case Stage::resize1: {
        const Index h = img.height(), w = img.width();
        img = resize_if_needed(img, scaled_dim(h, spec.gamma1), scaled_dim(w, spec.gamma1),
                               spec.resize1_method);
        if (downscaled) img = resize_if_needed(img, h, w, spec.resize1_method);
        break;
      }
      case Stage::noise:
        img = spec.noise_kind == NoiseKind::gaussian
                  ? add_gaussian_noise(img, spec.noise_level, spec.gray_noise, rng)
                  : add_poisson_noise(img, spec.noise_level, spec.gray_noise, rng);
        break;
      case Stage::compression:
        img = jpeg_roundtrip(img, spec.jpeg_q, chroma);
        break;
      case Stage::resize2:
        img = resize_if_needed(img, lr_h, lr_w, spec.resize2_method);
        downscaled = true;
        break;
    }
  }
  return clamp01(std::move(img));
}

// ---------------------------------------------------------------------------
// Canonical record

json spec_to_record(const DegradationSpec& s) {
  json order = json::array();
  for (Stage st : s.stage_order) order.push_back(std::string(to_string(st)));
  return json{{"blur_kind", to_string(s.blur_kind)},
              {"eta", s.eta},
              {"sigma_x", s.sigma_x},
              {"sigma_y", s.sigma_y},
              {"theta", s.theta},
              {"resize1_method", to_string(s.resize1_method)},
              {"gamma1", s.gamma1},
              {"noise_kind", to_string(s.noise_kind)},
              {"noise_level", s.noise_level},
              {"gray_noise", s.gray_noise},
              {"jpeg_q", s.jpeg_q},
              {"resize2_method", to_string(s.resize2_method)},
              {"stage_order", order},
              {"scale_factor", s.scale_factor}};
}

namespace {

const json& field(const json& record, const char* name) {
  if (!record.is_object()) throw ParseError("", "spec record must be a JSON object");
  auto it = record.find(name);
  if (it == record.end()) throw ParseError(name, std::string("missing field ") + name);
  return *it;
}

double number_field(const json& record, const char* name) {
  const json& v = field(record, name);
  if (!v.is_number()) throw ParseError(name, std::string("field ") + name + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(name, std::string("field ") + name + " must be finite");
  return d;
}

int int_field(const json& record, const char* name) {
  const json& v = field(record, name);
  if (!v.is_number_integer())
    throw ParseError(name, std::string("field ") + name + " must be an integer");
  return v.get<int>();
}

std::string string_field(const json& record, const char* name) {
  const json& v = field(record, name);
  if (!v.is_string()) throw ParseError(name, std::string("field ") + name + " must be a string");
  return v.get<std::string>();
}

template <typename F>
auto enum_field(const json& record, const char* name, F convert) {
  const std::string s = string_field(record, name);
  try {
    return convert(s);
  } catch (const InvalidArgument& e) {
    throw ParseError(name, std::string("field ") + name + ": " + e.what());
  }
}

void range_error(const char* name, const std::string& why) {
  throw ParseError(name, std::string("field ") + name + " out of range: " + why);
}

}  // namespace

DegradationSpec record_to_spec(const json& record) {
  DegradationSpec s;
  s.blur_kind = enum_field(record, "blur_kind", blur_kind_from_string);
  s.eta = int_field(record, "eta");
  if (s.eta < 3 || s.eta % 2 == 0) range_error("eta", "kernel width must be odd and >= 3");
  s.sigma_x = number_field(record, "sigma_x");
  if (s.sigma_x <= 0.0) range_error("sigma_x", "must be positive");
  s.sigma_y = number_field(record, "sigma_y");
  if (s.sigma_y <= 0.0) range_error("sigma_y", "must be positive");
  if (s.blur_kind == BlurKind::iso && s.sigma_x != s.sigma_y)
    range_error("sigma_y", "isotropic blur requires sigma_x == sigma_y");
  s.theta = number_field(record, "theta");
  if (s.theta < 0.0 || s.theta > std::numbers::pi) range_error("theta", "must lie in [0, pi]");
  s.resize1_method = enum_field(record, "resize1_method", resize_method_from_string);
  s.gamma1 = number_field(record, "gamma1");
  if (s.gamma1 <= 0.0) range_error("gamma1", "must be positive");
  s.noise_kind = enum_field(record, "noise_kind", noise_kind_from_string);
  s.noise_level = number_field(record, "noise_level");
  if (s.noise_level <= 0.0) range_error("noise_level", "must be positive");
  const json& gray = field(record, "gray_noise");
  if (!gray.is_boolean()) throw ParseError("gray_noise", "field gray_noise must be a boolean");
  s.gray_noise = gray.get<bool>();
  s.jpeg_q = number_field(record, "jpeg_q");
  if (std::nearbyint(s.jpeg_q) < 1.0 || std::nearbyint(s.jpeg_q) > 100.0)
    range_error("jpeg_q", "must round into [1,100]");
  s.resize2_method = enum_field(record, "resize2_method", resize_method_from_string);

  const json& order = field(record, "stage_order");
  if (!order.is_array() || order.size() != 5)
    throw ParseError("stage_order", "field stage_order must list all five stages");
  std::array<bool, 5> seen{};
  for (std::size_t i = 0; i < 5; ++i) {
    if (!order[i].is_string()) throw ParseError("stage_order", "stage tags must be strings");
    Stage st;
    try {
      st = stage_from_string(order[i].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ParseError("stage_order", std::string("field stage_order: ") + e.what());
    }
    if (seen[static_cast<std::size_t>(st)]) range_error("stage_order", "duplicate stage");
    seen[static_cast<std::size_t>(st)] = true;
    s.stage_order[i] = st;
  }
  s.scale_factor = int_field(record, "scale_factor");
  if (s.scale_factor < 1) range_error("scale_factor", "must be >= 1");
  return s;
}

bool spec_within_config(const DegradationSpec& s, const DegradationConfig& c) {
  if (std::find(c.eta_choices.begin(), c.eta_choices.end(), s.eta) == c.eta_choices.end())
    return false;
  if (!c.sigma_range.contains(s.sigma_x) || !c.sigma_range.contains(s.sigma_y)) return false;
  if (s.blur_kind == BlurKind::aniso && !c.theta_range.contains(s.theta)) return false;
  if (c.two_stage_resize ? !c.gamma1_range.contains(s.gamma1) : s.gamma1 != 1.0) return false;
  const Range& level = s.noise_kind == NoiseKind::gaussian ? c.phi1_range : c.phi2_range;
  if (!level.contains(s.noise_level)) return false;
  if (!c.q_range.contains(s.jpeg_q)) return false;
  if (s.scale_factor != c.scale_factor) return false;
  if (c.order_mode == OrderMode::fixed && s.stage_order != kFixedStageOrder) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(name, std::string(name) + " must be a [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <std::size_t N>
std::array<double, N> probs_from(const json& j, const char* name) {
  if (!j.is_array() || j.size() != N)
    throw ParseError(name, std::string(name) + " must have " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw ParseError(name, std::string(name) + " entries must be numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace

json config_to_json(const DegradationConfig& c) {
  return json{{"blur_kind_prob", c.blur_kind_prob},
              {"eta_choices", c.eta_choices},
              {"sigma_range", range_json(c.sigma_range)},
              {"theta_range", range_json(c.theta_range)},
              {"resize_method_probs", c.resize_method_probs},
              {"gamma1_range", range_json(c.gamma1_range)},
              {"two_stage_resize", c.two_stage_resize},
              {"noise_kind_prob", c.noise_kind_prob},
              {"phi1_range", range_json(c.phi1_range)},
              {"phi2_range", range_json(c.phi2_range)},
              {"gray_noise_prob", c.gray_noise_prob},
              {"q_range", range_json(c.q_range)},
              {"scale_factor", c.scale_factor},
              {"order_mode", to_string(c.order_mode)},
              {"jpeg_chroma", c.jpeg_chroma == ChromaSubsampling::s420 ? "4:2:0" : "4:4:4"}};
}

DegradationConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "degradation config must be a JSON object");
  DegradationConfig c;
  if (j.contains("blur_kind_prob")) c.blur_kind_prob = probs_from<2>(j["blur_kind_prob"], "blur_kind_prob");
  if (j.contains("eta_choices")) {
    if (!j["eta_choices"].is_array()) throw ParseError("eta_choices", "eta_choices must be an array");
    c.eta_choices.clear();
    for (const auto& v : j["eta_choices"]) {
      if (!v.is_number_integer()) throw ParseError("eta_choices", "eta_choices must be integers");
      c.eta_choices.push_back(v.get<int>());
    }
  }
  if (j.contains("sigma_range")) c.sigma_range = range_from(j["sigma_range"], "sigma_range");
  if (j.contains("theta_range")) c.theta_range = range_from(j["theta_range"], "theta_range");
  if (j.contains("resize_method_probs"))
    c.resize_method_probs = probs_from<3>(j["resize_method_probs"], "resize_method_probs");
  if (j.contains("gamma1_range")) c.gamma1_range = range_from(j["gamma1_range"], "gamma1_range");
  if (j.contains("two_stage_resize")) c.two_stage_resize = j["two_stage_resize"].get<bool>();
  if (j.contains("noise_kind_prob")) c.noise_kind_prob = probs_from<2>(j["noise_kind_prob"], "noise_kind_prob");
  if (j.contains("phi1_range")) c.phi1_range = range_from(j["phi1_range"], "phi1_range");
  if (j.contains("phi2_range")) c.phi2_range = range_from(j["phi2_range"], "phi2_range");
  if (j.contains("gray_noise_prob")) c.gray_noise_prob = j["gray_noise_prob"].get<double>();
  if (j.contains("q_range")) c.q_range = range_from(j["q_range"], "q_range");
  if (j.contains("scale_factor")) c.scale_factor = j["scale_factor"].get<int>();
  if (j.contains("order_mode")) c.order_mode = order_mode_from_string(j["order_mode"].get<std::string>());
  if (j.contains("jpeg_chroma")) {
    const auto s = j["jpeg_chroma"].get<std::string>();
    if (s == "4:2:0") c.jpeg_chroma = ChromaSubsampling::s420;
    else if (s == "4:4:4") c.jpeg_chroma = ChromaSubsampling::s444;
    else throw ParseError("jpeg_chroma", "jpeg_chroma must be 4:2:0 or 4:4:4");
  }
  c.validate();
  return c;
}

}  // namespace srprompt
