#include "srprompt/estimator.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>
#include <vector>

#include "srprompt/codec.hpp"
#include "srprompt/dataset.hpp"

namespace srprompt {

using nlohmann::json;
using PlaneD = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double FeatureVector::operator[](Component c) const {
  switch (c) {
    case Component::blur: return blur_metric;
    case Component::noise: return noise_sigma_hat;
    case Component::compression: return blockiness;
  }
  return 0.0;
}

namespace {

PlaneD luma_d(const ImageBuffer& image) {
  if (image.height() < 16 || image.width() < 16)
    throw InvalidArgument("feature estimation needs at least 16x16 pixels");
  return luma(image.cast<double>());
}

double median_inplace(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

}  // namespace

double estimate_noise_sigma(const ImageBuffer& image) {
  const PlaneD y = luma_d(image);
  const Index h = y.rows() - 2, w = y.cols() - 2;
  const PlaneD r = y.block(0, 0, h, w) - 2 * y.block(0, 1, h, w) + y.block(0, 2, h, w) -
                   2 * y.block(1, 0, h, w) + 4 * y.block(1, 1, h, w) - 2 * y.block(1, 2, h, w) +
                   y.block(2, 0, h, w) - 2 * y.block(2, 1, h, w) + y.block(2, 2, h, w);
  std::vector<double> mags(static_cast<std::size_t>(r.size()));
  Eigen::Map<PlaneD>(mags.data(), h, w) = r.abs();
  constexpr double kFilterNorm = 6.0;  // sqrt(sum L^2) = sqrt(36)
  return median_inplace(mags) / 0.6745 / kFilterNorm;
}

double estimate_blur_metric(const ImageBuffer& image) {
  const PlaneD y = luma_d(image);
  const Index h = y.rows() - 2, w = y.cols() - 2;
  PlaneD med(h, w);
  std::array<double, 9> win{};
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < w; ++j) {
      for (int k = 0; k < 9; ++k) win[static_cast<std::size_t>(k)] = y(i + k / 3, j + k % 3);
      std::nth_element(win.begin(), win.begin() + 4, win.end());
      med(i, j) = win[4];
    }
  const Index lh = h - 2, lw = w - 2;
  const PlaneD lap = med.block(0, 1, lh, lw) + med.block(1, 0, lh, lw) -
                     4 * med.block(1, 1, lh, lw) + med.block(1, 2, lh, lw) +
                     med.block(2, 1, lh, lw);
  const double mean = lap.mean();
  const double var = (lap - mean).square().mean();
  return -std::log(var + 1e-12);
}

double estimate_blockiness(const ImageBuffer& image) {
  const PlaneD y = luma_d(image);
  const Index h = y.rows(), w = y.cols();
  double boundary = 0.0, interior = 0.0;
  std::size_t nb = 0, ni = 0;
  for (Index i = 0; i < h; ++i)
    for (Index j = 1; j < w; ++j) {
      const double g = std::abs(y(i, j) - y(i, j - 1));
      if (j % 8 == 0) boundary += g, ++nb;
      else interior += g, ++ni;
    }
  for (Index i = 1; i < h; ++i)
    for (Index j = 0; j < w; ++j) {
      const double g = std::abs(y(i, j) - y(i - 1, j));
      if (i % 8 == 0) boundary += g, ++nb;
      else interior += g, ++ni;
    }
  constexpr double eps = 1e-12;
  return (boundary / static_cast<double>(nb) + eps) / (interior / static_cast<double>(ni) + eps);
}

FeatureVector extract_features(const ImageBuffer& image) {
  return {estimate_noise_sigma(image), estimate_blur_metric(image), estimate_blockiness(image)};
}

Level classify(double feature, const CutPoints& cuts) {
  if (feature < cuts.low) return Level::light;
  if (feature < cuts.high) return Level::medium;
  return Level::heavy;
}

const CutPoints& Calibration::cuts(Component c) const {
  switch (c) {
    case Component::blur: return blur;
    case Component::noise: return noise;
    case Component::compression: return compression;
  }
  return noise;
}

CutPoints& Calibration::cuts(Component c) {
  return const_cast<CutPoints&>(std::as_const(*this).cuts(c));
}

double Calibration::accuracy(Component c) const {
  switch (c) {
    case Component::blur: return metadata.blur_accuracy;
    case Component::noise: return metadata.noise_accuracy;
    case Component::compression: return metadata.compression_accuracy;
  }
  return 0.0;
}

json calibration_to_json(const Calibration& c) {
  json j{{"format_version", 1}};
  for (Component comp : kComponents)
    j[std::string(to_string(comp))] = {{"cuts", {c.cuts(comp).low, c.cuts(comp).high}}};
  j["metadata"] = {{"seed", c.metadata.seed},
                   {"size", c.metadata.size},
                   {"held_out", c.metadata.held_out},
                   {"accuracy",
                    {{"blur", c.metadata.blur_accuracy},
                     {"noise", c.metadata.noise_accuracy},
                     {"compression", c.metadata.compression_accuracy}}}};
  return j;
}

Calibration calibration_from_json(const json& j) {
  Calibration c;
  try {
    for (Component comp : kComponents) {
      const json& cuts = j.at(std::string(to_string(comp))).at("cuts");
      c.cuts(comp) = {cuts.at(0).get<double>(), cuts.at(1).get<double>()};
      if (!(c.cuts(comp).low < c.cuts(comp).high))
        throw CalibrationError("cut points for " + std::string(to_string(comp)) +
                               " are not strictly increasing");
    }
    if (j.contains("metadata")) {
      const json& m = j["metadata"];
      c.metadata.seed = m.value("seed", std::uint64_t{0});
      c.metadata.size = m.value("size", std::uint64_t{0});
      c.metadata.held_out = m.value("held_out", std::uint64_t{0});
      if (m.contains("accuracy")) {
        c.metadata.blur_accuracy = m["accuracy"].value("blur", 0.0);
        c.metadata.noise_accuracy = m["accuracy"].value("noise", 0.0);
        c.metadata.compression_accuracy = m["accuracy"].value("compression", 0.0);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("calibration", std::string("invalid calibration: ") + e.what());
  }
  return c;
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("calibration", std::string("invalid calibration JSON: ") + e.what());
  }
  return calibration_from_json(j);
}

void save_calibration(const std::filesystem::path& path, const Calibration& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write calibration " + path.string());
  out << calibration_to_json(c).dump(2) << '\n';
}

Calibration default_calibration() {
  Calibration c;
  c.blur = {5.5139233949556479, 6.0750761200387213};
  c.noise = {0.027223880447848639, 0.048330533845671861};
  // JPEG-at-LR set: the pipeline set carries no blockiness signal
  c.compression = {1.0880431272351156, 1.321704118717945};
  c.metadata = {2024, 900, 180, 0.79, 0.85, 0.75};
  return c;
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

bool dominant(const PromptBins& b, Component c) {
  for (Component other : kComponents)
    if (other != c && level_of(b, other) != Level::light) return false;
  return level_of(b, c) != Level::unspecified;
}

bool held_out(const LabeledSample& s, const CalibrationOptions& o) {
  return o.holdout_modulus > 0 && s.record_index % o.holdout_modulus == o.holdout_modulus - 1;
}

double accuracy_where(std::span<const LabeledSample> samples, const CutPoints& cuts, Component c,
                      const auto& keep) {
  std::size_t n = 0, correct = 0;
  for (const auto& s : samples) {
    if (!dominant(s.bins, c) || !keep(s)) continue;
    ++n;
    correct += classify(s.features[c], cuts) == level_of(s.bins, c);
  }
  return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0;
}

}  // namespace

ClassMedians class_medians(std::span<const LabeledSample> samples, Component component,
                           const CalibrationOptions& options) {
  std::array<std::vector<double>, 3> train;
  ClassMedians out;
  for (const auto& s : samples) {
    if (!dominant(s.bins, component)) continue;
    const auto level = static_cast<std::size_t>(level_of(s.bins, component));
    ++out.count[level];
    if (!held_out(s, options)) train[level].push_back(s.features[component]);
  }
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string cls =
        std::string(to_string(static_cast<Level>(l))) + " " + std::string(to_string(component));
    if (out.count[l] < options.min_per_class || train[l].empty())
      throw CalibrationError("insufficient records for class '" + cls + "': have " +
                             std::to_string(out.count[l]) + ", need " +
                             std::to_string(options.min_per_class));
    out.median[l] = median_inplace(train[l]);
  }
  return out;
}

CutPoints fit_cuts(std::span<const LabeledSample> samples, Component component,
                   const CalibrationOptions& options) {
  const auto m = class_medians(samples, component, options).median;
  if (!(m[0] < m[1] && m[1] < m[2])) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " feature are not strictly increasing (%.6g, %.6g, %.6g)",
                  m[0], m[1], m[2]);
    throw CalibrationError("class medians of the " + std::string(to_string(component)) + buf);
  }
  return {0.5 * (m[0] + m[1]), 0.5 * (m[1] + m[2])};
}

double held_out_accuracy(std::span<const LabeledSample> samples, const CutPoints& cuts,
                         Component component, const CalibrationOptions& options) {
  std::uint64_t held = 0;
  for (const auto& s : samples) held += held_out(s, options);
  if (held == 0)
    return accuracy_where(samples, cuts, component, [](const LabeledSample&) { return true; });
  return accuracy_where(samples, cuts, component,
                        [&](const LabeledSample& s) { return held_out(s, options); });
}

Calibration calibrate(std::span<const LabeledSample> samples, const CalibrationOptions& options) {
  if (samples.empty()) throw CalibrationError("calibration set is empty");
  Calibration cal;
  for (Component c : kComponents) cal.cuts(c) = fit_cuts(samples, c, options);

  cal.metadata.seed = options.seed;
  cal.metadata.size = samples.size();
  for (const auto& s : samples) cal.metadata.held_out += held_out(s, options);
  cal.metadata.blur_accuracy = held_out_accuracy(samples, cal.blur, Component::blur, options);
  cal.metadata.noise_accuracy = held_out_accuracy(samples, cal.noise, Component::noise, options);
  cal.metadata.compression_accuracy =
      held_out_accuracy(samples, cal.compression, Component::compression, options);
  return cal;
}

double accuracy(std::span<const LabeledSample> samples, const Calibration& calibration,
                Component component) {
  return accuracy_where(samples, calibration.cuts(component), component,
                        [](const LabeledSample&) { return true; });
}

std::vector<LabeledSample> labeled_samples(const std::filesystem::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const auto root = manifest_path.parent_path();
  std::vector<LabeledSample> out;
  out.reserve(m.records.size());
  for (const auto& r : m.records)
    out.push_back({extract_features(load_image(root / r.lr_path)), r.bins, r.record_index});
  return out;
}

Calibration calibrate_manifest(const std::filesystem::path& manifest_path,
                               CalibrationOptions options) {
  const Manifest m = read_manifest(manifest_path);
  if (m.header.is_object() && m.header.contains("config"))
    options.seed = m.header["config"].value("global_seed", options.seed);
  const auto samples = labeled_samples(manifest_path);
  return calibrate(samples, options);
}

PromptBins estimate_bins(const ImageBuffer& image, const Calibration& calibration,
                         bool sr_context) {
  const FeatureVector f = extract_features(image);
  PromptBins b;
  b.blur = classify(f.blur_metric, calibration.blur);
  b.noise = classify(f.noise_sigma_hat, calibration.noise);
  b.compression = classify(f.blockiness, calibration.compression);
  b.resize2 = sr_context;
  return b;
}

std::string estimate_prompt(const ImageBuffer& image, const Calibration& calibration,
                            bool sr_context) {
  Rng unused(0);
  return render(estimate_bins(image, calibration, sr_context), PromptFormat{}, unused);
}

// ---------------------------------------------------------------------------
// External hook

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string trim_output(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  return s.substr(start);
}

}  // namespace

HookResult external_prompter_hook(const std::filesystem::path& image_path,
                                  const std::string& command_template,
                                  std::chrono::milliseconds timeout) {
  std::string command = command_template;
  const std::string quoted = shell_quote(image_path.string());
  for (std::size_t pos = command.find("{image}"); pos != std::string::npos;
       pos = command.find("{image}", pos + quoted.size()))
    command.replace(pos, 7, quoted);

  int fds[2];
  if (pipe(fds) != 0) throw HookError("hook: pipe failed", "", -1);
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw HookError("hook: fork failed", "", -1);
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  const auto remaining_ms = [&] {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    return static_cast<int>(std::max<long long>(0, left.count()));
  };
  std::string output;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, remaining_ms());
    if (ready == 0) {
      timed_out = true;
      break;
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);

  int status = 0;
  while (!timed_out) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (remaining_ms() == 0) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (timed_out) {
    kill(-pid, SIGKILL);
    waitpid(pid, &status, 0);
    throw HookError("hook: command timed out after " + std::to_string(timeout.count()) + " ms",
                    output, -1);
  }
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (code != 0)
    throw HookError("hook: command exited with status " + std::to_string(code), output, code);

  HookResult result;
  result.text = trim_output(output);
  try {
    result.bins = parse(result.text);
  } catch (const ParseError& e) {
    throw HookError("hook: rejected prompt, unrecognized token '" + e.field() + "'", output, 0);
  }
  return result;
}

}  // namespace srprompt
