#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "srprompt/image.hpp"
#include "srprompt/prompt.hpp"

namespace srprompt {

/// Classical no-reference degradation features, all computed on luma.
struct FeatureVector {
  double noise_sigma_hat = 0.0;  // unit-interval intensity std
  double blur_metric = 0.0;      // -log Laplacian variance, larger = blurrier
  double blockiness = 1.0;       // 8x8 grid gradient ratio, ~1 without artifacts

  double operator[](Component c) const;
};

/// Robust Laplacian-residual noise std: median(|luma * L|) / 0.6745 / sqrt(sum L^2),
/// L = [[1,-2,1],[-2,4,-2],[1,-2,1]], over the valid interior.
double estimate_noise_sigma(const ImageBuffer& image);

/// -log(var(median3(luma) * laplacian4) + 1e-12).
double estimate_blur_metric(const ImageBuffer& image);

/// Mean |gradient| across columns/rows at multiples of 8 over the mean
/// |gradient| elsewhere; 1 for zero-gradient images.
double estimate_blockiness(const ImageBuffer& image);

FeatureVector extract_features(const ImageBuffer& image);

/// Two increasing thresholds splitting a feature into light|medium|heavy.
struct CutPoints {
  double low = 0.0;
  double high = 0.0;
};

Level classify(double feature, const CutPoints& cuts);

struct Calibration {
  CutPoints blur;
  CutPoints noise;
  CutPoints compression;

  struct Metadata {
    std::uint64_t seed = 0;
    std::uint64_t size = 0;
    std::uint64_t held_out = 0;
    double blur_accuracy = 0.0;
    double noise_accuracy = 0.0;
    double compression_accuracy = 0.0;
  } metadata;

  const CutPoints& cuts(Component c) const;
  CutPoints& cuts(Component c);
  double accuracy(Component c) const;
};

nlohmann::json calibration_to_json(const Calibration& c);
Calibration calibration_from_json(const nlohmann::json& j);
Calibration load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const Calibration& c);

/// Frozen calibration from dead-leaves focus sets (seed 2024, 300 records per
/// component). Blur and noise cuts come from the pipeline set. JPEG before the
/// x4 downsample leaves no measurable 8x8 grid, so the compression cuts come
/// from the same records with the JPEG stage moved after the resize.
Calibration default_calibration();

struct LabeledSample {
  FeatureVector features;
  PromptBins bins;  // ground truth
  std::uint64_t record_index = 0;
};

struct CalibrationOptions {
  std::size_t min_per_class = 100;
  /// Records with record_index % holdout_modulus == holdout_modulus - 1 are
  /// held out for the accuracy estimate; 0 disables the split.
  std::uint64_t holdout_modulus = 5;
  std::uint64_t seed = 0;  // provenance only
};

struct ClassMedians {
  std::array<double, 3> median{};      // training part, light..heavy
  std::array<std::size_t, 3> count{};  // all dominant samples per class
};

/// Per-class feature medians over the dominant, non-held-out samples of one
/// component. Throws CalibrationError naming an under-populated class.
ClassMedians class_medians(std::span<const LabeledSample> samples, Component component,
                           const CalibrationOptions& options = {});

/// Midpoints between adjacent class medians; throws CalibrationError when the
/// medians are not strictly increasing.
CutPoints fit_cuts(std::span<const LabeledSample> samples, Component component,
                   const CalibrationOptions& options = {});

/// Accuracy on the held-out split, or on all dominant samples when nothing
/// is held out.
double held_out_accuracy(std::span<const LabeledSample> samples, const CutPoints& cuts,
                         Component component, const CalibrationOptions& options = {});

/// A sample counts for component X when the other two components are
/// labeled light. Cut points are midpoints between adjacent class medians of
/// the training part. Throws CalibrationError.
Calibration calibrate(std::span<const LabeledSample> samples, const CalibrationOptions& options = {});

/// Loads every LR image of a manifest and calibrates against its bins.
Calibration calibrate_manifest(const std::filesystem::path& manifest_path,
                               CalibrationOptions options = {});

std::vector<LabeledSample> labeled_samples(const std::filesystem::path& manifest_path);

/// Fraction of dominant samples whose component is classified correctly.
double accuracy(std::span<const LabeledSample> samples, const Calibration& calibration,
                Component component);

/// resize1 is always unspecified; resize2 is set when `sr_context`.
PromptBins estimate_bins(const ImageBuffer& image, const Calibration& calibration,
                         bool sr_context = true);
std::string estimate_prompt(const ImageBuffer& image, const Calibration& calibration,
                            bool sr_context = true);

struct HookResult {
  std::string text;
  PromptBins bins;
};

/// Runs `command_template` through /bin/sh with every "{image}" replaced by
/// the shell-quoted path; stdout is the prompt. Throws HookError on nonzero
/// exit, timeout, or output that does not parse.
HookResult external_prompter_hook(const std::filesystem::path& image_path,
                                  const std::string& command_template,
                                  std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace srprompt
