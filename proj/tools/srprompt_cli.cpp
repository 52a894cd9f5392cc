// srprompt command-line front end.
//
// Exit codes: 0 success, 1 operational error (I/O, calibration, hook, failed
// verification), 2 usage error. Payload goes to stdout, diagnostics to stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srprompt/codec.hpp"
#include "srprompt/dataset.hpp"
#include "srprompt/degradation.hpp"
#include "srprompt/error.hpp"
#include "srprompt/estimator.hpp"
#include "srprompt/prompt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srprompt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
}

/// Accepts a path or an inline JSON object.
json load_spec_json(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("inline spec is not valid JSON: ") + e.what());
    }
  }
  std::ifstream in(arg);
  if (!in) throw UsageError("cannot read spec file " + arg);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("spec file " + arg + " is not valid JSON: " + e.what());
  }
}

DegradationSpec load_spec(const std::string& arg) {
  try {
    return record_to_spec(load_spec_json(arg));
  } catch (const ParseError& e) {
    throw UsageError("invalid spec field '" + e.field() + "': " + e.what());
  }
}

std::vector<Component> parse_focus(const std::vector<std::string>& items) {
  std::vector<Component> out;
  for (const auto& s : items) {
    if (s == "all") {
      out.assign(kComponents.begin(), kComponents.end());
      continue;
    }
    try {
      out.push_back(component_from_string(s));
    } catch (const std::exception&) {
      throw UsageError("--focus expects blur, noise, compression or all, got '" + s + "'");
    }
  }
  return out;
}

DegradationConfig degradation_from(const std::string& config_path) {
  if (config_path.empty()) return {};
  const json j = load_json_file(config_path);
  try {
    return config_from_json(j.contains("degradation") ? j["degradation"] : j);
  } catch (const ParseError& e) {
    throw UsageError("invalid degradation config field '" + e.field() + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string config;
  std::string hr_dir;
  std::string out;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  int hr_patch = 256;
  int scale = 4;
  bool shuffle_order = false;
  bool shuffle_prompt = false;
  double dropout = 0.0;
  bool one_resize = false;
  bool verbose_prompts = false;
  unsigned workers = 1;
  bool strict = false;
  std::vector<std::string> focus;
};

int run_generate(const CLI::App& cmd, const GenerateArgs& a) {
  BuilderConfig c;
  if (!a.config.empty()) {
    try {
      c = builder_config_from_json(load_json_file(a.config));
    } catch (const ParseError& e) {
      throw UsageError("invalid config field '" + e.field() + "': " + e.what());
    }
  }
  const auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--hr-dir")) c.hr_source_dir = a.hr_dir;
  if (given("--out")) c.output_dir = a.out;
  if (given("--count")) c.record_count = a.count;
  if (given("--seed")) c.global_seed = a.seed;
  if (given("--hr-patch")) c.hr_patch = a.hr_patch;
  if (given("--scale")) c.degradation.scale_factor = a.scale;
  if (given("--shuffle-order")) c.degradation.order_mode = OrderMode::shuffled;
  if (given("--shuffle-prompt")) c.prompt_format.order = PromptOrder::shuffled;
  if (given("--prompt-dropout")) c.prompt_format.dropout = a.dropout;
  if (given("--one-resize")) c.degradation.two_stage_resize = false;
  if (given("--verbose-prompts")) c.prompt_format.verbose = true;
  if (given("--workers")) c.worker_count = a.workers;
  if (given("--strict")) c.strict = true;
  if (given("--focus")) c.focus = parse_focus(a.focus);

  if (c.hr_source_dir.empty()) throw UsageError("--hr-dir is required");
  if (c.output_dir.empty()) throw UsageError("--out is required");

  const fs::path manifest = build(c);
  const Manifest m = read_manifest(manifest);
  std::array<std::array<std::size_t, 4>, 3> levels{};
  for (const auto& r : m.records)
    for (std::size_t i = 0; i < 3; ++i)
      ++levels[i][static_cast<std::size_t>(level_of(r.bins, kComponents[i]))];

  std::cout << manifest.string() << '\n';
  std::cout << "records " << m.records.size();
  for (std::size_t i = 0; i < 3; ++i)
    std::cout << ' ' << to_string(kComponents[i]) << ' ' << levels[i][0] << '/' << levels[i][1]
              << '/' << levels[i][2];
  std::cout << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// degrade / describe

struct DegradeArgs {
  std::string image;
  std::string spec;
  std::uint64_t seed = 0;
  std::string out;
  std::string chroma = "420";
};

int run_degrade(const DegradeArgs& a) {
  const DegradationSpec spec = load_spec(a.spec);
  const ImageBuffer hr = load_image(a.image);
  Rng rng = derive_record_rng(a.seed, 0);
  const auto chroma = a.chroma == "444" ? ChromaSubsampling::s444 : ChromaSubsampling::s420;
  const ImageBuffer lr = apply(spec, hr, rng, chroma);
  save_png(a.out, lr);
  std::cout << a.out << '\n';
  return kExitOk;
}

struct DescribeArgs {
  std::string spec;
  std::string config;
  std::uint64_t seed = 0;
  double dropout = 0.0;
  bool shuffle = false;
  bool verbose = false;
};

int run_describe(const DescribeArgs& a) {
  const DegradationSpec spec = load_spec(a.spec);
  const DegradationConfig config = degradation_from(a.config);
  PromptFormat format;
  format.dropout = a.dropout;
  format.order = a.shuffle ? PromptOrder::shuffled : PromptOrder::fixed;
  format.verbose = a.verbose;
  format.validate();
  Rng rng = derive_record_rng(a.seed, 0);
  if (a.verbose) {
    bins_from_spec(spec, config);  // range check
    std::cout << render_verbose(spec, format, rng) << '\n';
  } else {
    std::cout << render(bins_from_spec(spec, config), format, rng) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate / calibrate

struct EstimateArgs {
  std::string image;
  std::string calibration;
  bool no_sr_context = false;
  std::string hook;
  double timeout = 30.0;
};

int run_estimate(const EstimateArgs& a) {
  if (!a.hook.empty()) {
    const auto ms = std::chrono::milliseconds(static_cast<long long>(a.timeout * 1000.0));
    try {
      std::cout << external_prompter_hook(a.image, a.hook, ms).text << '\n';
    } catch (const HookError& e) {
      std::cerr << "srprompt: " << e.what() << '\n';
      if (!e.raw_output().empty()) std::cerr << "hook output:\n" << e.raw_output() << '\n';
      return kExitFailure;
    }
    return kExitOk;
  }
  const Calibration cal = a.calibration.empty() ? default_calibration()
                                                : load_calibration(a.calibration);
  std::cout << estimate_prompt(load_image(a.image), cal, !a.no_sr_context) << '\n';
  return kExitOk;
}

struct CalibrateArgs {
  std::vector<std::string> manifests;
  std::string out;
  std::size_t min_per_class = 100;
  std::uint64_t holdout_modulus = 5;
};

int run_calibrate(const CalibrateArgs& a) {
  std::vector<LabeledSample> samples;
  CalibrationOptions options;
  options.min_per_class = a.min_per_class;
  options.holdout_modulus = a.holdout_modulus;
  for (std::size_t i = 0; i < a.manifests.size(); ++i) {
    const fs::path p = a.manifests[i];
    if (i == 0) {
      const Manifest m = read_manifest(p);
      if (m.header.contains("config"))
        options.seed = m.header["config"].value("global_seed", std::uint64_t{0});
    }
    auto part = labeled_samples(p);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  const Calibration cal = calibrate(samples, options);
  std::fprintf(stderr, "held-out accuracy: blur %.3f, noise %.3f, compression %.3f (%llu held out)\n",
               cal.metadata.blur_accuracy, cal.metadata.noise_accuracy,
               cal.metadata.compression_accuracy,
               static_cast<unsigned long long>(cal.metadata.held_out));
  if (a.out.empty()) {
    std::cout << calibration_to_json(cal).dump(2) << '\n';
  } else {
    save_calibration(a.out, cal);
    std::cout << a.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats / verify

int run_stats(const std::string& manifest, const std::string& format) {
  const StatsReport r = stats(fs::path(manifest));
  if (format == "table") std::cout << r.table;
  else std::cout << r.json.dump(2) << '\n';
  return kExitOk;
}

int run_verify(const std::string& manifest, const std::string& mode, const std::string& hr_dir) {
  std::optional<fs::path> override_dir;
  if (!hr_dir.empty()) override_dir = hr_dir;
  const VerifyReport r = verify(manifest, mode == "regenerate" ? VerifyMode::regenerate
                                                               : VerifyMode::checksum,
                                override_dir);
  for (const auto& m : r.mismatches) std::cerr << m.id << ": " << m.reason << '\n';
  const auto ids = r.mismatched_ids();
  std::cout << ids.size() << " mismatches\n";
  for (const auto& id : ids) std::cout << id << '\n';
  return ids.empty() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degradation-aware prompt dataset tooling for blind super-resolution"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", kToolVersion);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build an (HR, LR, prompt) dataset");
  generate->add_option("--config", gen.config, "Builder config JSON; flags win on conflict");
  generate->add_option("--hr-dir", gen.hr_dir, "Directory of HR source images");
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--count", gen.count, "Number of records")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Global seed")->capture_default_str();
  generate->add_option("--hr-patch", gen.hr_patch, "HR patch side in pixels")->capture_default_str();
  generate->add_option("--scale", gen.scale, "Downscale factor")->capture_default_str();
  generate->add_flag("--shuffle-order", gen.shuffle_order, "Shuffle the degradation stage order");
  generate->add_flag("--shuffle-prompt", gen.shuffle_prompt, "Shuffle descriptor order in prompts");
  generate->add_option("--prompt-dropout", gen.dropout, "Per-descriptor omission probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  generate->add_flag("--one-resize", gen.one_resize, "Single resize stage (gamma1 = 1)");
  generate->add_flag("--verbose-prompts", gen.verbose_prompts, "Parameter-level prompt wording");
  generate->add_option("--workers", gen.workers, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_flag("--strict", gen.strict, "Abort on unreadable or undersized sources");
  generate->add_option("--focus", gen.focus,
                       "Single-degradation-dominant sets: blur,noise,compression or all")
      ->delimiter(',');

  DegradeArgs deg;
  auto* degrade = app.add_subcommand("degrade", "Apply one degradation spec to an image");
  degrade->add_option("--image", deg.image, "Input HR image (PNG or JPEG)")->required();
  degrade->add_option("--spec", deg.spec, "Spec record: file path or inline JSON")->required();
  degrade->add_option("--seed", deg.seed, "Seed for the noise stage")->capture_default_str();
  degrade->add_option("--out", deg.out, "Output PNG")->required();
  degrade->add_option("--chroma", deg.chroma, "JPEG chroma subsampling")
      ->capture_default_str()
      ->check(CLI::IsMember({"420", "444"}));

  DescribeArgs desc;
  auto* describe = app.add_subcommand("describe", "Render the prompt of a spec");
  describe->add_option("--spec", desc.spec, "Spec record: file path or inline JSON")->required();
  describe->add_option("--config", desc.config, "Degradation config JSON for the bin ranges");
  describe->add_option("--seed", desc.seed, "Seed for dropout and shuffling")->capture_default_str();
  describe->add_option("--dropout", desc.dropout, "Per-descriptor omission probability")
      ->check(CLI::Range(0.0, 1.0));
  describe->add_flag("--shuffle", desc.shuffle, "Shuffle descriptor order");
  describe->add_flag("--verbose", desc.verbose, "Parameter-level wording");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a prompt from a degraded image");
  estimate->add_option("--image", est.image, "Input image")->required();
  estimate->add_option("--calibration", est.calibration, "Calibration JSON (default: built-in)");
  estimate->add_flag("--no-sr-context", est.no_sr_context, "Omit the trailing downsample");
  estimate->add_option("--hook", est.hook,
                       "External prompter command; {image} is replaced by the image path");
  estimate->add_option("--timeout", est.timeout, "Hook timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit estimator cut points on a manifest");
  calibrate_cmd->add_option("--manifest", cal.manifests, "Labeled manifest (repeatable)")
      ->required();
  calibrate_cmd->add_option("--out", cal.out, "Calibration JSON to write (default: stdout)");
  calibrate_cmd->add_option("--min-per-class", cal.min_per_class, "Minimum records per class")
      ->capture_default_str();
  calibrate_cmd->add_option("--holdout", cal.holdout_modulus,
                            "Hold out record_index % N == N-1 (0 disables)")
      ->capture_default_str();

  std::string stats_manifest, stats_format = "json";
  auto* stats_cmd = app.add_subcommand("stats", "Distribution report of a manifest");
  stats_cmd->add_option("--manifest", stats_manifest, "Manifest path")->required();
  stats_cmd->add_option("--format", stats_format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "table"}));

  std::string verify_manifest, verify_mode = "checksum", verify_hr_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Check a built dataset");
  verify_cmd->add_option("--manifest", verify_manifest, "Manifest path")->required();
  verify_cmd->add_option("--mode", verify_mode, "Verification mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"checksum", "regenerate"}));
  verify_cmd->add_option("--hr-dir", verify_hr_dir, "Override the recorded source directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return run_generate(*generate, gen);
    if (*degrade) return run_degrade(deg);
    if (*describe) return run_describe(desc);
    if (*estimate) return run_estimate(est);
    if (*calibrate_cmd) return run_calibrate(cal);
    if (*stats_cmd) return run_stats(stats_manifest, stats_format);
    if (*verify_cmd) return run_verify(verify_manifest, verify_mode, verify_hr_dir);
  } catch (const UsageError& e) {
    std::cerr << "srprompt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "srprompt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "srprompt: " << e.field() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "srprompt: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
