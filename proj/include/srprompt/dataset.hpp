#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srprompt/codec.hpp"
#include "srprompt/degradation.hpp"
#include "srprompt/prompt.hpp"

namespace srprompt {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kToolVersion = "srprompt 0.1.0";

struct BuilderConfig {
  std::filesystem::path hr_source_dir;
  std::filesystem::path output_dir;
  std::uint64_t record_count = 1;
  std::uint64_t global_seed = 0;
  int hr_patch = 256;
  DegradationConfig degradation;
  PromptFormat prompt_format;
  unsigned worker_count = 1;
  /// Abort on unreadable or undersized sources instead of skipping them.
  bool strict = false;
  /// Single-degradation-dominant mode. Record i varies only
  /// focus[i % focus.size()], stratified over its thirds by (i / focus.size()) % 3;
  /// the other components sit at their lightest setting, with one bicubic
  /// resize stage. Empty means the regular sampler.
  std::vector<Component> focus;

  void validate() const;
};

/// Content-defining part of the config, as stored in the manifest header.
/// Output location and worker count are excluded so that they cannot change
/// manifest bytes.
nlohmann::json builder_config_to_json(const BuilderConfig& config);
BuilderConfig builder_config_from_json(const nlohmann::json& j);

struct DatasetRecord {
  std::string id;
  std::string hr_path;  // relative to the manifest directory
  std::string lr_path;
  std::string prompt;
  PromptBins bins;
  DegradationSpec spec;
  std::uint64_t record_index = 0;
  std::uint64_t derived_seed = 0;
  std::string hr_checksum;
  std::string lr_checksum;

  bool operator==(const DatasetRecord&) const = default;
};

nlohmann::json bins_to_json(const PromptBins& bins);
PromptBins bins_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& j);

std::string record_id(std::uint64_t record_index);

struct Manifest {
  nlohmann::json header;
  std::vector<DatasetRecord> records;
};

/// Throws ParseError("line N") on malformed input.
Manifest read_manifest(const std::filesystem::path& path);

/// Sorted list of decodable sources at least `min_side` in both dimensions.
class SourceCatalog {
 public:
  struct Entry {
    std::filesystem::path path;
    int height;
    int width;
  };

  SourceCatalog(const std::filesystem::path& dir, int min_side, bool strict);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

/// One fully materialized record. `kept` reports which prompt slots
/// survived dropout.
struct GeneratedRecord {
  DatasetRecord record;
  Bytes hr_png;
  Bytes lr_png;
  std::array<bool, kDescriptorCount> kept{};
};

/// Derives everything for `record_index` from (config, catalog) alone.
GeneratedRecord generate_record(const BuilderConfig& config, const SourceCatalog& catalog,
                                std::uint64_t record_index);

/// The spec draw used by `generate_record`, exposed for inspection.
DegradationSpec sample_record_spec(const BuilderConfig& config, std::uint64_t record_index,
                                   Rng& rng);

/// Writes hr/, lr/ and manifest.jsonl under output_dir; returns the manifest path.
std::filesystem::path build(const BuilderConfig& config);

/// Distribution report over a manifest: JSON plus an aligned text table.
struct StatsReport {
  nlohmann::json json;
  std::string table;
};
StatsReport stats(const Manifest& manifest);
StatsReport stats(const std::filesystem::path& manifest_path);

enum class VerifyMode { checksum, regenerate };

struct VerifyReport {
  struct Mismatch {
    std::string id;
    std::string reason;
  };
  std::size_t checked = 0;
  std::vector<Mismatch> mismatches;

  /// Distinct ids with at least one mismatch, sorted.
  std::vector<std::string> mismatched_ids() const;
};

/// Missing files are reported as mismatches, never thrown. `hr_dir_override`
/// replaces the source directory recorded in the header.
VerifyReport verify(const std::filesystem::path& manifest_path, VerifyMode mode,
                    const std::optional<std::filesystem::path>& hr_dir_override = std::nullopt);

}  // namespace srprompt
