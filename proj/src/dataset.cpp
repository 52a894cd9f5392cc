#include "srprompt/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace srprompt {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

void BuilderConfig::validate() const {
  degradation.validate();
  prompt_format.validate();
  if (record_count < 1) throw InvalidArgument("record_count must be >= 1");
  if (hr_patch < 8 * degradation.scale_factor)
    throw InvalidArgument("hr_patch must be at least 8 * scale_factor");
  if (hr_patch % degradation.scale_factor != 0)
    throw InvalidArgument("hr_patch must be divisible by scale_factor");
  if (worker_count < 1) throw InvalidArgument("worker_count must be >= 1");
}

json builder_config_to_json(const BuilderConfig& c) {
  json focus = json::array();
  for (Component f : c.focus) focus.push_back(std::string(to_string(f)));
  return json{{"hr_source_dir", fs::absolute(c.hr_source_dir).lexically_normal().string()},
              {"record_count", c.record_count},
              {"global_seed", c.global_seed},
              {"hr_patch", c.hr_patch},
              {"degradation", config_to_json(c.degradation)},
              {"prompt_format",
               {{"order", c.prompt_format.order == PromptOrder::fixed ? "fixed" : "shuffled"},
                {"dropout", c.prompt_format.dropout},
                {"verbose", c.prompt_format.verbose}}},
              {"strict", c.strict},
              {"focus", focus}};
}

BuilderConfig builder_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("config", "builder config must be a JSON object");
  BuilderConfig c;
  try {
    if (j.contains("hr_source_dir")) c.hr_source_dir = j["hr_source_dir"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("record_count")) c.record_count = j["record_count"].get<std::uint64_t>();
    if (j.contains("global_seed")) c.global_seed = j["global_seed"].get<std::uint64_t>();
    if (j.contains("hr_patch")) c.hr_patch = j["hr_patch"].get<int>();
    if (j.contains("degradation")) c.degradation = config_from_json(j["degradation"]);
    if (j.contains("prompt_format")) {
      const json& f = j["prompt_format"];
      if (f.contains("order")) {
        const auto o = f["order"].get<std::string>();
        if (o == "fixed") c.prompt_format.order = PromptOrder::fixed;
        else if (o == "shuffled") c.prompt_format.order = PromptOrder::shuffled;
        else throw ParseError("prompt_format.order", "order must be fixed or shuffled");
      }
      if (f.contains("dropout")) c.prompt_format.dropout = f["dropout"].get<double>();
      if (f.contains("verbose")) c.prompt_format.verbose = f["verbose"].get<bool>();
    }
    if (j.contains("worker_count")) c.worker_count = j["worker_count"].get<unsigned>();
    if (j.contains("strict")) c.strict = j["strict"].get<bool>();
    if (j.contains("focus"))
      for (const auto& f : j["focus"]) c.focus.push_back(component_from_string(f.get<std::string>()));
  } catch (const json::exception& e) {
    throw ParseError("config", std::string("invalid builder config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Records

json bins_to_json(const PromptBins& b) {
  return json{{"blur", to_string(b.blur)},
              {"resize1", to_string(b.resize1)},
              {"noise", to_string(b.noise)},
              {"compression", to_string(b.compression)},
              {"resize2", b.resize2}};
}

PromptBins bins_from_json(const json& j) {
  PromptBins b;
  try {
    b.blur = level_from_string(j.at("blur").get<std::string>());
    b.resize1 = direction_from_string(j.at("resize1").get<std::string>());
    b.noise = level_from_string(j.at("noise").get<std::string>());
    b.compression = level_from_string(j.at("compression").get<std::string>());
    b.resize2 = j.at("resize2").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError("bins", std::string("invalid bins: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError("bins", std::string("invalid bins: ") + e.what());
  }
  return b;
}

json record_to_json(const DatasetRecord& r) {
  return json{{"id", r.id},
              {"hr_path", r.hr_path},
              {"lr_path", r.lr_path},
              {"prompt", r.prompt},
              {"bins", bins_to_json(r.bins)},
              {"spec", spec_to_record(r.spec)},
              {"record_index", r.record_index},
              {"derived_seed", r.derived_seed},
              {"hr_checksum", r.hr_checksum},
              {"lr_checksum", r.lr_checksum}};
}

DatasetRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("record", "record must be a JSON object");
  DatasetRecord r;
  const auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string())
      throw ParseError(key, std::string("missing or non-string field ") + key);
    return j[key].get<std::string>();
  };
  const auto u64 = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned())
      throw ParseError(key, std::string("missing or non-integer field ") + key);
    return j[key].get<std::uint64_t>();
  };
  r.id = str("id");
  r.hr_path = str("hr_path");
  r.lr_path = str("lr_path");
  r.prompt = str("prompt");
  if (!j.contains("bins")) throw ParseError("bins", "missing field bins");
  r.bins = bins_from_json(j["bins"]);
  if (!j.contains("spec")) throw ParseError("spec", "missing field spec");
  r.spec = record_to_spec(j["spec"]);
  r.record_index = u64("record_index");
  r.derived_seed = u64("derived_seed");
  r.hr_checksum = str("hr_checksum");
  r.lr_checksum = str("lr_checksum");
  return r;
}

std::string record_id(std::uint64_t record_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(record_index));
  return buf;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no),
                       "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (m.header.is_null() && j.is_object() && j.contains("format_version")) {
      m.header = std::move(j);
      continue;
    }
    try {
      m.records.push_back(record_from_json(j));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no),
                       "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Sources

SourceCatalog::SourceCatalog(const fs::path& dir, int min_side, bool strict) {
  if (!fs::is_directory(dir)) throw IoError("source directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  for (const auto& f : files) {
    Image8 img;
    try {
      img = load_image8(f);
    } catch (const std::exception& e) {
      if (strict) throw IoError("unreadable source " + f.string() + ": " + e.what());
      std::cerr << "warning: skipping unreadable source " << f.string() << "\n";
      continue;
    }
    if (img.height < min_side || img.width < min_side) {
      if (strict) throw IoError("undersized source " + f.string());
      std::cerr << "warning: skipping undersized source " << f.string() << "\n";
      continue;
    }
    entries_.push_back({f, img.height, img.width});
  }
  if (entries_.empty()) throw IoError("no usable source images in " + dir.string());
}

// ---------------------------------------------------------------------------
// Generation

namespace {

DegradationConfig focused_config(const DegradationConfig& base, Component focus) {
  DegradationConfig c = base;
  c.two_stage_resize = false;
  c.resize_method_probs = {0.0, 0.0, 1.0};
  c.order_mode = OrderMode::fixed;
  c.blur_kind_prob = {1.0, 0.0};
  if (focus != Component::blur) c.sigma_range = {base.sigma_range.lo, base.sigma_range.lo};
  if (focus != Component::noise) {
    c.noise_kind_prob = {1.0, 0.0};
    c.phi1_range = {base.phi1_range.lo, base.phi1_range.lo};
  }
  if (focus != Component::compression) c.q_range = {base.q_range.hi, base.q_range.hi};
  return c;
}

double stratified(const Range& r, std::uint64_t stratum, Rng& rng) {
  const double w = (r.hi - r.lo) / 3.0;
  const double lo = r.lo + static_cast<double>(stratum % 3) * w;
  return std::min(uniform(rng, lo, lo + w), r.hi);
}

Image8 crop8(const Image8& src, int top, int left, int size) {
  Image8 out;
  out.height = out.width = size;
  out.channels = src.channels;
  out.data.resize(static_cast<std::size_t>(size) * size * src.channels);
  const std::size_t row = static_cast<std::size_t>(size) * src.channels;
  for (int y = 0; y < size; ++y) {
    const auto* from = src.data.data() +
                       (static_cast<std::size_t>(top + y) * src.width + left) * src.channels;
    std::copy(from, from + row, out.data.begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)), n - 1);
}

}  // namespace

DegradationSpec sample_record_spec(const BuilderConfig& config, std::uint64_t record_index,
                                   Rng& rng) {
  if (config.focus.empty()) return sample_spec(config.degradation, rng);
  const DegradationConfig& base = config.degradation;
  const Component focus = config.focus[record_index % config.focus.size()];
  const std::uint64_t stratum = record_index / config.focus.size();
  DegradationSpec s = sample_spec(focused_config(base, focus), rng);
  switch (focus) {
    case Component::blur:
      s.sigma_x = s.sigma_y = stratified(base.sigma_range, stratum, rng);
      break;
    case Component::noise:
      s.noise_level = stratified(
          s.noise_kind == NoiseKind::gaussian ? base.phi1_range : base.phi2_range, stratum, rng);
      break;
    case Component::compression:
      // q runs opposite to the label: stratum 0 must land in the light (high q) third
      s.jpeg_q = stratified(base.q_range, 2 - stratum % 3, rng);
      break;
  }
  return s;
}

GeneratedRecord generate_record(const BuilderConfig& config, const SourceCatalog& catalog,
                                std::uint64_t record_index) {
  GeneratedRecord out;
  DatasetRecord& r = out.record;
  r.record_index = record_index;
  r.derived_seed = derive_seed(config.global_seed, record_index);
  r.id = record_id(record_index);
  r.hr_path = "hr/" + r.id + ".png";
  r.lr_path = "lr/" + r.id + ".png";
  Rng rng(r.derived_seed);

  const auto& src = catalog.entries()[pick(rng, catalog.size())];
  const int patch = config.hr_patch;
  const int top = static_cast<int>(pick(rng, static_cast<std::size_t>(src.height - patch + 1)));
  const int left = static_cast<int>(pick(rng, static_cast<std::size_t>(src.width - patch + 1)));
  const Image8 hr8 = crop8(load_image8(src.path), top, left, patch);
  const ImageBuffer hr = from_8bit(hr8);

  r.spec = sample_record_spec(config, record_index, rng);
  const ImageBuffer lr = apply(r.spec, hr, rng, config.degradation.jpeg_chroma);
  r.bins = bins_from_spec(r.spec, config.degradation);
  if (config.prompt_format.verbose) {
    r.prompt = render_verbose(r.spec, config.prompt_format, rng);
    out.kept.fill(true);
  } else {
    RenderedPrompt p = render_detailed(r.bins, config.prompt_format, rng);
    r.prompt = std::move(p.text);
    out.kept = p.kept;
  }

  out.hr_png = encode_png(hr8);
  out.lr_png = encode_png(to_8bit(lr));
  r.hr_checksum = sha256_hex(out.hr_png);
  r.lr_checksum = sha256_hex(out.lr_png);
  return out;
}

fs::path build(const BuilderConfig& config) {
  config.validate();
  const SourceCatalog catalog(config.hr_source_dir, config.hr_patch, config.strict);
  fs::create_directories(config.output_dir / "hr");
  fs::create_directories(config.output_dir / "lr");

  std::vector<DatasetRecord> records(config.record_count);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= config.record_count) return;
      try {
        GeneratedRecord g = generate_record(config, catalog, i);
        write_file(config.output_dir / g.record.hr_path, g.hr_png);
        write_file(config.output_dir / g.record.lr_path, g.lr_png);
        records[i] = std::move(g.record);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.record_count;
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::min<std::uint64_t>(config.worker_count, config.record_count);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(records.begin(), records.end(),
            [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
  const fs::path manifest = config.output_dir / "manifest.jsonl";
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + manifest.string());
  const json header{{"format_version", kManifestFormatVersion},
                    {"tool_version", kToolVersion},
                    {"config", builder_config_to_json(config)}};
  out << header.dump() << '\n';
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw IoError("short write to manifest " + manifest.string());
  return manifest;
}

// ---------------------------------------------------------------------------
// Stats

namespace {

struct Histogram {
  Range range;
  std::array<std::uint64_t, 10> counts{};

  void add(double v) {
    const double w = range.hi - range.lo;
    std::size_t b = 0;
    if (w > 0.0)
      b = std::min<std::size_t>(9, static_cast<std::size_t>(std::max(0.0, (v - range.lo) / w * 10.0)));
    ++counts[b];
  }
  json to_json() const {
    return json{{"range", {range.lo, range.hi}}, {"counts", counts}};
  }
};

std::size_t count_descriptors(const std::string& prompt) {
  if (prompt.find_first_not_of(" \t") == std::string::npos) return 0;
  return static_cast<std::size_t>(std::count(prompt.begin(), prompt.end(), ',')) + 1;
}

}  // namespace

StatsReport stats(const Manifest& manifest) {
  DegradationConfig dc;
  if (manifest.header.is_object() && manifest.header.contains("config") &&
      manifest.header["config"].contains("degradation"))
    dc = config_from_json(manifest.header["config"]["degradation"]);

  std::map<std::string, std::map<std::string, std::uint64_t>> bins;
  std::map<std::string, std::map<std::string, std::uint64_t>> kinds;
  for (Component c : kComponents)
    for (Level l : {Level::light, Level::medium, Level::heavy, Level::unspecified})
      bins[std::string(to_string(c))][std::string(to_string(l))] = 0;
  for (Direction d :
       {Direction::upsample, Direction::downsample, Direction::unchange, Direction::unspecified})
    bins["resize1"][std::string(to_string(d))] = 0;
  bins["resize2"]["present"] = 0;
  bins["resize2"]["absent"] = 0;
  for (const char* k : {"iso", "aniso"}) kinds["blur_kind"][k] = 0;
  for (const char* k : {"gaussian", "poisson"}) kinds["noise_kind"][k] = 0;
  for (const char* k : {"rgb", "gray"}) kinds["noise_format"][k] = 0;
  for (const char* k : {"area", "bilinear", "bicubic"}) {
    kinds["resize1_method"][k] = 0;
    kinds["resize2_method"][k] = 0;
  }

  std::map<std::string, Histogram> hist{{"sigma_x", {dc.sigma_range}},
                                        {"sigma_y", {dc.sigma_range}},
                                        {"theta", {dc.theta_range}},
                                        {"gamma1", {dc.gamma1_range}},
                                        {"phi1", {dc.phi1_range}},
                                        {"phi2", {dc.phi2_range}},
                                        {"jpeg_q", {dc.q_range}}};
  std::array<std::uint64_t, kDescriptorCount + 1> prompt_descriptors{};
  std::map<std::string, std::uint64_t> tokens{
      {"blur", 0}, {"noise", 0}, {"compression", 0}, {"upsample", 0}, {"downsample", 0}, {"unchange", 0}};
  std::uint64_t chars_total = 0, chars_min = 0, chars_max = 0;

  for (const auto& r : manifest.records) {
    for (Component c : kComponents)
      ++bins[std::string(to_string(c))][std::string(to_string(level_of(r.bins, c)))];
    ++bins["resize1"][std::string(to_string(r.bins.resize1))];
    ++bins["resize2"][r.bins.resize2 ? "present" : "absent"];

    const DegradationSpec& s = r.spec;
    ++kinds["blur_kind"][std::string(to_string(s.blur_kind))];
    ++kinds["noise_kind"][std::string(to_string(s.noise_kind))];
    ++kinds["noise_format"][s.gray_noise ? "gray" : "rgb"];
    ++kinds["resize1_method"][std::string(to_string(s.resize1_method))];
    ++kinds["resize2_method"][std::string(to_string(s.resize2_method))];

    hist["sigma_x"].add(s.sigma_x);
    hist["sigma_y"].add(s.sigma_y);
    if (s.blur_kind == BlurKind::aniso) hist["theta"].add(s.theta);
    hist["gamma1"].add(s.gamma1);
    hist[s.noise_kind == NoiseKind::gaussian ? "phi1" : "phi2"].add(s.noise_level);
    hist["jpeg_q"].add(s.jpeg_q);

    ++prompt_descriptors[std::min(count_descriptors(r.prompt), kDescriptorCount)];
    std::stringstream ss(r.prompt);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::stringstream ws(part);
      std::string word, last;
      while (ws >> word) last = word;
      if (tokens.count(last)) ++tokens[last];
    }
    const std::uint64_t len = r.prompt.size();
    chars_total += len;
    chars_min = (&r == &manifest.records.front()) ? len : std::min(chars_min, len);
    chars_max = std::max(chars_max, len);
  }

  const std::uint64_t n = manifest.records.size();
  json hist_json;
  for (const auto& [k, h] : hist) hist_json[k] = h.to_json();
  StatsReport report;
  report.json = json{{"records", n},
                     {"bins", bins},
                     {"kinds", kinds},
                     {"histograms", hist_json},
                     {"prompt",
                      {{"descriptor_count", prompt_descriptors},
                       {"descriptor_tokens", tokens},
                       {"length_chars",
                        {{"min", chars_min},
                         {"max", chars_max},
                         {"mean", n ? static_cast<double>(chars_total) / static_cast<double>(n) : 0.0}}}}}};

  std::ostringstream t;
  const auto frac = [&](std::uint64_t c) {
    std::ostringstream f;
    f << std::fixed << std::setprecision(4) << (n ? static_cast<double>(c) / static_cast<double>(n) : 0.0);
    return f.str();
  };
  t << "records: " << n << "\n\n";
  t << std::left << std::setw(16) << "component" << std::setw(14) << "value" << std::right
    << std::setw(10) << "count" << std::setw(10) << "fraction" << "\n";
  for (const auto* group : {&bins, &kinds})
    for (const auto& [name, values] : *group)
      for (const auto& [value, count] : values)
        t << std::left << std::setw(16) << name << std::setw(14) << value << std::right
          << std::setw(10) << count << std::setw(10) << frac(count) << "\n";
  t << "\n" << std::left << std::setw(16) << "histogram" << std::right << "  counts (10 bins)\n";
  for (const auto& [name, h] : hist) {
    t << std::left << std::setw(16) << name << std::right;
    for (auto c : h.counts) t << std::setw(7) << c;
    t << "\n";
  }
  t << "\n" << std::left << std::setw(16) << "descriptors" << std::right;
  for (std::size_t i = 0; i <= kDescriptorCount; ++i) t << std::setw(7) << prompt_descriptors[i];
  t << "   (prompts with 0..5 descriptors)\n";
  report.table = t.str();
  return report;
}

StatsReport stats(const fs::path& manifest_path) { return stats(read_manifest(manifest_path)); }

// ---------------------------------------------------------------------------
// Verify

std::vector<std::string> VerifyReport::mismatched_ids() const {
  std::set<std::string> ids;
  for (const auto& m : mismatches) ids.insert(m.id);
  return {ids.begin(), ids.end()};
}

VerifyReport verify(const fs::path& manifest_path, VerifyMode mode,
                    const std::optional<fs::path>& hr_dir_override) {
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  VerifyReport report;

  const auto stored_checksum = [&](const std::string& id, const std::string& rel,
                                   std::string& out) {
    const fs::path p = root / rel;
    if (!fs::exists(p)) {
      report.mismatches.push_back({id, "missing file " + rel});
      return false;
    }
    out = sha256_hex(read_file(p));
    return true;
  };

  if (mode == VerifyMode::checksum) {
    for (const auto& r : manifest.records) {
      ++report.checked;
      std::string sum;
      if (stored_checksum(r.id, r.hr_path, sum) && sum != r.hr_checksum)
        report.mismatches.push_back({r.id, "hr checksum mismatch"});
      if (stored_checksum(r.id, r.lr_path, sum) && sum != r.lr_checksum)
        report.mismatches.push_back({r.id, "lr checksum mismatch"});
    }
    return report;
  }

  if (!manifest.header.is_object() || !manifest.header.contains("config"))
    throw ParseError("header", "regenerate mode needs the manifest config header");
  BuilderConfig config = builder_config_from_json(manifest.header["config"]);
  if (hr_dir_override) config.hr_source_dir = *hr_dir_override;
  config.validate();
  const SourceCatalog catalog(config.hr_source_dir, config.hr_patch, config.strict);

  for (const auto& r : manifest.records) {
    ++report.checked;
    const GeneratedRecord g = generate_record(config, catalog, r.record_index);
    const DatasetRecord& e = g.record;
    const auto check = [&](bool ok, const char* what) {
      if (!ok) report.mismatches.push_back({r.id, std::string(what) + " mismatch"});
    };
    check(r.id == e.id, "id");
    check(r.hr_path == e.hr_path && r.lr_path == e.lr_path, "path");
    check(r.derived_seed == e.derived_seed, "derived_seed");
    check(r.spec == e.spec, "spec");
    check(r.bins == e.bins, "bins");
    check(r.prompt == e.prompt, "prompt");
    check(r.hr_checksum == e.hr_checksum, "hr_checksum");
    check(r.lr_checksum == e.lr_checksum, "lr_checksum");
    std::string sum;
    if (stored_checksum(r.id, r.hr_path, sum)) check(sum == e.hr_checksum, "hr bytes");
    if (stored_checksum(r.id, r.lr_path, sum)) check(sum == e.lr_checksum, "lr bytes");
  }
  return report;
}

}  // namespace srprompt
