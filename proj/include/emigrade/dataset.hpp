#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emigrade/frame.hpp"
#include "emigrade/noise.hpp"

namespace emigrade {

enum class Split { train, val, test };

const char* split_name(Split split);
Split split_from_name(const std::string& name);  // DataError on unknown name

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int level = 0;     // 1..5
  Split split = Split::train;
};

// Frame-to-label mapping for one generated dataset.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::int64_t count(int level, Split split) const;
  std::int64_t count(Split split) const;
};

// Per-level split sizes at scale 1.0.
inline constexpr std::array<int, 3> kFullSplitSizes{800, 200, 100};  // train, val, test

// Scaled per-level counts, rounded to nearest. Throws std::invalid_argument
// when scale is outside (0, 1] or the test split would be empty.
std::array<int, 3> split_counts(double scale);

struct DatasetConfig {
  int width = 1280;
  int height = 720;
  RangeTag range = RangeTag::studio;
  double scale = 1.0;
  NoiseParams noise;
};

// Renders the clean test pattern once (written as clean.emif), then writes
// scale*(800/200/100) noise-injected frames per level per split under
// level<L>/<split>/, plus manifest.txt. Every frame draws from its own RNG
// stream derived from (seed, level, split, index), so output bytes depend
// only on the config.
DatasetManifest build_dataset(const std::filesystem::path& out_dir, const DatasetConfig& config);

// Manifest text format: UTF-8 lines "<path>\t<level>\t<split>"; lines starting
// with '#' are comments.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path,
                   const std::vector<std::string>& comments = {});
DatasetManifest load_manifest(const std::filesystem::path& path);  // DataError on bad lines

}  // namespace emigrade
