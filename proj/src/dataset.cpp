#include "emigrade/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "emigrade/errors.hpp"
#include "emigrade/rng.hpp"

namespace emigrade {

namespace {

constexpr std::array<Split, 3> kSplits{Split::train, Split::val, Split::test};

std::string frame_rel_path(int level, Split split, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "level%d/%s/%05d.emif", level, split_name(split), index);
  return buf;
}

}  // namespace

const char* split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw DataError("unknown split '" + name + "' (expected train, val or test)");
}

std::int64_t DatasetManifest::count(int level, Split split) const {
  std::int64_t n = 0;
  for (const auto& e : entries)
    if (e.level == level && e.split == split) ++n;
  return n;
}

std::int64_t DatasetManifest::count(Split split) const {
  std::int64_t n = 0;
  for (const auto& e : entries)
    if (e.split == split) ++n;
  return n;
}

std::array<int, 3> split_counts(double scale) {
  if (!(scale > 0.0) || scale > 1.0)
    throw std::invalid_argument("scale must lie in (0, 1]");
  std::array<int, 3> counts{};
  for (std::size_t i = 0; i < counts.size(); ++i)
    counts[i] = static_cast<int>(std::llround(scale * kFullSplitSizes[i]));
  if (counts[2] < 1)
    throw std::invalid_argument("scale " + std::to_string(scale) +
                                " yields zero test samples per class");
  return counts;
}

DatasetManifest build_dataset(const std::filesystem::path& out_dir, const DatasetConfig& config) {
  config.noise.validate();
  const auto counts = split_counts(config.scale);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string());

  const Frame clean = render_colour_bars(config.width, config.height, config.range);
  save_emif(clean, out_dir / "clean.emif");

  DatasetManifest manifest;
  for (int level = 1; level <= 5; ++level) {
    for (std::size_t s = 0; s < kSplits.size(); ++s) {
      const Split split = kSplits[s];
      std::filesystem::create_directories(
          out_dir / ("level" + std::to_string(level)) / split_name(split), ec);
      if (ec) throw DataError("cannot create output directory tree under " + out_dir.string());
      for (int i = 0; i < counts[s]; ++i) {
        Rng rng(derive_stream(config.noise.seed,
                              {kStreamFrame, static_cast<std::uint64_t>(level),
                               static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i)}));
        const Frame noisy = inject_noise(clean, NoiseLevel(level), config.noise, rng);
        const std::string rel = frame_rel_path(level, split, i);
        save_emif(noisy, out_dir / rel);
        manifest.entries.push_back({rel, level, split});
      }
    }
  }

  std::ostringstream scale_str;
  scale_str << config.scale;
  save_manifest(manifest, out_dir / "manifest.txt",
                {"seed=" + std::to_string(config.noise.seed), "scale=" + scale_str.str(),
                 "width=" + std::to_string(config.width),
                 "height=" + std::to_string(config.height),
                 std::string("range=") + (config.range == RangeTag::studio ? "studio" : "full")});
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path,
                   const std::vector<std::string>& comments) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  for (const auto& c : comments) os << "# " << c << "\n";
  for (const auto& e : manifest.entries)
    os << e.path << "\t" << e.level << "\t" << split_name(e.split) << "\n";
  if (!os) throw DataError("write failed for " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open manifest " + path.string());

  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const auto where = path.string() + ":" + std::to_string(line_no);
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw DataError(where + ": expected <path>\\t<level>\\t<split>");

    ManifestEntry entry;
    entry.path = line.substr(0, t1);
    const std::string level_str = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string split_str = line.substr(t2 + 1);
    if (entry.path.empty()) throw DataError(where + ": empty frame path");
    try {
      std::size_t used = 0;
      entry.level = std::stoi(level_str, &used);
      if (used != level_str.size()) throw std::invalid_argument(level_str);
    } catch (const std::exception&) {
      throw DataError(where + ": bad level '" + level_str + "'");
    }
    if (entry.level < 1 || entry.level > 5)
      throw DataError(where + ": level " + level_str + " outside 1..5");
    entry.split = split_from_name(split_str);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace emigrade
