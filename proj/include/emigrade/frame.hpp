#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace emigrade {

enum class RangeTag : std::uint8_t { studio = 0, full = 1 };

struct Ycbcr {
  std::uint8_t y, cb, cr;
};

// One 8-bit YCbCr 4:4:4 video frame, planes stored row-major.
struct Frame {
  int width = 0;
  int height = 0;
  RangeTag range = RangeTag::studio;
  std::vector<std::uint8_t> y, cb, cr;

  static Frame blank(int width, int height, RangeTag range);
  std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }

  std::uint8_t& y_at(int r, int c) { return y[static_cast<std::size_t>(r) * width + c]; }
  std::uint8_t y_at(int r, int c) const { return y[static_cast<std::size_t>(r) * width + c]; }

  bool same_dimensions(const Frame& other) const {
    return width == other.width && height == other.height;
  }
};

// BT.601 conversion of gamma-encoded RGB in [0,1]. Studio range maps Y to
// 16..235 and chroma to 16..240; full range uses 0..255. Values are rounded
// half away from zero and clipped.
Ycbcr ycbcr_from_rgb(double r, double g, double b, RangeTag range);

// Eight full-height vertical bars at 75% amplitude, left to right: white,
// yellow, cyan, green, magenta, red, blue, black. Width not divisible by 8
// puts the remainder into the black bar. Deterministic; throws on zero
// dimensions.
Frame render_colour_bars(int width, int height, RangeTag range = RangeTag::studio);

// EMIF frame container:
//   offset 0   magic "EMIF"
//   offset 4   version, 1 byte (= 1)
//   offset 5   width,  u32 little-endian
//   offset 9   height, u32 little-endian
//   offset 13  range tag, 1 byte (0 = studio, 1 = full)
//   offset 14  Y plane, then Cb plane, then Cr plane, row-major raw bytes
// Total size is 14 + 3*width*height bytes.
void save_emif(const Frame& frame, const std::filesystem::path& path);
Frame load_emif(const std::filesystem::path& path);  // DataError on malformed input

// Inspection exports in portable formats: a single plane as binary PGM (P5),
// or the BT.601-decoded composite as binary PPM (P6).
void save_plane_pgm(const std::vector<std::uint8_t>& plane, int width, int height,
                    const std::filesystem::path& path);
void save_composite_ppm(const Frame& frame, const std::filesystem::path& path);

}  // namespace emigrade
