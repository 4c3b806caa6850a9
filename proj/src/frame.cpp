#include "emigrade/frame.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "emigrade/errors.hpp"

namespace emigrade {

namespace {

std::uint8_t clip_u8(double v) {
  double r = std::round(v);
  if (r < 0) return 0;
  if (r > 255) return 255;
  return static_cast<std::uint8_t>(r);
}

void write_u32_le(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), b.size());
}

std::uint32_t read_u32_le(std::istream& is) {
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

Frame Frame::blank(int width, int height, RangeTag range) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("frame dimensions must be positive");
  Frame f;
  f.width = width;
  f.height = height;
  f.range = range;
  f.y.assign(f.plane_size(), 0);
  f.cb.assign(f.plane_size(), 0);
  f.cr.assign(f.plane_size(), 0);
  return f;
}

Ycbcr ycbcr_from_rgb(double r, double g, double b, RangeTag range) {
  const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
  const double pb = (b - luma) / 1.772;
  const double pr = (r - luma) / 1.402;
  if (range == RangeTag::studio)
    return {clip_u8(16.0 + 219.0 * luma), clip_u8(128.0 + 224.0 * pb),
            clip_u8(128.0 + 224.0 * pr)};
  return {clip_u8(255.0 * luma), clip_u8(128.0 + 255.0 * pb), clip_u8(128.0 + 255.0 * pr)};
}

Frame render_colour_bars(int width, int height, RangeTag range) {
  Frame frame = Frame::blank(width, height, range);

  // 75%-amplitude bars; headroom keeps additive interference from clipping
  // immediately in the bright bars.
  static constexpr std::array<std::array<int, 3>, 8> kBarRgb{{
      {1, 1, 1},  // white
      {1, 1, 0},  // yellow
      {0, 1, 1},  // cyan
      {0, 1, 0},  // green
      {1, 0, 1},  // magenta
      {1, 0, 0},  // red
      {0, 0, 1},  // blue
      {0, 0, 0},  // black
  }};
  std::array<Ycbcr, 8> bars{};
  for (std::size_t i = 0; i < bars.size(); ++i)
    bars[i] = ycbcr_from_rgb(0.75 * kBarRgb[i][0], 0.75 * kBarRgb[i][1], 0.75 * kBarRgb[i][2],
                             range);

  const int bar_width = width / 8;
  for (int c = 0; c < width; ++c) {
    const int bar = bar_width > 0 ? std::min(c / bar_width, 7) : 7;
    const Ycbcr v = bars[static_cast<std::size_t>(bar)];
    for (int r = 0; r < height; ++r) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      frame.y[i] = v.y;
      frame.cb[i] = v.cb;
      frame.cr[i] = v.cr;
    }
  }
  return frame;
}

void save_emif(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os.write("EMIF", 4);
  os.put(static_cast<char>(1));
  write_u32_le(os, static_cast<std::uint32_t>(frame.width));
  write_u32_le(os, static_cast<std::uint32_t>(frame.height));
  os.put(static_cast<char>(frame.range));
  for (const auto* plane : {&frame.y, &frame.cb, &frame.cr})
    os.write(reinterpret_cast<const char*>(plane->data()),
             static_cast<std::streamsize>(plane->size()));
  if (!os) throw DataError("write failed for " + path.string());
}

Frame load_emif(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());

  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || std::memcmp(magic.data(), "EMIF", 4) != 0)
    throw DataError(path.string() + ": not an EMIF file");
  const int version = is.get();
  if (version != 1)
    throw DataError(path.string() + ": unsupported EMIF version " + std::to_string(version));

  const std::uint32_t width = read_u32_le(is);
  const std::uint32_t height = read_u32_le(is);
  const int range_byte = is.get();
  if (!is || width == 0 || height == 0)
    throw DataError(path.string() + ": bad EMIF dimensions");
  if (range_byte != 0 && range_byte != 1)
    throw DataError(path.string() + ": bad EMIF range tag");
  // Guard against absurd headers before allocating.
  const std::uintmax_t expected =
      14 + 3ull * width * height;
  std::error_code ec;
  const std::uintmax_t actual = std::filesystem::file_size(path, ec);
  if (ec || actual != expected)
    throw DataError(path.string() + ": truncated EMIF file (expected " +
                    std::to_string(expected) + " bytes, have " + std::to_string(actual) + ")");

  Frame frame = Frame::blank(static_cast<int>(width), static_cast<int>(height),
                             static_cast<RangeTag>(range_byte));
  for (auto* plane : {&frame.y, &frame.cb, &frame.cr}) {
    is.read(reinterpret_cast<char*>(plane->data()), static_cast<std::streamsize>(plane->size()));
    if (!is) throw DataError(path.string() + ": truncated EMIF plane data");
  }
  return frame;
}

void save_plane_pgm(const std::vector<std::uint8_t>& plane, int width, int height,
                    const std::filesystem::path& path) {
  if (plane.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("plane size does not match dimensions");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << "P5\n" << width << " " << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(plane.data()), static_cast<std::streamsize>(plane.size()));
  if (!os) throw DataError("write failed for " + path.string());
}

void save_composite_ppm(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << "P6\n" << frame.width << " " << frame.height << "\n255\n";
  const bool studio = frame.range == RangeTag::studio;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(frame.width) * 3);
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * frame.width + c;
      const double luma = studio ? (frame.y[i] - 16.0) / 219.0 : frame.y[i] / 255.0;
      const double pb = studio ? (frame.cb[i] - 128.0) / 224.0 : (frame.cb[i] - 128.0) / 255.0;
      const double pr = studio ? (frame.cr[i] - 128.0) / 224.0 : (frame.cr[i] - 128.0) / 255.0;
      const double red = luma + 1.402 * pr;
      const double blue = luma + 1.772 * pb;
      const double green = (luma - 0.299 * red - 0.114 * blue) / 0.587;
      row[static_cast<std::size_t>(c) * 3 + 0] = clip_u8(255.0 * red);
      row[static_cast<std::size_t>(c) * 3 + 1] = clip_u8(255.0 * green);
      row[static_cast<std::size_t>(c) * 3 + 2] = clip_u8(255.0 * blue);
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw DataError("write failed for " + path.string());
}

}  // namespace emigrade
