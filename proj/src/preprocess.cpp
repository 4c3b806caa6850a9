#include "emigrade/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emigrade {

PixelGrid to_luma(const Frame& frame) {
  PixelGrid grid;
  grid.width = frame.width;
  grid.height = frame.height;
  grid.data = frame.y;
  return grid;
}

PixelGrid resize_nearest(const PixelGrid& in, int out_h, int out_w) {
  if (in.width <= 0 || in.height <= 0 || in.data.size() != static_cast<std::size_t>(in.width) * in.height) {
    throw std::invalid_argument("resize_nearest: malformed input grid");
  }
  if (out_h <= 0 || out_w <= 0) {
    throw std::invalid_argument("resize_nearest: output extents must be positive");
  }
  PixelGrid out;
  out.width = out_w;
  out.height = out_h;
  out.data.resize(static_cast<std::size_t>(out_w) * out_h);
  const double row_scale = static_cast<double>(in.height) / out_h;
  const double col_scale = static_cast<double>(in.width) / out_w;
  for (int r = 0; r < out_h; ++r) {
    int src_r = static_cast<int>(std::floor((r + 0.5) * row_scale));
    src_r = std::clamp(src_r, 0, in.height - 1);
    for (int c = 0; c < out_w; ++c) {
      int src_c = static_cast<int>(std::floor((c + 0.5) * col_scale));
      src_c = std::clamp(src_c, 0, in.width - 1);
      out.data[static_cast<std::size_t>(r) * out_w + c] = in.at(src_r, src_c);
    }
  }
  return out;
}

Tensor<float> rescale(const PixelGrid& grid) {
  Tensor<float> out({1, grid.height, grid.width});
  for (std::size_t i = 0; i < grid.data.size(); ++i) {
    out[static_cast<int>(i)] = static_cast<float>(grid.data[i]) / 255.0f;
  }
  return out;
}

Sample make_sample(const Frame& frame, int label) {
  Sample s;
  s.tensor = rescale(resize_nearest(to_luma(frame), kInputSize, kInputSize));
  s.label = label;
  return s;
}

Tensor<float> flip_horizontal(const Tensor<float>& t) {
  if (t.rank() != 3) throw std::invalid_argument("flip_horizontal: expected a rank-3 tensor");
  const int channels = t.dim(0), rows = t.dim(1), cols = t.dim(2);
  Tensor<float> out(t.shape());
  for (int ch = 0; ch < channels; ++ch) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        out.at(ch, r, c) = t.at(ch, r, cols - 1 - c);
      }
    }
  }
  return out;
}

Tensor<float> flip_vertical(const Tensor<float>& t) {
  if (t.rank() != 3) throw std::invalid_argument("flip_vertical: expected a rank-3 tensor");
  const int channels = t.dim(0), rows = t.dim(1), cols = t.dim(2);
  Tensor<float> out(t.shape());
  for (int ch = 0; ch < channels; ++ch) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        out.at(ch, r, c) = t.at(ch, rows - 1 - r, c);
      }
    }
  }
  return out;
}

Sample augment_flip(const Sample& sample, Rng& rng) {
  // Two draws, always in this order, so streams replay identically.
  const bool horizontal = rng.bernoulli(0.5);
  const bool vertical = rng.bernoulli(0.5);
  Sample out = sample;
  if (horizontal) out.tensor = flip_horizontal(out.tensor);
  if (vertical) out.tensor = flip_vertical(out.tensor);
  return out;
}

}  // namespace emigrade
