#pragma once

#include <cstdint>
#include <vector>

#include "emigrade/frame.hpp"
#include "emigrade/model_zoo.hpp"
#include "emigrade/rng.hpp"
#include "emigrade/tensor.hpp"

namespace emigrade {

// A 2-d grid of 8-bit samples, row-major.
struct PixelGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
};

// The luma plane of a frame; chroma is discarded.
PixelGrid to_luma(const Frame& frame);

// Nearest-neighbour resampling with pixel-centre alignment:
//   out(r, c) = in(floor((r + 0.5) * H / out_h), floor((c + 0.5) * W / out_w))
// Output values are always a subset of input values. Throws on zero targets.
PixelGrid resize_nearest(const PixelGrid& in, int out_h, int out_w);

// value / 255 exactly, as a [1, H, W] float tensor in [0, 1].
Tensor<float> rescale(const PixelGrid& grid);

// One network-ready training/eval sample.
struct Sample {
  Tensor<float> tensor;  // [1, 227, 227], values in [0, 1]
  int label = 0;         // noise level 1..5
};

// Full pipeline: luma -> nearest-neighbour resize to 227x227 -> rescale.
Sample make_sample(const Frame& frame, int label);

Tensor<float> flip_horizontal(const Tensor<float>& t);  // reverses columns
Tensor<float> flip_vertical(const Tensor<float>& t);    // reverses rows

// Training-time augmentation: independently with probability 0.5 each, flips
// the sample horizontally and/or vertically (horizontal draw first). The
// label never changes.
Sample augment_flip(const Sample& sample, Rng& rng);

}  // namespace emigrade
