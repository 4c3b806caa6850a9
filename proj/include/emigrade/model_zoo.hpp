#pragma once

#include <cstdint>
#include <vector>

#include "emigrade/layers.hpp"

namespace emigrade {

inline constexpr int kInputSize = 227;  // network input is 1 x 227 x 227
inline constexpr int kNumClasses = 5;

// Training-only stochastic mask applied after layers[layer_index]. Only the
// AlexNet-style model 1 uses these; inference always bypasses them.
struct DropoutSlot {
  int layer_index;
  double rate;
};

// One of the four candidate classifier architectures. The layer chain always
// ends with dense(5) followed by softmax.
struct ModelSpec {
  int model_id = 0;
  Shape input_shape{1, kInputSize, kInputSize};
  int num_classes = kNumClasses;
  std::vector<LayerSpec> layers;
  std::vector<DropoutSlot> train_dropout;
};

// Returns the architecture for model_id in 1..4:
//   1  AlexNet with a single-channel input and a 5-way head
//   2  3 conv blocks (32/96/128 filters), fc 512
//   3  3 conv blocks (32/64/128 filters), fc 100
//   4  2 conv blocks (16/16 filters), fc 50
// The first conv is always 11x11 stride 4; later 3x3 convs use stride 1,
// padding 1; all pools are 3x3 stride 2.
ModelSpec build_model(int model_id);

// Trainable parameter total: sum of out*(in*k*k + 1) over conv layers and
// out*(in + 1) over dense layers.
std::int64_t param_count(const ModelSpec& spec);

// Output shape after every layer, starting from spec.input_shape.
std::vector<Shape> shape_walk(const ModelSpec& spec);

}  // namespace emigrade
