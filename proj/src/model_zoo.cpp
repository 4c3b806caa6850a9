#include "emigrade/model_zoo.hpp"

#include <stdexcept>
#include <string>

namespace emigrade {

namespace {

void append_conv_block(std::vector<LayerSpec>& layers, int kernel, int stride, int padding,
                       int filters, bool pool) {
  layers.push_back(LayerSpec::conv(kernel, stride, padding, filters));
  layers.push_back(LayerSpec::relu());
  if (pool) layers.push_back(LayerSpec::pool(3, 2));
}

ModelSpec alexnet() {
  ModelSpec spec;
  spec.model_id = 1;
  append_conv_block(spec.layers, 11, 4, 0, 96, true);
  append_conv_block(spec.layers, 5, 1, 2, 256, true);
  append_conv_block(spec.layers, 3, 1, 1, 384, false);
  append_conv_block(spec.layers, 3, 1, 1, 384, false);
  append_conv_block(spec.layers, 3, 1, 1, 256, true);
  spec.layers.push_back(LayerSpec::flatten());
  spec.layers.push_back(LayerSpec::dense(4096));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(4096));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(kNumClasses));
  spec.layers.push_back(LayerSpec::softmax());
  // Masks on the two hidden fc outputs (after their relus), training only.
  const int fc1_relu = static_cast<int>(spec.layers.size()) - 5;
  const int fc2_relu = static_cast<int>(spec.layers.size()) - 3;
  spec.train_dropout = {{fc1_relu, 0.5}, {fc2_relu, 0.5}};
  return spec;
}

ModelSpec reduced_model(int model_id, std::vector<int> conv_filters, int fc_units) {
  ModelSpec spec;
  spec.model_id = model_id;
  bool first = true;
  for (int filters : conv_filters) {
    if (first)
      append_conv_block(spec.layers, 11, 4, 0, filters, true);
    else
      append_conv_block(spec.layers, 3, 1, 1, filters, true);
    first = false;
  }
  spec.layers.push_back(LayerSpec::flatten());
  spec.layers.push_back(LayerSpec::dense(fc_units));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(kNumClasses));
  spec.layers.push_back(LayerSpec::softmax());
  return spec;
}

}  // namespace

ModelSpec build_model(int model_id) {
  switch (model_id) {
    case 1: return alexnet();
    case 2: return reduced_model(2, {32, 96, 128}, 512);
    case 3: return reduced_model(3, {32, 64, 128}, 100);
    case 4: return reduced_model(4, {16, 16}, 50);
    default:
      throw std::invalid_argument("unknown model id " + std::to_string(model_id) +
                                  " (expected 1..4)");
  }
}

std::int64_t param_count(const ModelSpec& spec) {
  std::int64_t total = 0;
  Shape cur = spec.input_shape;
  for (const LayerSpec& layer : spec.layers) {
    if (layer.kind == LayerKind::conv2d) {
      const std::int64_t per_filter =
          static_cast<std::int64_t>(cur[0]) * layer.kernel_size * layer.kernel_size + 1;
      total += layer.out_channels * per_filter;
    } else if (layer.kind == LayerKind::dense) {
      total += static_cast<std::int64_t>(layer.out_units()) * (cur[0] + 1);
    }
    cur = walk_shapes({layer}, cur).back();
  }
  return total;
}

std::vector<Shape> shape_walk(const ModelSpec& spec) {
  return walk_shapes(spec.layers, spec.input_shape);
}

}  // namespace emigrade
