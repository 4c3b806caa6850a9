#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "emigrade/model_zoo.hpp"
#include "emigrade/network.hpp"
#include "emigrade/rng.hpp"

using namespace emigrade;

namespace {

// Shape after each layer, with consecutive duplicates removed: activations
// and the final softmax leave shapes unchanged, so what remains is exactly
// the printed row sequence of the architecture table.
std::vector<Shape> distinct_shape_walk(const ModelSpec& spec) {
  std::vector<Shape> all = walk_shapes(spec.layers, spec.input_shape);
  std::vector<Shape> distinct;
  for (const Shape& s : all) {
    if (distinct.empty() || distinct.back() != s) distinct.push_back(s);
  }
  return distinct;
}

int flatten_width(const ModelSpec& spec) {
  std::vector<Shape> shapes = walk_shapes(spec.layers, spec.input_shape);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == LayerKind::flatten) return shapes[i][0];
  }
  return -1;
}

}  // namespace

TEST_CASE("parameter totals are integer-exact") {
  CHECK(param_count(build_model(2)) == 2504741);
  CHECK(param_count(build_model(3)) == 557661);
  // A total of 137,777 is sometimes quoted for the smallest model, but no
  // integer kernel configuration consistent with its layer shapes can reach
  // that figure; direct summation gives 139,777 (see README).
  CHECK(param_count(build_model(4)) == 139777);
  CHECK(param_count(build_model(1)) == 58278597);
}

TEST_CASE("unknown model ids are rejected") {
  CHECK_THROWS_AS(build_model(0), std::invalid_argument);
  CHECK_THROWS_AS(build_model(5), std::invalid_argument);
  CHECK_THROWS_AS(build_model(-1), std::invalid_argument);
}

TEST_CASE("model 3 reproduces the printed shape sequence") {
  const std::vector<Shape> expected = {
      {32, 55, 55}, {32, 27, 27}, {64, 27, 27}, {64, 13, 13},
      {128, 13, 13}, {128, 6, 6}, {4608}, {100}, {5},
  };
  CHECK(distinct_shape_walk(build_model(3)) == expected);
}

TEST_CASE("model 4 flattens 13x13x16 to 2704") {
  CHECK(flatten_width(build_model(4)) == 2704);
  // Both convs keep 16 filters and conv2 preserves spatial size, so the
  // distinct shape sequence collapses the conv2 row into the pool1 row.
  const std::vector<Shape> expected = {
      {16, 55, 55}, {16, 27, 27}, {16, 13, 13}, {2704}, {50}, {5},
  };
  CHECK(distinct_shape_walk(build_model(4)) == expected);
}

TEST_CASE("model 2 hidden FC width is 512") {
  const ModelSpec spec = build_model(2);
  int last_hidden = -1;
  for (std::size_t i = 0; i + 1 < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == LayerKind::dense) {
      if (spec.layers[i].out_units() != kNumClasses) last_hidden = spec.layers[i].out_units();
    }
  }
  CHECK(last_hidden == 512);
  CHECK(flatten_width(spec) == 4608);
}

TEST_CASE("every model ends in dense(5) + softmax and walks to shape {5}") {
  for (int id = 1; id <= 4; ++id) {
    const ModelSpec spec = build_model(id);
    CHECK(spec.model_id == id);
    CHECK(spec.input_shape == Shape{1, 227, 227});
    REQUIRE(spec.layers.size() >= 2);
    CHECK(spec.layers.back().kind == LayerKind::softmax);
    const LayerSpec& head = spec.layers[spec.layers.size() - 2];
    CHECK(head.kind == LayerKind::dense);
    CHECK(head.out_units() == 5);
    CHECK(walk_shapes(spec.layers, spec.input_shape).back() == Shape{5});
  }
}

TEST_CASE("first conv is k=11 s=4, later convs k=3 s=1 p=1, pools k=3 s=2") {
  for (int id = 2; id <= 4; ++id) {
    const ModelSpec spec = build_model(id);
    bool first_conv = true;
    for (const LayerSpec& layer : spec.layers) {
      if (layer.kind == LayerKind::conv2d) {
        if (first_conv) {
          CHECK(layer.kernel_size == 11);
          CHECK(layer.stride == 4);
          CHECK(layer.padding == 0);
          first_conv = false;
        } else {
          CHECK(layer.kernel_size == 3);
          CHECK(layer.stride == 1);
          CHECK(layer.padding == 1);
        }
      } else if (layer.kind == LayerKind::maxpool) {
        CHECK(layer.kernel_size == 3);
        CHECK(layer.stride == 2);
      }
    }
  }
}

TEST_CASE("forward pass of every model yields a 5-class distribution") {
  Rng data_rng(21);
  Tensor<float> input({1, 227, 227});
  for (std::int64_t i = 0; i < input.size(); ++i)
    input[i] = static_cast<float>(data_rng.uniform());

  for (int id = 1; id <= 4; ++id) {
    CAPTURE(id);
    Network<float> net = Network<float>::he_initialized(build_model(id), 7);
    Tensor<float> probs = net.probabilities(input);
    REQUIRE(probs.shape() == Shape{5});
    CHECK(probs.all_finite());
    CHECK(std::abs(static_cast<double>(probs.array().sum()) - 1.0) < 1e-6);
    for (int k = 0; k < 5; ++k) CHECK(probs[k] >= 0.0f);
  }
}
