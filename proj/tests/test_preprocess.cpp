#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "emigrade/frame.hpp"
#include "emigrade/noise.hpp"
#include "emigrade/preprocess.hpp"
#include "emigrade/rng.hpp"

using namespace emigrade;

namespace {

PixelGrid grid_of(int w, int h, std::vector<std::uint8_t> data) {
  PixelGrid g;
  g.width = w;
  g.height = h;
  g.data = std::move(data);
  return g;
}

std::multiset<float> value_multiset(const Tensor<float>& t) {
  std::multiset<float> values;
  for (std::int64_t i = 0; i < t.size(); ++i) values.insert(t[i]);
  return values;
}

// First seed whose Rng opens with `first` then `second` on bernoulli(0.5).
Rng rng_forcing(bool first, bool second) {
  for (std::uint64_t seed = 0;; ++seed) {
    Rng probe(seed);
    if (probe.bernoulli(0.5) == first && probe.bernoulli(0.5) == second) return Rng(seed);
  }
}

}  // namespace

TEST_CASE("resize_nearest: pixel-centre index mapping") {
  SUBCASE("2x2 upscaled to 4x4 duplicates each source pixel") {
    PixelGrid in = grid_of(2, 2, {1, 2, 3, 4});
    PixelGrid out = resize_nearest(in, 4, 4);
    const std::vector<std::uint8_t> expected = {1, 1, 2, 2, 1, 1, 2, 2,
                                                3, 3, 4, 4, 3, 3, 4, 4};
    CHECK(out.data == expected);
  }

  SUBCASE("identity resize returns the input exactly") {
    PixelGrid in = grid_of(5, 3, {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150});
    PixelGrid out = resize_nearest(in, 3, 5);
    CHECK(out.data == in.data);
  }

  SUBCASE("720x1280 maps to 227x227") {
    PixelGrid in = grid_of(1280, 720, std::vector<std::uint8_t>(1280u * 720u, 7));
    PixelGrid out = resize_nearest(in, 227, 227);
    CHECK(out.width == 227);
    CHECK(out.height == 227);
    CHECK(out.data.size() == 227u * 227u);
  }

  SUBCASE("no new sample values are invented") {
    Rng rng(41);
    std::vector<std::uint8_t> data(31u * 17u);
    for (auto& v : data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
    PixelGrid in = grid_of(17, 31, data);
    PixelGrid out = resize_nearest(in, 227, 227);
    const std::set<std::uint8_t> in_values(in.data.begin(), in.data.end());
    for (std::uint8_t v : out.data) CHECK(in_values.count(v) == 1);
  }

  SUBCASE("zero target size is rejected") {
    PixelGrid in = grid_of(2, 2, {1, 2, 3, 4});
    CHECK_THROWS_AS(resize_nearest(in, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(resize_nearest(in, 4, 0), std::invalid_argument);
  }
}

TEST_CASE("to_luma keeps Y and drops chroma") {
  SUBCASE("flat blue field becomes a constant grid of 41") {
    Frame clean = render_colour_bars(32, 8);
    NoiseParams params;
    Rng rng(derive_stream(1, {kStreamFrame, 5}));
    Frame blue = inject_noise(clean, NoiseLevel(5), params, rng);
    PixelGrid luma = to_luma(blue);
    CHECK(luma.width == 32);
    CHECK(luma.height == 8);
    for (std::uint8_t v : luma.data) CHECK(v == 41);
  }

  SUBCASE("black bar region is constant 16") {
    Frame bars = render_colour_bars(64, 4);
    PixelGrid luma = to_luma(bars);
    for (int r = 0; r < 4; ++r) {
      for (int c = 56; c < 64; ++c) CHECK(luma.at(r, c) == 16);
    }
  }

  SUBCASE("output size equals frame size") {
    Frame bars = render_colour_bars(31, 9);
    CHECK(to_luma(bars).data.size() == bars.plane_size());
  }
}

TEST_CASE("rescale divides by 255 exactly") {
  PixelGrid g = grid_of(3, 1, {0, 51, 255});
  Tensor<float> t = rescale(g);
  CHECK(t.shape() == Shape{1, 1, 3});
  CHECK(t[0] == 0.0f);
  CHECK(t[1] == 0.2f);
  CHECK(t[2] == 1.0f);

  SUBCASE("multiplying back by 255 recovers every byte exactly in float32") {
    std::vector<std::uint8_t> all(256);
    for (int v = 0; v < 256; ++v) all[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(v);
    Tensor<float> scaled = rescale(grid_of(256, 1, all));
    for (int v = 0; v < 256; ++v) {
      CHECK(scaled[v] * 255.0f == static_cast<float>(v));  // exact, not approximate
    }
  }
}

TEST_CASE("make_sample composes the full pipeline deterministically") {
  Frame bars = render_colour_bars(1280, 720);
  Sample s = make_sample(bars, 3);
  CHECK(s.label == 3);
  CHECK(s.tensor.shape() == Shape{1, 227, 227});
  for (std::int64_t i = 0; i < s.tensor.size(); ++i) {
    CHECK(s.tensor[i] >= 0.0f);
    CHECK(s.tensor[i] <= 1.0f);
  }
  Sample again = make_sample(bars, 3);
  CHECK(exact_equal(s.tensor, again.tensor));
}

TEST_CASE("flip helpers are involutions that permute values") {
  Rng rng(51);
  Tensor<float> t({1, 6, 7});
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform());

  CHECK(exact_equal(flip_horizontal(flip_horizontal(t)), t));
  CHECK(exact_equal(flip_vertical(flip_vertical(t)), t));
  CHECK(value_multiset(flip_horizontal(t)) == value_multiset(t));
  CHECK(value_multiset(flip_vertical(t)) == value_multiset(t));

  // Column reversal moves the first column to the last.
  Tensor<float> h = flip_horizontal(t);
  CHECK(h.at(0, 0, 0) == t.at(0, 0, 6));
  Tensor<float> v = flip_vertical(t);
  CHECK(v.at(0, 0, 0) == t.at(0, 5, 0));
}

TEST_CASE("augment_flip: draws, identity case, invariants") {
  Frame bars = render_colour_bars(160, 90);
  const Sample base = make_sample(bars, 2);

  SUBCASE("rng forcing no flips returns the identical sample") {
    Rng rng = rng_forcing(false, false);
    Sample out = augment_flip(base, rng);
    CHECK(out.label == base.label);
    CHECK(exact_equal(out.tensor, base.tensor));
  }

  SUBCASE("rng forcing both flips applies horizontal then vertical") {
    Rng rng = rng_forcing(true, true);
    Sample out = augment_flip(base, rng);
    CHECK(exact_equal(out.tensor, flip_vertical(flip_horizontal(base.tensor))));
  }

  SUBCASE("label and value multiset are always preserved") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      Rng rng(seed);
      Sample out = augment_flip(base, rng);
      CHECK(out.label == base.label);
      CHECK(value_multiset(out.tensor) == value_multiset(base.tensor));
    }
  }
}
