#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "emigrade/layers.hpp"
#include "emigrade/network.hpp"
#include "emigrade/optim.hpp"
#include "emigrade/rng.hpp"
#include "emigrade/tensor.hpp"
#include "test_support.hpp"

using namespace emigrade;
using test_support::max_grad_rel_error;

namespace {

Tensor<double> random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.normal() * scale;
  return t;
}

// Fixed random projection turning a tensor-valued op into a scalar function,
// so its gradient can be finite-differenced.
double project(const Tensor<double>& t, const Tensor<double>& direction) {
  REQUIRE(t.size() == direction.size());
  return (t.array() * direction.array()).sum();
}

}  // namespace

TEST_CASE("tensor basics") {
  Tensor<double> t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK(t.array().abs().sum() == 0.0);  // zero-initialised

  Tensor<double> lit({2, 2}, {1, 2, 3, 4});
  CHECK(lit.at(0, 1) == 2.0);
  CHECK(lit.at(1, 0) == 3.0);  // row-major
  CHECK_THROWS_AS(Tensor<double>({2, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor<double>({0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(lit.reshaped({5}), std::invalid_argument);
  CHECK(exact_equal(lit.reshaped({4}).reshaped({2, 2}), lit));
}

TEST_CASE("conv2d forward: shape, zero input, hand-computed window sums") {
  Rng rng(1);

  SUBCASE("227 input with k=11 stride=4 gives 55x55 maps") {
    LayerSpec spec = LayerSpec::conv(11, 4, 0, 32);
    auto state = LayerState<double>::for_conv(spec, 1);
    he_init(state, rng);
    Tensor<double> input({1, 227, 227});
    Tensor<double> out = conv2d_forward(input, state, spec);
    CHECK(out.shape() == Shape{32, 55, 55});
  }

  SUBCASE("zero input leaves only the bias") {
    LayerSpec spec = LayerSpec::conv(2, 1, 0, 3);
    auto state = LayerState<double>::for_conv(spec, 1);
    he_init(state, rng);
    state.biases.array().setConstant(0.7);
    Tensor<double> out = conv2d_forward(Tensor<double>({1, 5, 5}), state, spec);
    CHECK(out.shape() == Shape{3, 4, 4});
    for (std::int64_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.7));
  }

  SUBCASE("3x3 ramp through a diagonal 2x2 filter") {
    LayerSpec spec = LayerSpec::conv(2, 1, 0, 1);
    auto state = LayerState<double>::for_conv(spec, 1);
    state.weights = Tensor<double>({1, 1, 2, 2}, {1, 0, 0, 1});
    Tensor<double> input({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Tensor<double> expected({1, 2, 2}, {6, 8, 12, 14});
    CHECK(exact_equal(conv2d_forward(input, state, spec), expected));
  }

  SUBCASE("channel mismatch is rejected") {
    LayerSpec spec = LayerSpec::conv(3, 1, 0, 4);
    auto state = LayerState<double>::for_conv(spec, 2);
    CHECK_THROWS_AS(conv2d_forward(Tensor<double>({1, 8, 8}), state, spec),
                    std::invalid_argument);
  }

  SUBCASE("window larger than the padded input is rejected") {
    LayerSpec spec = LayerSpec::conv(9, 1, 0, 1);
    auto state = LayerState<double>::for_conv(spec, 1);
    CHECK_THROWS_AS(conv2d_forward(Tensor<double>({1, 4, 4}), state, spec),
                    std::invalid_argument);
  }
}

TEST_CASE("conv2d backward: trivial cases and finite differences") {
  Rng rng(2);
  LayerSpec small = LayerSpec::conv(2, 1, 0, 1);

  SUBCASE("zero upstream gradient zeroes every gradient") {
    auto state = LayerState<double>::for_conv(small, 1);
    he_init(state, rng);
    ConvCache<double> cache;
    Tensor<double> input = random_tensor({1, 3, 3}, rng);
    conv2d_forward(input, state, small, &cache);
    auto grads = conv2d_backward(Tensor<double>({1, 2, 2}), cache, state, small);
    CHECK(grads.input.array().abs().maxCoeff() == 0.0);
    CHECK(grads.weights.array().abs().maxCoeff() == 0.0);
    CHECK(grads.biases.array().abs().maxCoeff() == 0.0);
  }

  SUBCASE("bias gradient sums the upstream gradient over positions") {
    auto state = LayerState<double>::for_conv(small, 1);
    he_init(state, rng);
    ConvCache<double> cache;
    conv2d_forward(random_tensor({1, 3, 3}, rng), state, small, &cache);
    auto grads =
        conv2d_backward(Tensor<double>::constant({1, 2, 2}, 1.0), cache, state, small);
    CHECK(grads.biases.size() == 1);
    CHECK(grads.biases[0] == doctest::Approx(4.0));
  }

  SUBCASE("gradients match central finite differences (strided, padded)") {
    LayerSpec spec = LayerSpec::conv(3, 2, 1, 2);
    auto state = LayerState<double>::for_conv(spec, 2);
    he_init(state, rng);
    Tensor<double> input = random_tensor({2, 6, 6}, rng);

    ConvCache<double> cache;
    Tensor<double> out = conv2d_forward(input, state, spec, &cache);
    Tensor<double> direction = random_tensor(out.shape(), rng);
    auto grads = conv2d_backward(direction, cache, state, spec);

    auto loss = [&] { return project(conv2d_forward(input, state, spec), direction); };
    CHECK(max_grad_rel_error(input, grads.input, loss) < 1e-4);
    CHECK(max_grad_rel_error(state.weights, grads.weights, loss) < 1e-4);
    CHECK(max_grad_rel_error(state.biases, grads.biases, loss) < 1e-4);
  }

  SUBCASE("mismatched upstream shape is rejected") {
    auto state = LayerState<double>::for_conv(small, 1);
    ConvCache<double> cache;
    conv2d_forward(Tensor<double>({1, 3, 3}), state, small, &cache);
    CHECK_THROWS_AS(conv2d_backward(Tensor<double>({1, 3, 3}), cache, state, small),
                    std::invalid_argument);
  }
}

TEST_CASE("maxpool: shapes, hand cases, argmax routing") {
  Rng rng(3);

  SUBCASE("55x55 pools to 27x27 with k=3 s=2") {
    Tensor<double> input = random_tensor({32, 55, 55}, rng);
    CHECK(maxpool_forward(input, LayerSpec::pool(3, 2)).shape() == Shape{32, 27, 27});
  }

  SUBCASE("constant input pools to the same constant") {
    Tensor<double> input = Tensor<double>::constant({2, 5, 5}, 3.25);
    Tensor<double> out = maxpool_forward(input, LayerSpec::pool(3, 2));
    for (std::int64_t i = 0; i < out.size(); ++i) CHECK(out[i] == 3.25);
  }

  SUBCASE("4x4 ramp, k=2 s=2, picks each window max") {
    Tensor<double> input({1, 4, 4},
                         {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
    Tensor<double> expected({1, 2, 2}, {6, 8, 14, 16});
    PoolCache cache;
    CHECK(exact_equal(maxpool_forward(input, LayerSpec::pool(2, 2), &cache), expected));

    SUBCASE("backward routes ones onto the argmax positions") {
      Tensor<double> grad =
          maxpool_backward(Tensor<double>::constant({1, 2, 2}, 1.0), cache);
      Tensor<double> routed({1, 4, 4},
                            {0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1});
      CHECK(exact_equal(grad, routed));
    }
    SUBCASE("zero upstream gradient gives zero input gradient") {
      Tensor<double> grad = maxpool_backward(Tensor<double>({1, 2, 2}), cache);
      CHECK(grad.array().abs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("ties route to the first position in row-major order") {
    Tensor<double> input = Tensor<double>::constant({1, 2, 2}, 1.0);
    PoolCache cache;
    maxpool_forward(input, LayerSpec::pool(2, 2), &cache);
    Tensor<double> grad = maxpool_backward(Tensor<double>::constant({1, 1, 1}, 1.0), cache);
    Tensor<double> expected({1, 2, 2}, {1, 0, 0, 0});
    CHECK(exact_equal(grad, expected));
  }

  SUBCASE("overlapping windows match finite differences") {
    LayerSpec spec = LayerSpec::pool(3, 2);
    Tensor<double> input = random_tensor({2, 7, 7}, rng);
    PoolCache cache;
    Tensor<double> out = maxpool_forward(input, spec, &cache);
    Tensor<double> direction = random_tensor(out.shape(), rng);
    Tensor<double> analytic = maxpool_backward(direction, cache);
    auto loss = [&] { return project(maxpool_forward(input, spec), direction); };
    CHECK(max_grad_rel_error(input, analytic, loss) < 1e-4);
  }

  SUBCASE("window with no valid position is rejected") {
    CHECK_THROWS_AS(maxpool_forward(Tensor<double>({1, 2, 2}), LayerSpec::pool(3, 2)),
                    std::invalid_argument);
  }
}

TEST_CASE("relu and its gate") {
  Tensor<double> input({3}, {-1.0, 0.0, 2.5});
  Tensor<double> expected({3}, {0.0, 0.0, 2.5});
  CHECK(exact_equal(relu(input), expected));

  Tensor<double> negative = Tensor<double>::constant({2, 3}, -4.0);
  CHECK(relu(negative).array().abs().maxCoeff() == 0.0);

  Tensor<double> fwd({2}, {-1.0, 3.0});
  Tensor<double> upstream({2}, {5.0, 5.0});
  Tensor<double> gated({2}, {0.0, 5.0});
  CHECK(exact_equal(relu_backward(upstream, fwd), gated));

  // The derivative at exactly zero is defined as zero.
  Tensor<double> at_zero({1}, {0.0});
  Tensor<double> one({1}, {1.0});
  CHECK(relu_backward(one, at_zero)[0] == 0.0);

  Rng rng(4);
  Tensor<double> x = random_tensor({1, 5, 5}, rng);
  Tensor<double> direction = random_tensor({1, 5, 5}, rng);
  Tensor<double> analytic = relu_backward(direction, x);
  auto loss = [&] { return project(relu(x), direction); };
  CHECK(max_grad_rel_error(x, analytic, loss) < 1e-4);
}

TEST_CASE("flatten round-trips shape") {
  Rng rng(5);
  Tensor<double> input = random_tensor({3, 4, 5}, rng);
  FlattenCache cache;
  Tensor<double> flat = flatten_forward(input, &cache);
  CHECK(flat.shape() == Shape{60});
  CHECK(exact_equal(flat.reshaped({3, 4, 5}), input));
  Tensor<double> back = flatten_backward(flat, cache);
  CHECK(exact_equal(back, input));
}

TEST_CASE("dense: shapes, hand case, gradients") {
  Rng rng(6);

  SUBCASE("4608 units map to 512") {
    LayerSpec spec = LayerSpec::dense(512);
    auto state = LayerState<double>::for_dense(spec, 4608);
    he_init(state, rng);
    Tensor<double> out = dense_forward(random_tensor({4608}, rng), state, spec);
    CHECK(out.shape() == Shape{512});
  }

  SUBCASE("identity weights pass the input through") {
    LayerSpec spec = LayerSpec::dense(3);
    auto state = LayerState<double>::for_dense(spec, 3);
    for (int i = 0; i < 3; ++i) state.weights.at(i, i) = 1.0;
    Tensor<double> x({3}, {1.5, -2.0, 0.25});
    CHECK(exact_equal(dense_forward(x, state, spec), x));
  }

  SUBCASE("2x2 hand computation") {
    LayerSpec spec = LayerSpec::dense(2);
    auto state = LayerState<double>::for_dense(spec, 2);
    state.weights = Tensor<double>({2, 2}, {1, 2, 3, 4});
    state.biases = Tensor<double>({2}, {0.5, -0.5});
    Tensor<double> x({2}, {1, 1});
    Tensor<double> expected({2}, {3.5, 6.5});
    CHECK(exact_equal(dense_forward(x, state, spec), expected));
  }

  SUBCASE("gradients match finite differences") {
    LayerSpec spec = LayerSpec::dense(4);
    auto state = LayerState<double>::for_dense(spec, 7);
    he_init(state, rng);
    Tensor<double> x = random_tensor({7}, rng);
    DenseCache<double> cache;
    Tensor<double> out = dense_forward(x, state, spec, &cache);
    Tensor<double> direction = random_tensor(out.shape(), rng);
    auto grads = dense_backward(direction, cache, state);
    auto loss = [&] { return project(dense_forward(x, state, spec), direction); };
    CHECK(max_grad_rel_error(x, grads.input, loss) < 1e-4);
    CHECK(max_grad_rel_error(state.weights, grads.weights, loss) < 1e-4);
    CHECK(max_grad_rel_error(state.biases, grads.biases, loss) < 1e-4);
  }

  SUBCASE("length mismatch is rejected") {
    LayerSpec spec = LayerSpec::dense(2);
    auto state = LayerState<double>::for_dense(spec, 3);
    CHECK_THROWS_AS(dense_forward(Tensor<double>({4}), state, spec), std::invalid_argument);
  }
}

TEST_CASE("softmax cross-entropy: frozen values, stability, gradient") {
  SUBCASE("uniform logits give 0.2 each and loss ln 5") {
    auto r = softmax_cross_entropy(Tensor<double>::constant({5}, 1.25), 2);
    for (int i = 0; i < 5; ++i) CHECK(r.probs[i] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.loss == doctest::Approx(1.6094379124341003).epsilon(1e-12));
  }

  SUBCASE("huge logit gap stays finite with near-zero loss") {
    Tensor<double> logits({5}, {1000.0, 0.0, 0.0, 0.0, 0.0});
    auto r = softmax_cross_entropy(logits, 0);
    CHECK(std::isfinite(r.loss));
    CHECK(r.loss >= 0.0);
    CHECK(r.loss < 1e-6);
    CHECK(r.probs.all_finite());
  }

  SUBCASE("two-logit hand case") {
    Tensor<double> logits({2}, {1.0, 2.0});
    auto r = softmax_cross_entropy(logits, 1);
    CHECK(r.probs[0] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    CHECK(r.probs[1] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
    CHECK(r.loss == doctest::Approx(0.3132616875182228).epsilon(1e-12));
    CHECK(r.grad_logits[0] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    CHECK(r.grad_logits[1] == doctest::Approx(-0.2689414213699951).epsilon(1e-12));
  }

  SUBCASE("probabilities sum to one up to magnitude 1e4 logits") {
    Rng rng(7);
    for (double magnitude : {1.0, 100.0, 1e4}) {
      Tensor<double> logits({5});
      for (int i = 0; i < 5; ++i) logits[i] = rng.uniform(-magnitude, magnitude);
      Tensor<double> p = softmax(logits);
      CHECK(std::abs(p.array().sum() - 1.0) < 1e-6);
      CHECK(p.all_finite());
    }
  }

  SUBCASE("label out of range and too-few classes are rejected") {
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor<double>({5}), 5), std::invalid_argument);
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor<double>({5}), -1), std::invalid_argument);
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor<double>({1}), 0), std::invalid_argument);
  }

  SUBCASE("grad_logits matches finite differences of the loss") {
    Rng rng(8);
    Tensor<double> logits({5});
    for (int i = 0; i < 5; ++i) logits[i] = rng.normal() * 2.0;
    auto r = softmax_cross_entropy(logits, 3);
    auto loss = [&] { return static_cast<double>(softmax_cross_entropy(logits, 3).loss); };
    CHECK(max_grad_rel_error(logits, r.grad_logits, loss) < 1e-4);
  }
}

TEST_CASE("adam: zero-grad no-op and frozen first steps") {
  TrainConfig cfg;  // lr 1e-3, defaults

  SUBCASE("zero gradient leaves parameters unchanged") {
    LayerSpec spec = LayerSpec::dense(2);
    auto state = LayerState<double>::for_dense(spec, 3);
    Rng rng(9);
    he_init(state, rng);
    Tensor<double> before = state.weights;
    ParamGrads<double> grads{Tensor<double>(state.weights.shape()),
                             Tensor<double>(state.biases.shape())};
    adam_step(state, grads, cfg);
    CHECK(exact_equal(state.weights, before));
    CHECK(state.step_count == 1);
  }

  SUBCASE("scalar weight, g = 0.5: first two updates have magnitude ~ lr") {
    LayerSpec spec = LayerSpec::dense(1);
    auto state = LayerState<double>::for_dense(spec, 1);
    state.weights[0] = 1.0;
    ParamGrads<double> grads{Tensor<double>({1, 1}, {0.5}), Tensor<double>({1})};

    adam_step(state, grads, cfg);
    // m-hat/sqrt(v-hat) = 1 exactly on step 1, so the update is lr/(1 + eps').
    CHECK(state.weights[0] == doctest::Approx(0.99900000002).epsilon(1e-10));
    CHECK(state.step_count == 1);

    adam_step(state, grads, cfg);
    CHECK(state.weights[0] == doctest::Approx(0.99800000004).epsilon(1e-10));
    CHECK(state.step_count == 2);

    // Both updates point the same way with magnitude ~ lr.
    const double second_update = 0.99900000002 - state.weights[0];
    CHECK(second_update == doctest::Approx(1e-3).epsilon(1e-6));
  }

  SUBCASE("gradient shape mismatch is rejected") {
    LayerSpec spec = LayerSpec::dense(2);
    auto state = LayerState<double>::for_dense(spec, 3);
    ParamGrads<double> grads{Tensor<double>({2, 2}), Tensor<double>({2})};
    CHECK_THROWS_AS(adam_step(state, grads, cfg), std::invalid_argument);
  }
}

TEST_CASE("l2 penalty and its gradient") {
  LayerSpec spec = LayerSpec::dense(1);
  auto state = LayerState<double>::for_dense(spec, 1);
  state.weights[0] = 3.0;
  std::vector<LayerState<double>> states;
  states.push_back(state);

  SUBCASE("lambda 0 is a no-op") {
    CHECK(l2_penalty(states, 0.0) == 0.0);
    Tensor<double> grad({1, 1}, {0.25});
    add_l2_gradient(states[0], 0.0, grad);
    CHECK(grad[0] == 0.25);
  }

  SUBCASE("single weight w=3, lambda=0.01") {
    CHECK(l2_penalty(states, 0.01) == doctest::Approx(0.09).epsilon(1e-12));
    Tensor<double> grad({1, 1});
    add_l2_gradient(states[0], 0.01, grad);
    CHECK(grad[0] == doctest::Approx(0.06).epsilon(1e-12));
  }

  SUBCASE("biases are excluded from the penalty") {
    states[0].biases[0] = 100.0;
    CHECK(l2_penalty(states, 0.01) == doctest::Approx(0.09).epsilon(1e-12));
  }

  SUBCASE("full-model penalty gradient matches finite differences") {
    Rng rng(10);
    std::vector<LayerState<double>> model;
    model.push_back(LayerState<double>::for_conv(LayerSpec::conv(3, 1, 1, 2), 1));
    model.push_back(LayerState<double>::for_dense(LayerSpec::dense(3), 8));
    for (auto& s : model) he_init(s, rng);

    const double lambda = 0.01;
    for (auto& s : model) {
      Tensor<double> analytic(s.weights.shape());
      add_l2_gradient(s, lambda, analytic);
      auto loss = [&] { return l2_penalty(model, lambda); };
      CHECK(max_grad_rel_error(s.weights, analytic, loss) < 1e-6);
    }
  }
}

TEST_CASE("network gradients: reduced-input analogue of the smallest model") {
  const ModelSpec spec = test_support::reduced_input_analogue();
  Network<double> net = Network<double>::he_initialized(spec, 42);

  Rng rng(11);
  Tensor<double> input({1, 32, 32});
  for (std::int64_t i = 0; i < input.size(); ++i) input[i] = rng.uniform();
  const int label = 2;

  auto forward_loss = [&] {
    return static_cast<double>(
        softmax_cross_entropy(net.logits(input), label).loss);
  };

  auto f = net.forward_train(input);
  auto xent = softmax_cross_entropy(f.logits, label);
  auto back = net.backward(f, xent.grad_logits);

  auto& states = net.states();
  REQUIRE(states.size() == 4);
  for (std::size_t s = 0; s < states.size(); ++s) {
    CHECK(max_grad_rel_error(states[s].weights, back.params[s].weights, forward_loss) < 1e-4);
    CHECK(max_grad_rel_error(states[s].biases, back.params[s].biases, forward_loss) < 1e-4);
  }
  CHECK(max_grad_rel_error(input, back.input, forward_loss) < 1e-4);
}

TEST_CASE("determinism: same seed reproduces parameters bit-exactly") {
  const ModelSpec spec = test_support::reduced_input_analogue();

  auto run = [&] {
    Network<float> net = Network<float>::he_initialized(spec, 99);
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    Rng data_rng(derive_stream(99, {kStreamFrame}));
    for (int step = 0; step < 5; ++step) {
      Tensor<float> x({1, 32, 32});
      for (std::int64_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<float>(data_rng.uniform());
      auto f = net.forward_train(x);
      auto xent = softmax_cross_entropy(f.logits, step % 5);
      auto back = net.backward(f, xent.grad_logits);
      auto& states = net.states();
      for (std::size_t s = 0; s < states.size(); ++s) {
        adam_step(states[s], {back.params[s].weights, back.params[s].biases}, cfg);
      }
    }
    return net;
  };

  Network<float> a = run();
  Network<float> b = run();
  for (std::size_t s = 0; s < a.states().size(); ++s) {
    CHECK(exact_equal(a.states()[s].weights, b.states()[s].weights));
    CHECK(exact_equal(a.states()[s].biases, b.states()[s].biases));
  }
}

TEST_CASE("loss decrease: separable two-class set drops cross-entropy by 90%") {
  // Two tight clusters at +/- mu in 4 dimensions: linearly separable.
  Rng rng(12);
  std::vector<Tensor<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 16; ++i) {
    const int label = i % 2;
    const double mu = label == 0 ? 2.0 : -2.0;
    Tensor<double> x({4});
    for (int d = 0; d < 4; ++d) x[d] = mu + rng.normal() * 0.1;
    xs.push_back(x);
    ys.push_back(label);
  }

  LayerSpec spec = LayerSpec::dense(2);
  auto state = LayerState<double>::for_dense(spec, 4);
  he_init(state, rng);

  TrainConfig cfg;
  cfg.learning_rate = 0.05;

  auto epoch_loss = [&](bool update) {
    double total = 0.0;
    ParamGrads<double> acc{Tensor<double>(state.weights.shape()),
                           Tensor<double>(state.biases.shape())};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      DenseCache<double> cache;
      Tensor<double> logits = dense_forward(xs[i], state, spec, &cache);
      auto xent = softmax_cross_entropy(logits, ys[i]);
      total += xent.loss;
      if (update) {
        auto grads = dense_backward(xent.grad_logits, cache, state);
        acc.weights.array() += grads.weights.array() / static_cast<double>(xs.size());
        acc.biases.array() += grads.biases.array() / static_cast<double>(xs.size());
      }
    }
    if (update) adam_step(state, acc, cfg);
    return total / static_cast<double>(xs.size());
  };

  const double initial = epoch_loss(false);
  for (int step = 0; step < 100; ++step) epoch_loss(true);
  const double final_loss = epoch_loss(false);
  CHECK(final_loss < 0.1 * initial);
  CHECK(state.weights.all_finite());
}
