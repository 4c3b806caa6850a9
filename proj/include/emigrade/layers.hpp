#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "emigrade/rng.hpp"
#include "emigrade/tensor.hpp"

namespace emigrade {

enum class LayerKind { conv2d, maxpool, relu, flatten, dense, softmax };

inline const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::relu: return "relu";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
  }
  return "?";
}

// One layer of a sequential chain. kernel/stride/padding apply to conv and
// pool layers; out_channels doubles as the unit count for dense layers.
struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int kernel_size = 0;
  int stride = 1;
  int padding = 0;
  int out_channels = 0;

  int out_units() const { return out_channels; }

  static LayerSpec conv(int kernel, int stride, int padding, int filters) {
    if (kernel < 1 || stride < 1 || padding < 0 || filters < 1)
      throw std::invalid_argument("invalid conv2d hyperparameters");
    return {LayerKind::conv2d, kernel, stride, padding, filters};
  }
  static LayerSpec pool(int kernel, int stride) {
    if (kernel < 1 || stride < 1)
      throw std::invalid_argument("invalid maxpool hyperparameters");
    return {LayerKind::maxpool, kernel, stride, 0, 0};
  }
  static LayerSpec relu() { return {LayerKind::relu}; }
  static LayerSpec flatten() { return {LayerKind::flatten}; }
  static LayerSpec dense(int units) {
    if (units < 1) throw std::invalid_argument("dense layer needs >= 1 unit");
    return {LayerKind::dense, 0, 1, 0, units};
  }
  static LayerSpec softmax() { return {LayerKind::softmax}; }
};

// floor((in + 2*pad - kernel) / stride) + 1; throws when no window fits.
inline int conv_output_extent(int in, int kernel, int stride, int padding) {
  int span = in + 2 * padding - kernel;
  if (span < 0)
    throw std::invalid_argument("window of size " + std::to_string(kernel) +
                                " does not fit extent " + std::to_string(in) +
                                " with padding " + std::to_string(padding));
  return span / stride + 1;
}

// Trainable state of one conv or dense layer, including the optimiser's
// first/second moment accumulators.
template <class S>
struct LayerState {
  Tensor<S> weights;  // conv: [out_ch, in_ch, k, k]; dense: [out_units, in_units]
  Tensor<S> biases;   // [out_ch] or [out_units]
  Tensor<S> adam_m_w, adam_v_w;
  Tensor<S> adam_m_b, adam_v_b;
  std::int64_t step_count = 0;

  static LayerState for_conv(const LayerSpec& spec, int in_channels) {
    return with_shapes({spec.out_channels, in_channels, spec.kernel_size, spec.kernel_size},
                       {spec.out_channels});
  }
  static LayerState for_dense(const LayerSpec& spec, int in_units) {
    return with_shapes({spec.out_units(), in_units}, {spec.out_units()});
  }

 private:
  static LayerState with_shapes(Shape w, Shape b) {
    LayerState s;
    s.weights = Tensor<S>(w);
    s.biases = Tensor<S>(b);
    s.adam_m_w = Tensor<S>(w);
    s.adam_v_w = Tensor<S>(w);
    s.adam_m_b = Tensor<S>(b);
    s.adam_v_b = Tensor<S>(b);
    return s;
  }
};

// He initialisation: zero-mean normal with variance 2/fan_in on weights,
// zero biases. fan_in = weights.size() / out, which is in_ch*k*k for conv
// and in_units for dense.
template <class S>
void he_init(LayerState<S>& state, Rng& rng) {
  const auto out = static_cast<std::int64_t>(state.weights.dim(0));
  const double fan_in = static_cast<double>(state.weights.size() / out);
  const double sigma = std::sqrt(2.0 / fan_in);
  for (std::int64_t i = 0; i < state.weights.size(); ++i)
    state.weights[i] = static_cast<S>(rng.normal() * sigma);
  state.biases.array().setZero();
}

template <class S>
struct ParamGrads {
  Tensor<S> weights;
  Tensor<S> biases;
};

namespace detail {

template <class S>
using MatrixR = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using MatrixC = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conv2d: im2col + GEMM, cross-correlation convention (no kernel flip)
// ---------------------------------------------------------------------------

template <class S>
struct ConvCache {
  Shape in_shape;
  detail::MatrixC<S> patches;  // [in_ch*k*k, out_h*out_w]
};

template <class S>
struct ConvGrads {
  Tensor<S> input;
  Tensor<S> weights;
  Tensor<S> biases;
};

namespace detail {

// Gathers the receptive-field windows into a column-per-output-position
// matrix. Out-of-image cells (padding) stay zero.
template <class S>
MatrixC<S> im2col(const Tensor<S>& input, int kernel, int stride, int padding,
                  int out_h, int out_w) {
  const int in_ch = input.dim(0), h = input.dim(1), w = input.dim(2);
  MatrixC<S> patches(static_cast<Eigen::Index>(in_ch) * kernel * kernel,
                     static_cast<Eigen::Index>(out_h) * out_w);
  patches.setZero();
  Eigen::Index row = 0;
  for (int c = 0; c < in_ch; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx, ++row) {
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= h) continue;
          Eigen::Index col = static_cast<Eigen::Index>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kx;
            if (ix >= 0 && ix < w) patches(row, col + ox) = input.at(c, iy, ix);
          }
        }
      }
    }
  }
  return patches;
}

// Scatter-add of the patch gradients back onto the input grid.
template <class S>
Tensor<S> col2im(const MatrixC<S>& grad_patches, const Shape& in_shape, int kernel,
                 int stride, int padding, int out_h, int out_w) {
  Tensor<S> grad_input(in_shape);
  const int h = in_shape[1], w = in_shape[2];
  Eigen::Index row = 0;
  for (int c = 0; c < in_shape[0]; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx, ++row) {
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= h) continue;
          Eigen::Index col = static_cast<Eigen::Index>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kx;
            if (ix >= 0 && ix < w) grad_input.at(c, iy, ix) += grad_patches(row, col + ox);
          }
        }
      }
    }
  }
  return grad_input;
}

}  // namespace detail

template <class S>
Tensor<S> conv2d_forward(const Tensor<S>& input, const LayerState<S>& state,
                         const LayerSpec& spec, ConvCache<S>* cache = nullptr) {
  detail::require(spec.kind == LayerKind::conv2d, "conv2d_forward: spec is not conv2d");
  detail::require(input.rank() == 3, "conv2d_forward: input must be [C,H,W]");
  const Shape& ws = state.weights.shape();
  detail::require(ws.size() == 4 && ws[0] == spec.out_channels &&
                      ws[2] == spec.kernel_size && ws[3] == spec.kernel_size,
                  "conv2d_forward: weight tensor does not match layer spec");
  detail::require(ws[1] == input.dim(0),
                  "conv2d_forward: input has " + std::to_string(input.dim(0)) +
                      " channels, weights expect " + std::to_string(ws[1]));

  const int out_h = conv_output_extent(input.dim(1), spec.kernel_size, spec.stride, spec.padding);
  const int out_w = conv_output_extent(input.dim(2), spec.kernel_size, spec.stride, spec.padding);
  auto patches = detail::im2col(input, spec.kernel_size, spec.stride, spec.padding, out_h, out_w);

  const Eigen::Index filters = spec.out_channels;
  const Eigen::Index positions = patches.cols();
  Tensor<S> out({spec.out_channels, out_h, out_w});
  Eigen::Map<detail::MatrixR<S>> out_map(out.data(), filters, positions);
  Eigen::Map<const detail::MatrixR<S>> w_map(state.weights.data(), filters, patches.rows());
  Eigen::Map<const detail::VectorX<S>> b_map(state.biases.data(), filters);
  out_map.noalias() = w_map * patches;
  out_map.colwise() += b_map;

  if (cache) {
    cache->in_shape = input.shape();
    cache->patches = std::move(patches);
  }
  return out;
}

template <class S>
ConvGrads<S> conv2d_backward(const Tensor<S>& grad_out, const ConvCache<S>& cache,
                             const LayerState<S>& state, const LayerSpec& spec) {
  const int out_h = conv_output_extent(cache.in_shape[1], spec.kernel_size, spec.stride, spec.padding);
  const int out_w = conv_output_extent(cache.in_shape[2], spec.kernel_size, spec.stride, spec.padding);
  detail::require(grad_out.shape() == Shape({spec.out_channels, out_h, out_w}),
                  "conv2d_backward: grad shape " + shape_to_string(grad_out.shape()) +
                      " does not match forward output");

  const Eigen::Index filters = spec.out_channels;
  const Eigen::Index positions = cache.patches.cols();
  Eigen::Map<const detail::MatrixR<S>> gy(grad_out.data(), filters, positions);
  Eigen::Map<const detail::MatrixR<S>> w_map(state.weights.data(), filters, cache.patches.rows());

  ConvGrads<S> grads;
  grads.weights = Tensor<S>(state.weights.shape());
  grads.biases = Tensor<S>(state.biases.shape());
  Eigen::Map<detail::MatrixR<S>> gw(grads.weights.data(), filters, cache.patches.rows());
  gw.noalias() = gy * cache.patches.transpose();
  Eigen::Map<detail::VectorX<S>> gb(grads.biases.data(), filters);
  gb.noalias() = gy.rowwise().sum();

  detail::MatrixC<S> grad_patches = w_map.transpose() * gy;
  grads.input = detail::col2im(grad_patches, cache.in_shape, spec.kernel_size, spec.stride,
                               spec.padding, out_h, out_w);
  return grads;
}

// ---------------------------------------------------------------------------
// maxpool
// ---------------------------------------------------------------------------

struct PoolCache {
  Shape in_shape;
  Shape out_shape;
  std::vector<std::int64_t> argmax;  // flat input index per output element
};

template <class S>
Tensor<S> maxpool_forward(const Tensor<S>& input, const LayerSpec& spec,
                          PoolCache* cache = nullptr) {
  detail::require(spec.kind == LayerKind::maxpool, "maxpool_forward: spec is not maxpool");
  detail::require(input.rank() == 3, "maxpool_forward: input must be [C,H,W]");
  const int channels = input.dim(0), h = input.dim(1), w = input.dim(2);
  const int k = spec.kernel_size, s = spec.stride;
  const int out_h = conv_output_extent(h, k, s, 0);
  const int out_w = conv_output_extent(w, k, s, 0);

  Tensor<S> out({channels, out_h, out_w});
  std::vector<std::int64_t> argmax(static_cast<std::size_t>(out.size()));
  std::int64_t o = 0;
  for (int c = 0; c < channels; ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox, ++o) {
        // Row-major scan; ties keep the first position.
        S best = input.at(c, oy * s, ox * s);
        std::int64_t best_idx = (static_cast<std::int64_t>(c) * h + oy * s) * w + ox * s;
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const int iy = oy * s + ky, ix = ox * s + kx;
            const S v = input.at(c, iy, ix);
            if (v > best) {
              best = v;
              best_idx = (static_cast<std::int64_t>(c) * h + iy) * w + ix;
            }
          }
        }
        out[o] = best;
        argmax[static_cast<std::size_t>(o)] = best_idx;
      }
    }
  }
  if (cache) {
    cache->in_shape = input.shape();
    cache->out_shape = out.shape();
    cache->argmax = std::move(argmax);
  }
  return out;
}

template <class S>
Tensor<S> maxpool_backward(const Tensor<S>& grad_out, const PoolCache& cache) {
  detail::require(grad_out.shape() == cache.out_shape,
                  "maxpool_backward: grad shape does not match forward output");
  Tensor<S> grad_input(cache.in_shape);
  for (std::int64_t i = 0; i < grad_out.size(); ++i)
    grad_input[cache.argmax[static_cast<std::size_t>(i)]] += grad_out[i];
  return grad_input;
}

// ---------------------------------------------------------------------------
// relu
// ---------------------------------------------------------------------------

template <class S>
Tensor<S> relu(const Tensor<S>& input) {
  Tensor<S> out(input.shape());
  out.array() = input.array().max(S(0));
  return out;
}

// Gradient gate; the derivative at exactly zero is defined as zero.
template <class S>
Tensor<S> relu_backward(const Tensor<S>& grad_out, const Tensor<S>& forward_input) {
  detail::require(grad_out.shape() == forward_input.shape(),
                  "relu_backward: grad shape does not match forward input");
  Tensor<S> grad_input(grad_out.shape());
  grad_input.array() = (forward_input.array() > S(0)).select(grad_out.array(), S(0));
  return grad_input;
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

struct FlattenCache {
  Shape in_shape;
};

template <class S>
Tensor<S> flatten_forward(const Tensor<S>& input, FlattenCache* cache = nullptr) {
  if (cache) cache->in_shape = input.shape();
  return input.reshaped({static_cast<int>(input.size())});
}

template <class S>
Tensor<S> flatten_backward(const Tensor<S>& grad_out, const FlattenCache& cache) {
  return grad_out.reshaped(cache.in_shape);
}

// ---------------------------------------------------------------------------
// dense
// ---------------------------------------------------------------------------

template <class S>
struct DenseCache {
  Tensor<S> input;
};

template <class S>
struct DenseGrads {
  Tensor<S> input;
  Tensor<S> weights;
  Tensor<S> biases;
};

template <class S>
Tensor<S> dense_forward(const Tensor<S>& input, const LayerState<S>& state,
                        const LayerSpec& spec, DenseCache<S>* cache = nullptr) {
  detail::require(spec.kind == LayerKind::dense, "dense_forward: spec is not dense");
  detail::require(input.rank() == 1, "dense_forward: input must be rank 1");
  const Shape& ws = state.weights.shape();
  detail::require(ws.size() == 2 && ws[0] == spec.out_units(),
                  "dense_forward: weight tensor does not match layer spec");
  detail::require(ws[1] == input.dim(0),
                  "dense_forward: input has " + std::to_string(input.dim(0)) +
                      " units, weights expect " + std::to_string(ws[1]));

  Tensor<S> out({spec.out_units()});
  Eigen::Map<const detail::MatrixR<S>> w_map(state.weights.data(), ws[0], ws[1]);
  Eigen::Map<const detail::VectorX<S>> x(input.data(), input.size());
  Eigen::Map<detail::VectorX<S>> y(out.data(), out.size());
  Eigen::Map<const detail::VectorX<S>> b(state.biases.data(), ws[0]);
  y.noalias() = w_map * x + b;

  if (cache) cache->input = input;
  return out;
}

template <class S>
DenseGrads<S> dense_backward(const Tensor<S>& grad_out, const DenseCache<S>& cache,
                             const LayerState<S>& state) {
  const Shape& ws = state.weights.shape();
  detail::require(grad_out.rank() == 1 && grad_out.dim(0) == ws[0],
                  "dense_backward: grad shape does not match forward output");

  DenseGrads<S> grads;
  grads.input = Tensor<S>(cache.input.shape());
  grads.weights = Tensor<S>(state.weights.shape());
  grads.biases = grad_out;

  Eigen::Map<const detail::MatrixR<S>> w_map(state.weights.data(), ws[0], ws[1]);
  Eigen::Map<const detail::VectorX<S>> g(grad_out.data(), grad_out.size());
  Eigen::Map<const detail::VectorX<S>> x(cache.input.data(), cache.input.size());
  Eigen::Map<detail::VectorX<S>> gx(grads.input.data(), grads.input.size());
  Eigen::Map<detail::MatrixR<S>> gw(grads.weights.data(), ws[0], ws[1]);
  gx.noalias() = w_map.transpose() * g;
  gw.noalias() = g * x.transpose();
  return grads;
}

// ---------------------------------------------------------------------------
// softmax and fused softmax/cross-entropy
// ---------------------------------------------------------------------------

// Max-subtraction form; safe for arbitrary logit magnitudes.
template <class S>
Tensor<S> softmax(const Tensor<S>& logits) {
  detail::require(logits.rank() == 1 && logits.dim(0) >= 2,
                  "softmax: needs a rank-1 tensor with >= 2 classes");
  Tensor<S> probs(logits.shape());
  const S max = logits.array().maxCoeff();
  probs.array() = (logits.array() - max).exp();
  probs.array() /= probs.array().sum();
  return probs;
}

template <class S>
struct SoftmaxXent {
  S loss;
  Tensor<S> probs;
  Tensor<S> grad_logits;  // probs - onehot(label)
};

template <class S>
SoftmaxXent<S> softmax_cross_entropy(const Tensor<S>& logits, int label) {
  detail::require(logits.rank() == 1 && logits.dim(0) >= 2,
                  "softmax_cross_entropy: needs a rank-1 tensor with >= 2 classes");
  detail::require(label >= 0 && label < logits.dim(0),
                  "softmax_cross_entropy: label " + std::to_string(label) +
                      " out of range for " + std::to_string(logits.dim(0)) + " classes");

  SoftmaxXent<S> r;
  const S max = logits.array().maxCoeff();
  Tensor<S> shifted(logits.shape());
  shifted.array() = logits.array() - max;
  Tensor<S> e(logits.shape());
  e.array() = shifted.array().exp();
  const S z = e.array().sum();
  r.probs = Tensor<S>(logits.shape());
  r.probs.array() = e.array() / z;
  // -log p[label] evaluated as log(sum exp) - shifted[label]; stays finite
  // even when p[label] underflows.
  r.loss = std::log(z) - shifted[label];
  r.grad_logits = r.probs;
  r.grad_logits[label] -= S(1);
  return r;
}

// ---------------------------------------------------------------------------
// shape algebra
// ---------------------------------------------------------------------------

// Output shape after each layer of a chain, starting from input_shape.
// Throws when the chain is inconsistent (wrong ranks, vanishing extents).
inline std::vector<Shape> walk_shapes(const std::vector<LayerSpec>& layers, Shape input_shape) {
  std::vector<Shape> shapes;
  shapes.reserve(layers.size());
  Shape cur = std::move(input_shape);
  for (const LayerSpec& layer : layers) {
    switch (layer.kind) {
      case LayerKind::conv2d:
        detail::require(cur.size() == 3, "conv2d needs a [C,H,W] input");
        cur = {layer.out_channels,
               conv_output_extent(cur[1], layer.kernel_size, layer.stride, layer.padding),
               conv_output_extent(cur[2], layer.kernel_size, layer.stride, layer.padding)};
        break;
      case LayerKind::maxpool:
        detail::require(cur.size() == 3, "maxpool needs a [C,H,W] input");
        cur = {cur[0], conv_output_extent(cur[1], layer.kernel_size, layer.stride, 0),
               conv_output_extent(cur[2], layer.kernel_size, layer.stride, 0)};
        break;
      case LayerKind::relu:
        break;
      case LayerKind::flatten:
        cur = {static_cast<int>(shape_size(cur))};
        break;
      case LayerKind::dense:
        detail::require(cur.size() == 1, "dense needs a rank-1 input (flatten first)");
        cur = {layer.out_units()};
        break;
      case LayerKind::softmax:
        detail::require(cur.size() == 1, "softmax needs a rank-1 input");
        break;
    }
    shapes.push_back(cur);
  }
  return shapes;
}

}  // namespace emigrade
