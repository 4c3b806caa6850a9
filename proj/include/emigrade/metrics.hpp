#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emigrade/frame.hpp"
#include "emigrade/tensor.hpp"

namespace emigrade {

// Peak signal-to-noise ratio. Identical inputs are a distinguished state
// (rather than +infinity) so downstream aggregation cannot silently average
// infinities.
struct PsnrResult {
  bool identical = false;
  double value_db = 0.0;  // meaningful only when !identical
};

// PSNR between two frames: one mean square error over all three planes
// jointly, then 10*log10(max_value^2 / MSE).
PsnrResult psnr(const Frame& a, const Frame& b, double max_value = 255.0);

// PSNR between two equally-shaped tensors.
template <class Scalar>
PsnrResult psnr(const Tensor<Scalar>& a, const Tensor<Scalar>& b, double max_value) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  if (!(max_value > 0.0)) throw std::invalid_argument("psnr: max_value must be positive");
  if (a.size() == 0) throw std::invalid_argument("psnr: empty input");
  double sum_sq = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum_sq += d * d;
  }
  if (sum_sq == 0.0) return {true, 0.0};
  const double mse = sum_sq / a.size();
  return {false, 10.0 * std::log10(max_value * max_value / mse)};
}

inline constexpr int kNumLevels = 5;

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool no_support = false;  // class absent from both truths and predictions
};

// Classification quality over the five noise levels.
struct MetricsReport {
  // confusion(t, p) counts samples of true level t+1 predicted as level p+1.
  Eigen::Matrix<std::int64_t, kNumLevels, kNumLevels> confusion;
  std::array<ClassMetrics, kNumLevels> per_class;
  double accuracy = 0.0;
  std::int64_t total = 0;
};

// Builds the report from per-sample predicted and true levels (values 1..5).
// Precision is column-correct over column-total, recall row-correct over
// row-total, F1 their harmonic mean; divisions by zero yield 0.
MetricsReport classification_report(const std::vector<int>& predictions,
                                    const std::vector<int>& truths);

// Human-readable table: one row per level with precision / recall / F1 at two
// decimals, then the pooled accuracy.
std::string format_report_text(const MetricsReport& report);

// Machine-readable form: `level,precision,recall,f1,support` rows at six
// decimals followed by an `accuracy,<value>` line.
std::string format_report_csv(const MetricsReport& report);

// The bare 5x5 count grid, one comma-separated row per true level.
std::string format_confusion_csv(const MetricsReport& report);

}  // namespace emigrade
