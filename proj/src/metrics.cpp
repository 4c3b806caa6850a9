#include "emigrade/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace emigrade {
namespace {

void accumulate_plane(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                      double& sum_sq) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum_sq += d * d;
  }
}

std::string formatted(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

PsnrResult psnr(const Frame& a, const Frame& b, double max_value) {
  if (!a.same_dimensions(b)) throw std::invalid_argument("psnr: frame dimensions differ");
  if (!(max_value > 0.0)) throw std::invalid_argument("psnr: max_value must be positive");
  double sum_sq = 0.0;
  accumulate_plane(a.y, b.y, sum_sq);
  accumulate_plane(a.cb, b.cb, sum_sq);
  accumulate_plane(a.cr, b.cr, sum_sq);
  if (sum_sq == 0.0) return {true, 0.0};
  const double mse = sum_sq / (3.0 * a.plane_size());
  return {false, 10.0 * std::log10(max_value * max_value / mse)};
}

MetricsReport classification_report(const std::vector<int>& predictions,
                                    const std::vector<int>& truths) {
  if (predictions.empty()) throw std::invalid_argument("classification_report: empty input");
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("classification_report: predictions and truths differ in length");
  }
  MetricsReport report;
  report.confusion.setZero();
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i], p = predictions[i];
    if (t < 1 || t > kNumLevels || p < 1 || p > kNumLevels) {
      throw std::invalid_argument("classification_report: levels must be in 1..5");
    }
    report.confusion(t - 1, p - 1) += 1;
  }
  report.total = static_cast<std::int64_t>(truths.size());
  report.accuracy = static_cast<double>(report.confusion.trace()) / report.total;
  for (int k = 0; k < kNumLevels; ++k) {
    const std::int64_t col_total = report.confusion.col(k).sum();
    const std::int64_t row_total = report.confusion.row(k).sum();
    const std::int64_t correct = report.confusion(k, k);
    ClassMetrics& m = report.per_class[k];
    m.no_support = (col_total == 0 && row_total == 0);
    m.precision = col_total > 0 ? static_cast<double>(correct) / col_total : 0.0;
    m.recall = row_total > 0 ? static_cast<double>(correct) / row_total : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  return report;
}

std::string format_report_text(const MetricsReport& report) {
  std::string out = "           Precision  Recall  F1-Score\n";
  for (int k = 0; k < kNumLevels; ++k) {
    const ClassMetrics& m = report.per_class[k];
    out += "Level " + std::to_string(k + 1);
    out += "    " + formatted("%9.2f", m.precision);
    out += formatted("%8.2f", m.recall);
    out += formatted("%10.2f", m.f1);
    if (m.no_support) out += "  (no support)";
    out += "\n";
  }
  out += "Accuracy " + formatted("%29.2f", report.accuracy) + "\n";
  out += "Samples  " + formatted("%29.0f", static_cast<double>(report.total)) + "\n";
  return out;
}

std::string format_report_csv(const MetricsReport& report) {
  std::string out = "level,precision,recall,f1,support\n";
  for (int k = 0; k < kNumLevels; ++k) {
    const ClassMetrics& m = report.per_class[k];
    out += std::to_string(k + 1);
    out += "," + formatted("%.6f", m.precision);
    out += "," + formatted("%.6f", m.recall);
    out += "," + formatted("%.6f", m.f1);
    out += "," + std::to_string(report.confusion.row(k).sum());
    out += "\n";
  }
  out += "accuracy," + formatted("%.6f", report.accuracy) + "\n";
  return out;
}

std::string format_confusion_csv(const MetricsReport& report) {
  std::string out;
  for (int t = 0; t < kNumLevels; ++t) {
    for (int p = 0; p < kNumLevels; ++p) {
      if (p > 0) out += ",";
      out += std::to_string(report.confusion(t, p));
    }
    out += "\n";
  }
  return out;
}

}  // namespace emigrade
