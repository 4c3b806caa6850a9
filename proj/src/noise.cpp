#include "emigrade/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emigrade {

namespace {

std::uint8_t add_clipped(std::uint8_t sample, double offset) {
  const double v = std::round(sample + offset);
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(v);
}

}  // namespace

NoiseLevel::NoiseLevel(int value) : value_(value) {
  if (value < 1 || value > 5)
    throw std::invalid_argument("noise level " + std::to_string(value) + " outside 1..5");
}

void NoiseParams::validate() const {
  for (const auto& range : amplitude)
    if (range.lo < 0 || range.hi < range.lo)
      throw std::invalid_argument("amplitude ranges must satisfy 0 <= lo <= hi");
  for (std::size_t i = 1; i < amplitude.size(); ++i)
    if (amplitude[i].lo < amplitude[i - 1].hi)
      throw std::invalid_argument("amplitude ranges must be ordered and non-overlapping by level");
  if (dither_sigma < 0) throw std::invalid_argument("dither_sigma must be >= 0");
  for (double p : burst_probability)
    if (p < 0 || p > 1) throw std::invalid_argument("burst probability outside [0,1]");
  if (interferer_cycles_per_line.lo <= 0 ||
      interferer_cycles_per_line.hi < interferer_cycles_per_line.lo)
    throw std::invalid_argument("interferer cycle range must be positive and ordered");
  if (phase_drift_per_line.lo < 0 || phase_drift_per_line.hi < phase_drift_per_line.lo)
    throw std::invalid_argument("phase drift range must be non-negative and ordered");
}

Frame inject_noise(const Frame& frame, NoiseLevel level, const NoiseParams& params, Rng& rng) {
  params.validate();
  Frame out = frame;

  if (level.value() == 5) {
    // Loss of lock: the deserialiser paints a flat field regardless of input.
    std::fill(out.y.begin(), out.y.end(), params.loss_of_lock.y);
    std::fill(out.cb.begin(), out.cb.end(), params.loss_of_lock.cb);
    std::fill(out.cr.begin(), out.cr.end(), params.loss_of_lock.cr);
    return out;
  }

  if (level.value() == 1) {
    // Sub-LSB dither: the link is analog, repeated captures of identical
    // content still differ in the least significant bits.
    if (params.dither_sigma == 0.0) return out;
    for (auto* plane : {&out.y, &out.cb, &out.cr})
      for (auto& sample : *plane) sample = add_clipped(sample, rng.normal(0.0, params.dither_sigma));
    return out;
  }

  // Levels 2-4: one narrowband interferer per frame riding on every scan
  // line, equally coupled into luma and both chroma channels.
  const auto idx = static_cast<std::size_t>(level.value() - 1);
  const double amplitude = rng.uniform(params.amplitude[idx].lo, params.amplitude[idx].hi);
  const double cycles = rng.uniform(params.interferer_cycles_per_line.lo,
                                    params.interferer_cycles_per_line.hi);
  const double phase0 = rng.uniform(0.0, 2.0 * M_PI);
  const double drift = rng.uniform(params.phase_drift_per_line.lo, params.phase_drift_per_line.hi);
  const double burst_p = params.burst_probability[idx];

  for (int row = 0; row < frame.height; ++row) {
    double burst_offset = 0.0;
    if (burst_p > 0.0 && rng.bernoulli(burst_p))
      burst_offset = (rng.bernoulli(0.5) ? 1.0 : -1.0) * 2.0 * amplitude;
    const double phase = phase0 + drift * row;
    const std::size_t base = static_cast<std::size_t>(row) * frame.width;
    for (int x = 0; x < frame.width; ++x) {
      const double n =
          amplitude * std::sin(2.0 * M_PI * cycles * x / frame.width + phase) + burst_offset;
      const std::size_t i = base + static_cast<std::size_t>(x);
      out.y[i] = add_clipped(frame.y[i], n);
      out.cb[i] = add_clipped(frame.cb[i], n);
      out.cr[i] = add_clipped(frame.cr[i], n);
    }
  }
  return out;
}

}  // namespace emigrade
