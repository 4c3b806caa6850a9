#pragma once

#include <array>
#include <cstdint>

#include "emigrade/frame.hpp"
#include "emigrade/rng.hpp"

namespace emigrade {

// Ordinal severity of the injected interference, 1 (none visible) to
// 5 (loss of lock, flat blue field).
class NoiseLevel {
 public:
  explicit NoiseLevel(int value);
  int value() const { return value_; }

 private:
  int value_;
};

struct AmplitudeRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Parametric model of narrowband interference coupling onto a raster-scanned
// analog link: one sinusoid per frame (amplitude drawn per level), a per-line
// phase drift, occasional full-line impulses, and sub-LSB dither at level 1.
struct NoiseParams {
  // Per level 1..4; level 1 carries no sinusoid. Ranges must be ordered and
  // non-overlapping by level (boundaries may touch, as with the zero-width
  // level-1 placeholder) so the severity classes stay separable.
  std::array<AmplitudeRange, 4> amplitude{
      AmplitudeRange{0.0, 0.0},
      AmplitudeRange{4.0, 12.0},
      AmplitudeRange{16.0, 40.0},
      AmplitudeRange{48.0, 120.0},
  };
  AmplitudeRange interferer_cycles_per_line{0.5, 30.0};
  AmplitudeRange phase_drift_per_line{0.0, 0.3};  // radians
  double dither_sigma = 0.5;                      // LSB, level 1 only
  std::array<double, 4> burst_probability{0.0, 0.0, 0.05, 0.15};  // per line
  Ycbcr loss_of_lock{41, 240, 110};  // studio-range full-amplitude blue
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Applies the level's interference to a copy of `frame`, drawing from `rng`.
// Identical (frame, level, params, rng stream) give bit-identical output.
//
// Draw order is fixed: level 1 draws one normal per sample in plane order
// Y, Cb, Cr (row-major within a plane); levels 2-4 draw amplitude, cycles
// per line, initial phase, phase drift, then per line a burst uniform and,
// on a burst, a sign uniform. Level 5 draws nothing.
Frame inject_noise(const Frame& frame, NoiseLevel level, const NoiseParams& params, Rng& rng);

}  // namespace emigrade
