#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "mcvmd/series.hpp"

namespace mcvmd {

/// Additive white Gaussian noise at a target SNR. An infinite snr_db disables noise.
struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  static NoiseSpec none() { return {}; }
  bool enabled() const { return std::isfinite(snr_db); }
};

/// Adds zero-mean Gaussian noise rescaled so the empirical signal-to-noise power
/// ratio equals spec.snr_db. `stream` decorrelates series drawn from one seed.
template <typename Scalar>
RealSeries<Scalar> add_noise(const RealSeries<Scalar>& x, const NoiseSpec& spec, std::uint64_t stream = 0) {
  if (std::isnan(spec.snr_db) || spec.snr_db == -std::numeric_limits<double>::infinity()) {
    throw InputError("add_noise: snr_db must be finite or +inf");
  }
  if (!spec.enabled()) return x;

  const Index n = x.size();
  const Scalar signal_power = x.samples().squaredNorm() / Scalar(n);
  if (!(signal_power > Scalar(0))) throw InputError("add_noise: input has zero energy");

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector<Scalar> noise(n);
  for (Index k = 0; k < n; ++k) noise[k] = Scalar(normal(engine));
  noise.array() -= noise.mean();

  const Scalar target_power = signal_power / Scalar(std::pow(10.0, spec.snr_db / 10.0));
  const Scalar drawn_power = noise.squaredNorm() / Scalar(n);
  noise *= std::sqrt(target_power / drawn_power);
  return {x.samples() + noise, x.sample_rate()};
}

}  // namespace mcvmd
