#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mcvmd/noise.hpp"
#include "mcvmd/series.hpp"

namespace mcvmd {

namespace detail {

template <typename Scalar>
Index sample_count(double duration_s, double sample_rate) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw InputError("simulate: duration must be positive");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw InputError("simulate: sample rate must be positive");
  return static_cast<Index>(std::llround(duration_s * sample_rate));
}

template <typename Scalar>
MultiSectionRecord<Scalar> assemble(std::vector<Vector<Scalar>> series, double sample_rate, const NoiseSpec& noise) {
  std::vector<SectionProbes<Scalar>> sections;
  for (std::size_t i = 0; i + 1 < series.size(); i += 2) {
    RealSeries<Scalar> x(std::move(series[i]), Scalar(sample_rate));
    RealSeries<Scalar> y(std::move(series[i + 1]), Scalar(sample_rate));
    sections.push_back({add_noise(x, noise, i), add_noise(y, noise, i + 1)});
  }
  return MultiSectionRecord<Scalar>(std::move(sections));
}

}  // namespace detail

/// Two bearing sections, each with amplitude-modulated 16 Hz and 32 Hz
/// components. Section 1 whirls forward at 16 Hz and backward at 32 Hz;
/// section 2 the reverse. Noise, if enabled, is added to each probe series
/// independently at the requested SNR.
template <typename Scalar = double>
MultiSectionRecord<Scalar> simulate_two_section(double duration_s = 1.0, double sample_rate = 1024.0,
                                                const NoiseSpec& noise = NoiseSpec::none()) {
  using std::cos;
  constexpr double pi = std::numbers::pi;
  const Index n = detail::sample_count<Scalar>(duration_s, sample_rate);
  std::vector<Vector<Scalar>> s(4, Vector<Scalar>(n));
  for (Index k = 0; k < n; ++k) {
    const double t = double(k) / sample_rate;
    const double w1 = 2 * pi * 16 * t;
    const double w2 = 2 * pi * 32 * t;
    s[0][k] = Scalar((2 + 0.5 * cos(2.5 * pi * t)) * cos(w1) + (1.2 + 0.3 * cos(8 * pi * t)) * cos(w2));
    s[1][k] = Scalar((2 + 0.8 * cos(5 * pi * t)) * cos(w1 + 5 * pi / 3) +
                     (1.4 + 0.53 * cos(6 * pi * t)) * cos(w2 + 2 * pi / 7));
    s[2][k] = Scalar((2.6 + 0.7 * cos(5 * pi * t)) * cos(w1) + (1.5 + 0.5 * cos(15 * pi * t)) * cos(w2));
    s[3][k] = Scalar((2.8 + 0.6 * cos(10 * pi * t)) * cos(w1 + 3 * pi / 8) +
                     (1.7 + 0.33 * cos(10 * pi * t)) * cos(w2 + 12 * pi / 7));
  }
  return detail::assemble<Scalar>(std::move(s), sample_rate, noise);
}

/// Bistable whirl analog: a single-frequency elliptical orbit per section whose
/// forward and backward radii swap at jump_time_s, reversing the precession
/// direction while the frequency stays fixed. Section 1 starts forward, section 2
/// starts backward. The swap is a raised-cosine crossfade of width transition_s
/// centered on the jump (0 gives a hard step); the radii are equal at jump_time_s.
template <typename Scalar = double>
MultiSectionRecord<Scalar> simulate_bistable(double duration_s = 0.512, double sample_rate = 2000.0,
                                             double jump_time_s = 0.2, const NoiseSpec& noise = NoiseSpec::none(),
                                             double tone_hz = 96.0, double transition_s = 0.01) {
  if (!(jump_time_s > 0.0 && jump_time_s < duration_s)) {
    throw InputError("simulate_bistable: jump time must lie strictly inside the record");
  }
  if (!(transition_s >= 0.0)) throw InputError("simulate_bistable: transition width must be non-negative");
  constexpr double pi = std::numbers::pi;
  struct Orbit {
    double forward_radius, backward_radius, forward_phase, backward_phase;
  };
  // Radii before the jump; swapped afterwards.
  const Orbit orbits[2] = {{2.0, 1.0, 0.3, 0.9}, {0.8, 1.6, 1.1, -0.4}};

  auto swap_weight = [&](double t) {
    if (transition_s == 0.0) return t < jump_time_s ? 0.0 : 1.0;
    const double u = (t - jump_time_s) / transition_s + 0.5;
    return u <= 0 ? 0.0 : (u >= 1 ? 1.0 : 0.5 - 0.5 * std::cos(pi * u));
  };

  const Index n = detail::sample_count<Scalar>(duration_s, sample_rate);
  std::vector<Vector<Scalar>> s(4, Vector<Scalar>(n));
  for (Index k = 0; k < n; ++k) {
    const double t = double(k) / sample_rate;
    const double wt = 2 * pi * tone_hz * t;
    for (int i = 0; i < 2; ++i) {
      const auto& o = orbits[i];
      const double w = swap_weight(t);
      const double rf = (1 - w) * o.forward_radius + w * o.backward_radius;
      const double rb = (1 - w) * o.backward_radius + w * o.forward_radius;
      const std::complex<double> z =
          std::polar(rf, wt + o.forward_phase) + std::polar(rb, -wt + o.backward_phase);
      s[2 * i][k] = Scalar(z.real());
      s[2 * i + 1][k] = Scalar(z.imag());
    }
  }
  return detail::assemble<Scalar>(std::move(s), sample_rate, noise);
}

/// Default tone set of the multi-tone generator (Hz): a 6.25 Hz rotation
/// frequency, its low harmonics, and higher structural lines.
inline std::vector<double> default_multitone_set() { return {6.25, 12.5, 25.0, 50.0, 75.0, 110.0, 160.0}; }

/// Stationary multi-section record: every section carries every tone as an
/// ellipse with seed-derived forward/backward radii and phases.
template <typename Scalar = double>
MultiSectionRecord<Scalar> simulate_multitone(std::size_t sections = 3, double duration_s = 1.28,
                                              double sample_rate = 800.0,
                                              const std::vector<double>& tones_hz = default_multitone_set(),
                                              std::uint64_t seed = 3, const NoiseSpec& noise = NoiseSpec::none()) {
  if (sections == 0) throw InputError("simulate_multitone: need at least one section");
  if (tones_hz.empty()) throw InputError("simulate_multitone: empty tone set");
  constexpr double pi = std::numbers::pi;
  const Index n = detail::sample_count<Scalar>(duration_s, sample_rate);

  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> forward_radius(0.5, 2.0), backward_radius(0.2, 1.5), phase(0.0, 2 * pi);

  std::vector<Vector<Scalar>> s(2 * sections, Vector<Scalar>::Zero(n));
  for (std::size_t i = 0; i < sections; ++i) {
    for (double f : tones_hz) {
      const double rf = forward_radius(engine), rb = backward_radius(engine);
      const double af = phase(engine), ab = phase(engine);
      for (Index k = 0; k < n; ++k) {
        const double wt = 2 * pi * f * double(k) / sample_rate;
        const std::complex<double> z = std::polar(rf, wt + af) + std::polar(rb, -wt + ab);
        s[2 * i][k] += Scalar(z.real());
        s[2 * i + 1][k] += Scalar(z.imag());
      }
    }
  }
  return detail::assemble<Scalar>(std::move(s), sample_rate, noise);
}

}  // namespace mcvmd
