#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include "mcvmd/pipeline.hpp"
#include "mcvmd/spectral.hpp"

namespace mcvmd {

// Per-sample feature tracks use NaN to mark samples where a quantity is undefined
// (a branch below the degeneracy threshold).

template <typename Scalar>
inline constexpr Scalar undefined_value = std::numeric_limits<Scalar>::quiet_NaN();

inline constexpr double kDegeneracyFactor = 1e-6;

/// Threshold below which a branch magnitude counts as zero: 1e-6 of the record's
/// largest magnitude.
template <typename Scalar>
Scalar degeneracy_threshold(const MCVMDResult<Scalar>& r) {
  Scalar peak = 0;
  for (const auto& row : r.pairs) {
    for (const auto& p : row) {
      peak = std::max({peak, p.forward.samples().cwiseAbs().maxCoeff(), p.backward.samples().cwiseAbs().maxCoeff()});
    }
  }
  return Scalar(kDegeneracyFactor) * peak;
}

template <typename Scalar>
Scalar degeneracy_threshold(const ComplexIMFPair<Scalar>& p) {
  return Scalar(kDegeneracyFactor) *
         std::max(p.forward.samples().cwiseAbs().maxCoeff(), p.backward.samples().cwiseAbs().maxCoeff());
}

template <typename Scalar>
struct Amplitudes {
  Vector<Scalar> r_plus;
  Vector<Scalar> r_minus;
};

template <typename Scalar>
Amplitudes<Scalar> instantaneous_amplitudes(const ComplexIMFPair<Scalar>& pair) {
  return {pair.forward.samples().cwiseAbs(), pair.backward.samples().cwiseAbs()};
}

template <typename Scalar>
struct SemiAxes {
  Vector<Scalar> r_a;  // semi-major
  Vector<Scalar> r_b;  // semi-minor
};

template <typename Scalar>
SemiAxes<Scalar> semi_axes(const Vector<Scalar>& r_plus, const Vector<Scalar>& r_minus) {
  if (r_plus.size() != r_minus.size()) throw InputError("semi_axes: length mismatch");
  if ((r_plus.array() < 0).any() || (r_minus.array() < 0).any()) throw InputError("semi_axes: negative radius");
  return {r_plus + r_minus, (r_plus - r_minus).cwiseAbs()};
}

/// Unwraps a phase track in place by the +-pi jump rule, skipping NaN gaps.
template <typename Scalar>
void unwrap_phase(Vector<Scalar>& phi) {
  constexpr Scalar two_pi = Scalar(2 * std::numbers::pi);
  Scalar offset = 0, prev_raw = 0;
  bool have_prev = false;
  for (Index n = 0; n < phi.size(); ++n) {
    if (std::isnan(phi[n])) continue;
    const Scalar raw = phi[n];
    if (have_prev) {
      const Scalar d = raw - prev_raw;
      if (d > Scalar(std::numbers::pi)) offset -= two_pi * std::ceil((d - Scalar(std::numbers::pi)) / two_pi);
      else if (d < -Scalar(std::numbers::pi)) offset += two_pi * std::ceil((-d - Scalar(std::numbers::pi)) / two_pi);
    }
    prev_raw = raw;
    have_prev = true;
    phi[n] = raw + offset;
  }
}

/// Four-quadrant phase of a complex track, NaN where |z| < eps, then unwrapped.
template <typename Scalar>
Vector<Scalar> unwrapped_phase(const ComplexVector<Scalar>& z, Scalar eps) {
  Vector<Scalar> phi(z.size());
  for (Index n = 0; n < z.size(); ++n) phi[n] = std::abs(z[n]) < eps ? undefined_value<Scalar> : std::arg(z[n]);
  unwrap_phase(phi);
  return phi;
}

template <typename Scalar>
struct Phases {
  Vector<Scalar> phi_f;
  Vector<Scalar> phi_b;
};

template <typename Scalar>
Phases<Scalar> instantaneous_phases(const ComplexIMFPair<Scalar>& pair, Scalar eps) {
  return {unwrapped_phase(pair.forward.samples(), eps), unwrapped_phase(pair.backward.samples(), eps)};
}

/// Major-axis inclination (phi_f + phi_b) / 2, reduced into [0, pi).
template <typename Scalar>
Vector<Scalar> inclination(const Vector<Scalar>& phi_f, const Vector<Scalar>& phi_b) {
  if (phi_f.size() != phi_b.size()) throw InputError("inclination: length mismatch");
  constexpr Scalar pi = Scalar(std::numbers::pi);
  Vector<Scalar> theta(phi_f.size());
  for (Index n = 0; n < theta.size(); ++n) {
    if (std::isnan(phi_f[n]) || std::isnan(phi_b[n])) {
      theta[n] = undefined_value<Scalar>;
      continue;
    }
    Scalar t = std::fmod((phi_f[n] + phi_b[n]) / Scalar(2), pi);
    if (t < 0) t += pi;
    if (t >= pi) t -= pi;
    theta[n] = t;
  }
  return theta;
}

template <typename Scalar>
struct SdiTrack {
  Vector<Scalar> values;
  Index clamped = 0;  // samples whose raw magnitude exceeded 1 + 1e-6
  Scalar max_raw_magnitude = 0;
};

/// Shape and directivity index of a single-mode orbit signal:
///   (r_plus^2 - r_minus^2) / (|Re(p) + jH(Re p)| |Im(p) + jH(Im p)|), clamped into [-1, 1].
template <typename Scalar>
SdiTrack<Scalar> sdi(const ComplexSeries<Scalar>& component, const Vector<Scalar>& r_plus,
                     const Vector<Scalar>& r_minus, Scalar eps) {
  if (r_plus.size() != component.size() || r_minus.size() != component.size()) {
    throw InputError("sdi: length mismatch");
  }
  const auto xa = hilbert_analytic(component.real());
  const auto ya = hilbert_analytic(component.imag());
  SdiTrack<Scalar> out{Vector<Scalar>(component.size())};
  for (Index n = 0; n < component.size(); ++n) {
    const Scalar den = std::abs(xa[n]) * std::abs(ya[n]);
    if (den < eps * eps) {
      out.values[n] = undefined_value<Scalar>;
      continue;
    }
    const Scalar raw = (r_plus[n] * r_plus[n] - r_minus[n] * r_minus[n]) / den;
    out.max_raw_magnitude = std::max(out.max_raw_magnitude, std::abs(raw));
    if (std::abs(raw) > Scalar(1) + Scalar(1e-6)) ++out.clamped;
    out.values[n] = std::clamp(raw, Scalar(-1), Scalar(1));
  }
  return out;
}

template <typename Scalar>
struct OrbitFeatureSeries {
  Vector<Scalar> r_plus, r_minus;
  Vector<Scalar> r_a, r_b;
  Vector<Scalar> phi_f, phi_b;  // unwrapped, rad
  Vector<Scalar> theta;         // rad, [0, pi)
  Vector<Scalar> sdi;
  Index sdi_clamped = 0;
  Scalar sample_rate{};

  Index size() const { return r_plus.size(); }
};

template <typename Scalar>
OrbitFeatureSeries<Scalar> orbit_features(const ComplexIMFPair<Scalar>& pair, Scalar eps) {
  OrbitFeatureSeries<Scalar> f;
  auto amp = instantaneous_amplitudes(pair);
  auto axes = semi_axes(amp.r_plus, amp.r_minus);
  auto ph = instantaneous_phases(pair, eps);
  auto s = sdi(pair.component(), amp.r_plus, amp.r_minus, eps);
  f.theta = inclination(ph.phi_f, ph.phi_b);
  f.r_plus = std::move(amp.r_plus);
  f.r_minus = std::move(amp.r_minus);
  f.r_a = std::move(axes.r_a);
  f.r_b = std::move(axes.r_b);
  f.phi_f = std::move(ph.phi_f);
  f.phi_b = std::move(ph.phi_b);
  f.sdi = std::move(s.values);
  f.sdi_clamped = s.clamped;
  f.sample_rate = pair.forward.sample_rate();
  return f;
}

template <typename Scalar>
OrbitFeatureSeries<Scalar> orbit_features(const MCVMDResult<Scalar>& r, int n, std::size_t i) {
  detail::check_indices(r, n, i, "orbit_features");
  return orbit_features(r.pair(n, i), degeneracy_threshold(r));
}

enum class Precession { forward, backward, degenerate };

inline std::string_view to_string(Precession p) {
  switch (p) {
    case Precession::forward: return "forward";
    case Precession::backward: return "backward";
    case Precession::degenerate: return "circular-degenerate";
  }
  return "?";
}

struct PrecessionTrack {
  std::vector<int> direction;     // +1 forward, -1 backward, 0 undefined or exactly zero
  std::vector<double> crossings;  // s, linear interpolation between defined samples
};

/// Per-sample precession sign from an SDI track, plus its zero-crossing times.
template <typename Scalar>
PrecessionTrack precession_direction(const Vector<Scalar>& sdi_values, Scalar sample_rate) {
  PrecessionTrack out;
  out.direction.resize(sdi_values.size());
  Index last = -1;
  for (Index n = 0; n < sdi_values.size(); ++n) {
    const Scalar v = sdi_values[n];
    if (std::isnan(v)) {
      out.direction[n] = 0;
      continue;
    }
    out.direction[n] = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (v == 0) continue;
    if (last >= 0 && (sdi_values[last] > 0) != (v > 0)) {
      const double t0 = double(last) / double(sample_rate), t1 = double(n) / double(sample_rate);
      const double a = double(sdi_values[last]), b = double(v);
      out.crossings.push_back(t0 + (t1 - t0) * a / (a - b));
    }
    last = n;
  }
  return out;
}

struct FullSpectrumLine {
  double frequency = 0;  // Hz
  double r_fwd = 0;      // forward rotating-vector radius
  double r_bwd = 0;      // backward rotating-vector radius
  double inclination = 0;
  Precession precession = Precession::degenerate;
};

/// Stationary full spectrum of a probe pair, one line per positive DFT bin.
/// Radii follow the rotating-vector convention: a unit circle gives r_fwd = 1.
/// The inclination is half the sum of the forward and backward vector phases.
template <typename Scalar>
std::vector<FullSpectrumLine> full_spectrum(const RealSeries<Scalar>& x, const RealSeries<Scalar>& y) {
  if (x.size() != y.size() || x.sample_rate() != y.sample_rate()) {
    throw InputError("full_spectrum: x has length " + std::to_string(x.size()) + ", y has length " +
                     std::to_string(y.size()));
  }
  const Index L = x.size();
  const auto X = detail::fft<Scalar>(x.samples());
  const auto Y = detail::fft<Scalar>(y.samples());
  constexpr double pi = std::numbers::pi;
  std::vector<FullSpectrumLine> lines;
  for (Index m = 1; 2 * m <= L; ++m) {
    const double scale = (2 * m == L) ? 1.0 / double(L) : 2.0 / double(L);
    const std::complex<double> xm(X[m]), ym(Y[m]);
    const double xa = std::abs(xm) * scale, ya = std::abs(ym) * scale;
    const double s = std::sin(std::arg(xm) - std::arg(ym));
    FullSpectrumLine line;
    line.frequency = double(m) * double(x.sample_rate()) / double(L);
    line.r_fwd = 0.5 * std::sqrt(std::max(0.0, xa * xa + ya * ya + 2 * xa * ya * s));
    line.r_bwd = 0.5 * std::sqrt(std::max(0.0, xa * xa + ya * ya - 2 * xa * ya * s));

    const std::complex<double> j(0, 1);
    const std::complex<double> fwd = xm + j * ym;
    const std::complex<double> bwd = std::conj(xm) + j * std::conj(ym);
    double th = std::fmod((std::arg(fwd) + std::arg(bwd)) / 2, pi);
    if (th < 0) th += pi;
    line.inclination = th;

    const double tol = 1e-12 * std::max({line.r_fwd, line.r_bwd, std::numeric_limits<double>::min()});
    if (std::abs(line.r_fwd - line.r_bwd) <= tol) line.precession = Precession::degenerate;
    else line.precession = line.r_fwd > line.r_bwd ? Precession::forward : Precession::backward;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace mcvmd
