#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "mcvmd/orbit.hpp"
#include "mcvmd/pipeline.hpp"

namespace mcvmd {

/// d(phi)/dt by centered differences, one-sided at the ends and next to NaN gaps.
template <typename Scalar>
Vector<Scalar> phase_rate(const Vector<Scalar>& phi, Scalar sample_rate) {
  const Index n = phi.size();
  Vector<Scalar> rate(n);
  for (Index k = 0; k < n; ++k) {
    const bool here = !std::isnan(phi[k]);
    const bool left = k > 0 && !std::isnan(phi[k - 1]);
    const bool right = k + 1 < n && !std::isnan(phi[k + 1]);
    if (!here) rate[k] = undefined_value<Scalar>;
    else if (left && right) rate[k] = (phi[k + 1] - phi[k - 1]) * sample_rate / Scalar(2);
    else if (right) rate[k] = (phi[k + 1] - phi[k]) * sample_rate;
    else if (left) rate[k] = (phi[k] - phi[k - 1]) * sample_rate;
    else rate[k] = undefined_value<Scalar>;
  }
  return rate;
}

/// Instantaneous frequency of mode n in Hz: the mean over sections of the
/// forward phase rate and the negated backward phase rate. Undefined branches
/// drop out of the mean; NaN where every branch is undefined.
template <typename Scalar>
Vector<Scalar> mode_if(const MCVMDResult<Scalar>& r, int n) {
  detail::check_indices(r, n, 0, "mode_if");
  const Scalar eps = degeneracy_threshold(r);
  const Scalar fs = r.sample_rate();
  const Index T = r.length();
  Vector<Scalar> sum = Vector<Scalar>::Zero(T);
  Vector<Scalar> count = Vector<Scalar>::Zero(T);
  for (std::size_t i = 0; i < r.section_count(); ++i) {
    const auto ph = instantaneous_phases(r.pair(n, i), eps);
    const Vector<Scalar> wf = phase_rate(ph.phi_f, fs);
    const Vector<Scalar> wb = phase_rate(ph.phi_b, fs);
    for (Index k = 0; k < T; ++k) {
      if (!std::isnan(wf[k])) sum[k] += wf[k], count[k] += 1;
      if (!std::isnan(wb[k])) sum[k] -= wb[k], count[k] += 1;
    }
  }
  Vector<Scalar> hz(T);
  const Scalar two_pi = Scalar(2 * std::numbers::pi);
  for (Index k = 0; k < T; ++k) hz[k] = count[k] > 0 ? sum[k] / count[k] / two_pi : undefined_value<Scalar>;
  return hz;
}

/// Time-full-spectrum: per section, a time x signed-frequency amplitude grid.
template <typename Scalar>
struct TimeFSGrid {
  Vector<Scalar> times;                        // s
  Vector<Scalar> freqs;                        // Hz, symmetric about 0, ascending
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> energy;  // [section](time, freq)
  Scalar resolution_hz{};
  Index skipped = 0;  // deposits dropped for undefined or out-of-range frequency

  Index bin_of(Scalar f) const {
    const Index half = (freqs.size() - 1) / 2;
    return static_cast<Index>(std::llround(double(f / resolution_hz))) + half;
  }
};

/// Deposits each mode's forward amplitude at +IF and backward amplitude at -IF
/// (nearest bin), summed over modes. resolution_hz <= 0 selects fs / length.
template <typename Scalar>
TimeFSGrid<Scalar> time_fs(const MCVMDResult<Scalar>& r, Scalar resolution_hz = 0) {
  const Scalar fs = r.sample_rate();
  const Index T = r.length();
  TimeFSGrid<Scalar> g;
  g.resolution_hz = resolution_hz > 0 ? resolution_hz : fs / Scalar(T);
  const Index half = static_cast<Index>(std::floor(double(fs / 2 / g.resolution_hz) + 1e-9));
  g.freqs = Vector<Scalar>(2 * half + 1);
  for (Index j = -half; j <= half; ++j) g.freqs[j + half] = Scalar(j) * g.resolution_hz;
  g.times = Vector<Scalar>(T);
  for (Index k = 0; k < T; ++k) g.times[k] = Scalar(k) / fs;
  g.energy.assign(r.section_count(), Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(T, 2 * half + 1));

  for (int n = 0; n < r.mode_count(); ++n) {
    const Vector<Scalar> freq = mode_if(r, n);
    for (std::size_t i = 0; i < r.section_count(); ++i) {
      const auto amp = instantaneous_amplitudes(r.pair(n, i));
      for (Index k = 0; k < T; ++k) {
        if (std::isnan(freq[k])) {
          g.skipped += 2;
          continue;
        }
        const Index up = g.bin_of(freq[k]), down = g.bin_of(-freq[k]);
        if (up >= 0 && up < g.freqs.size()) g.energy[i](k, up) += amp.r_plus[k];
        else ++g.skipped;
        if (down >= 0 && down < g.freqs.size()) g.energy[i](k, down) += amp.r_minus[k];
        else ++g.skipped;
      }
    }
  }
  return g;
}

/// Points (r_a cos s, r_b sin s) rotated by theta, s uniform on [0, 2 pi).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 2> sample_ellipse(Scalar r_a, Scalar r_b, Scalar theta, Index n_points) {
  if (r_b < 0 || r_a < r_b) throw InputError("sample_ellipse: need r_a >= r_b >= 0");
  if (n_points < 1) throw InputError("sample_ellipse: need at least one point");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> pts(n_points, 2);
  const Scalar c = std::cos(theta), s = std::sin(theta);
  for (Index k = 0; k < n_points; ++k) {
    const Scalar u = Scalar(2 * std::numbers::pi) * Scalar(k) / Scalar(n_points);
    const Scalar ex = r_a * std::cos(u), ey = r_b * std::sin(u);
    pts(k, 0) = c * ex - s * ey;
    pts(k, 1) = s * ex + c * ey;
  }
  return pts;
}

struct IOMSection {
  double axial_position = 0;
  double r_a = 0, r_b = 0, theta = 0;
  bool degenerate = false;  // inclination undefined (circle or vanishing orbit); theta set to 0
  Precession precession = Precession::degenerate;
  std::complex<double> orbit_point;    // z^f + z^b at the frame sample
  double initial_phase = 0;            // rotation phase of the initial phase point, a multiple of 2 pi
  double initial_phase_time = 0;       // s, when the rotation phase last crossed initial_phase
  std::vector<double> anchor_phases;   // initial_phase + j * anchor_step
  std::vector<std::complex<double>> anchors;
};

struct IOMFrame {
  double time = 0;
  Index sample = 0;
  int mode = 0;
  double anchor_step = 0;  // 2 pi / n_anchors
  std::vector<IOMSection> sections;
  // posture_lines[j] visits anchor j of every section in ascending axial order; (x, y, axial).
  std::vector<std::vector<Eigen::Vector3d>> posture_lines;
};

/// Instantaneous orbit map of mode n at `time`: one ellipse per section plus
/// posture lines through equally spaced anchors. Anchor j of a section is the
/// orbit point reached by advancing the rotation phase j * 2 pi / n_anchors
/// from the section's initial phase point, so anchors travel in that section's
/// own precession direction.
template <typename Scalar>
IOMFrame build_iom_frame(const MCVMDResult<Scalar>& r, int n, double time,
                         const std::vector<OrbitFeatureSeries<Scalar>>& features, int n_anchors = 8,
                         std::vector<double> axial_positions = {}) {
  detail::check_indices(r, n, 0, "build_iom_frame");
  const std::size_t K = r.section_count();
  if (features.size() != K) throw InputError("build_iom_frame: need one feature series per section");
  if (n_anchors < 1) throw InputError("build_iom_frame: n_anchors must be >= 1");
  if (axial_positions.empty()) {
    axial_positions.resize(K);
    std::iota(axial_positions.begin(), axial_positions.end(), 0.0);
  }
  if (axial_positions.size() != K) throw InputError("build_iom_frame: axial position count != section count");

  const double fs = double(r.sample_rate());
  const Index T = r.length();
  const double duration = double(T - 1) / fs;
  if (!(time >= 0.0 && time <= duration)) throw InputError("build_iom_frame: time outside the record");
  const Index k = std::clamp<Index>(static_cast<Index>(std::llround(time * fs)), 0, T - 1);
  constexpr double two_pi = 2 * std::numbers::pi;

  IOMFrame frame;
  frame.time = time;
  frame.sample = k;
  frame.mode = n;
  frame.anchor_step = two_pi / n_anchors;

  for (std::size_t i = 0; i < K; ++i) {
    const auto& f = features[i];
    if (f.size() != T) throw InputError("build_iom_frame: feature length mismatch");
    const auto& pair = r.pair(n, i);
    IOMSection s;
    s.axial_position = axial_positions[i];
    s.r_a = double(f.r_a[k]);
    s.r_b = double(f.r_b[k]);
    s.degenerate = std::isnan(f.theta[k]);
    s.theta = s.degenerate ? 0.0 : double(f.theta[k]);
    s.orbit_point = std::complex<double>(pair.forward[k] + pair.backward[k]);

    const double sdi_k = double(f.sdi[k]);
    const double rp = double(f.r_plus[k]), rm = double(f.r_minus[k]);
    const double sign = std::isnan(sdi_k) ? rp - rm : sdi_k;
    s.precession = sign > 0 ? Precession::forward : (sign < 0 ? Precession::backward : Precession::degenerate);

    // Rotation phase: forward phase, or the negated backward phase when the forward branch vanishes.
    const bool fwd_ok = !std::isnan(f.phi_f[k]);
    const bool bwd_ok = !std::isnan(f.phi_b[k]);
    const auto rotation = [&](Index m) {
      return fwd_ok ? double(f.phi_f[m]) : (bwd_ok ? -double(f.phi_b[m]) : 0.0);
    };
    const double phi_f = fwd_ok ? double(f.phi_f[k]) : 0.0;
    const double phi_b = bwd_ok ? double(f.phi_b[k]) : 0.0;
    const double psi = rotation(k);
    s.initial_phase = two_pi * std::floor(psi / two_pi);
    s.initial_phase_time = double(k) / fs;
    for (Index m = k; m > 0; --m) {
      const double a = rotation(m - 1), b = rotation(m);
      if (std::isnan(a)) break;
      if (a < s.initial_phase && b >= s.initial_phase) {
        s.initial_phase_time = (double(m - 1) + (s.initial_phase - a) / (b - a)) / fs;
        break;
      }
    }

    for (int j = 0; j < n_anchors; ++j) {
      const double advance = s.initial_phase - psi + j * frame.anchor_step;
      s.anchor_phases.push_back(s.initial_phase + j * frame.anchor_step);
      s.anchors.push_back(std::polar(rp, phi_f + advance) + std::polar(rm, phi_b - advance));
    }
    frame.sections.push_back(std::move(s));
  }

  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return axial_positions[a] < axial_positions[b]; });
  for (int j = 0; j < n_anchors; ++j) {
    std::vector<Eigen::Vector3d> line;
    for (std::size_t i : order) {
      const auto& s = frame.sections[i];
      line.emplace_back(s.anchors[j].real(), s.anchors[j].imag(), s.axial_position);
    }
    frame.posture_lines.push_back(std::move(line));
  }
  return frame;
}

}  // namespace mcvmd
