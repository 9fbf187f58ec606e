#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcvmd/detail/parallel.hpp"
#include "mcvmd/series.hpp"
#include "mcvmd/spectral.hpp"

namespace mcvmd {

enum class InitScheme { uniform_spread, zero, octave, spectral_peaks };

inline std::string_view to_string(InitScheme s) {
  switch (s) {
    case InitScheme::uniform_spread: return "uniform-spread";
    case InitScheme::zero: return "zero";
    case InitScheme::octave: return "octave";
    case InitScheme::spectral_peaks: return "spectral-peaks";
  }
  return "?";
}

inline InitScheme parse_init_scheme(std::string_view name) {
  for (auto s : {InitScheme::uniform_spread, InitScheme::zero, InitScheme::octave, InitScheme::spectral_peaks}) {
    if (name == to_string(s)) return s;
  }
  throw InputError("unknown init scheme '" + std::string(name) +
                   "' (expected uniform-spread, zero, octave or spectral-peaks)");
}

/// Solver settings. The bandwidth penalty alpha multiplies (omega - omega_k)^2
/// with omega in rad/s, so for a fixed alpha the mode bandwidth in Hz does not
/// depend on the sample rate. alpha = 2e-4 puts the half-power half-width of a
/// mode filter near 8 Hz.
struct SolverConfig {
  int n_modes = 2;
  double alpha = 2e-4;
  double tau = 0.0;
  double tol = 1e-7;
  int max_iters = 500;
  InitScheme init_scheme = InitScheme::spectral_peaks;
  bool mirror = true;
  unsigned threads = 1;

  void validate() const {
    std::ostringstream os;
    if (n_modes < 1) os << "n_modes must be >= 1 (got " << n_modes << "); ";
    if (!(alpha > 0.0) || !std::isfinite(alpha)) os << "alpha must be positive (got " << alpha << "); ";
    if (!(tau >= 0.0) || !std::isfinite(tau)) os << "tau must be non-negative (got " << tau << "); ";
    if (!(tol > 0.0 && tol < 1.0)) os << "tol must lie in (0, 1) (got " << tol << "); ";
    if (max_iters < 1) os << "max_iters must be >= 1 (got " << max_iters << "); ";
    if (const auto msg = os.str(); !msg.empty()) throw InputError("SolverConfig: " + msg.substr(0, msg.size() - 2));
  }
};

/// Half-spectrum working set of the ADMM iteration. Column c of every matrix is
/// channel c; row m is the frequency bin m * fs / L, m = 0 .. L/2.
template <typename Scalar>
struct SolverState {
  Scalar sample_rate{};
  Index signal_length = 0;  // L, after mirror extension
  Vector<Scalar> freqs_hz;
  ComplexMatrix<Scalar> input_spectra;
  std::vector<ComplexMatrix<Scalar>> mode_spectra;
  ComplexMatrix<Scalar> multipliers;

  Index bins() const { return freqs_hz.size(); }
  Index channels() const { return input_spectra.cols(); }
  int modes() const { return static_cast<int>(mode_spectra.size()); }
};

template <typename Scalar>
struct ModeBank {
  std::vector<std::vector<RealSeries<Scalar>>> modes;  // [mode][channel]
  std::vector<double> center_freqs;                     // Hz, ascending
  int iterations_used = 0;
  double final_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<bool> degenerate;  // mode had zero energy at the last centroid update
  double imag_residue = 0.0;     // max |Im| / max |Re| after inverse transform
  // ||x_c - sum_k u_kc|| on the solver grid after each sweep, [iteration][channel].
  std::vector<std::vector<double>> residual_history;

  const RealSeries<Scalar>& mode(int k, Index c) const { return modes.at(k).at(c); }
  int mode_count() const { return static_cast<int>(modes.size()); }
  Index channel_count() const { return modes.empty() ? 0 : static_cast<Index>(modes.front().size()); }
};

namespace detail {

template <typename Scalar>
Vector<Scalar> mirror_extend(const Vector<Scalar>& x) {
  const Index T = x.size();
  const Index h = T / 2;
  Vector<Scalar> out(2 * T);
  out.head(h) = x.head(h).reverse();
  out.segment(h, T) = x;
  out.tail(T - h) = x.tail(T - h).reverse();
  return out;
}

// Real time series of length L whose non-negative spectrum is `half`.
template <typename Scalar>
ComplexVector<Scalar> complete_half_spectrum(const ComplexVector<Scalar>& half, Index L) {
  ComplexVector<Scalar> full = ComplexVector<Scalar>::Zero(L);
  full.head(half.size()) = half;
  for (Index m = 1; 2 * m < L; ++m) full[L - m] = std::conj(half[m]);
  return ifft<Scalar>(full);
}

template <typename Scalar>
Scalar wiener_gain(Scalar f_hz, double center_hz, double alpha) {
  const double dw = 2.0 * std::numbers::pi * (double(f_hz) - center_hz);
  return Scalar(1.0 / (1.0 + 2.0 * alpha * dw * dw));
}

// Energy of the real signal behind a half spectrum of a length-L transform, times L.
template <typename Scalar, typename Derived>
Scalar half_spectrum_energy(const Eigen::MatrixBase<Derived>& half, Index L) {
  Scalar e = std::norm(half[0]);
  for (Index m = 1; m < half.size(); ++m) e += (2 * m == L ? Scalar(1) : Scalar(2)) * std::norm(half[m]);
  return e;
}

}  // namespace detail

/// Builds the iteration state for C channels: optional mirror extension, then
/// the non-negative half of each channel's spectrum. Modes and multipliers start at zero.
template <typename Scalar>
SolverState<Scalar> make_solver_state(std::span<const RealSeries<Scalar>> channels, int n_modes, bool mirror = true) {
  if (channels.empty()) throw InputError("decompose: need at least one channel");
  const Index T = channels.front().size();
  const Scalar fs = channels.front().sample_rate();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].size() != T || channels[c].sample_rate() != fs) {
      std::ostringstream os;
      os << "decompose: channel " << c << " has length " << channels[c].size() << " at "
         << channels[c].sample_rate() << " Hz, expected " << T << " at " << fs << " Hz";
      throw InputError(os.str());
    }
  }
  if (n_modes < 1) throw InputError("decompose: n_modes must be >= 1");

  SolverState<Scalar> st;
  st.sample_rate = fs;
  st.signal_length = mirror ? 2 * T : T;
  const Index L = st.signal_length;
  const Index bins = L / 2 + 1;
  st.freqs_hz = Vector<Scalar>(bins);
  for (Index m = 0; m < bins; ++m) st.freqs_hz[m] = Scalar(m) * fs / Scalar(L);

  const Index C = static_cast<Index>(channels.size());
  st.input_spectra = ComplexMatrix<Scalar>(bins, C);
  for (Index c = 0; c < C; ++c) {
    const Vector<Scalar> x = mirror ? detail::mirror_extend<Scalar>(channels[c].samples()) : channels[c].samples();
    st.input_spectra.col(c) = detail::fft<Scalar>(x).head(bins);
  }
  st.mode_spectra.assign(n_modes, ComplexMatrix<Scalar>::Zero(bins, C));
  st.multipliers = ComplexMatrix<Scalar>::Zero(bins, C);
  return st;
}

/// Center-frequency initialization that needs no data. Returns Hz.
inline std::vector<double> init_center_freqs(InitScheme scheme, int n_modes, double fs) {
  if (n_modes < 1) throw InputError("init_center_freqs: n_modes must be >= 1");
  std::vector<double> w(n_modes);
  const double nyq = fs / 2;
  for (int k = 1; k <= n_modes; ++k) {
    switch (scheme) {
      case InitScheme::uniform_spread: w[k - 1] = (k - 0.5) * nyq / n_modes; break;
      case InitScheme::zero: w[k - 1] = 0.0; break;
      case InitScheme::octave: w[k - 1] = nyq * std::exp2(-(n_modes - k + 1)); break;
      case InitScheme::spectral_peaks:
        throw InputError("init_center_freqs: spectral-peaks needs input spectra");
    }
  }
  return w;
}

/// Initialization from the data: the n_modes strongest local maxima of the
/// channel-summed power spectrum, kept at least half a mode half-width apart.
/// Missing peaks are filled from the uniform spread. Returns Hz, ascending.
template <typename Scalar>
std::vector<double> init_center_freqs(InitScheme scheme, int n_modes, const SolverState<Scalar>& st, double alpha) {
  if (scheme != InitScheme::spectral_peaks) return init_center_freqs(scheme, n_modes, double(st.sample_rate));

  const Index bins = st.bins();
  const Vector<Scalar> power = st.input_spectra.cwiseAbs2().rowwise().sum();
  std::vector<Index> peaks;
  for (Index m = 1; m + 1 < bins; ++m) {
    if (power[m] > power[m - 1] && power[m] >= power[m + 1]) peaks.push_back(m);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](Index a, Index b) { return power[a] > power[b]; });

  const double df = double(st.sample_rate) / double(st.signal_length);
  const double half_width = 1.0 / (2.0 * std::numbers::pi * std::sqrt(2.0 * alpha));
  const double separation = std::max(2.0 * df, 0.5 * half_width);
  std::vector<double> picked;
  for (Index m : peaks) {
    if (static_cast<int>(picked.size()) == n_modes) break;
    const double f = double(st.freqs_hz[m]);
    if (std::all_of(picked.begin(), picked.end(), [&](double g) { return std::abs(f - g) >= separation; })) {
      picked.push_back(f);
    }
  }
  for (double f : init_center_freqs(InitScheme::uniform_spread, n_modes, double(st.sample_rate))) {
    if (static_cast<int>(picked.size()) == n_modes) break;
    picked.push_back(f);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

/// Wiener-filter mode update for mode k, channel c:
///   u_kc(w) = (x_c(w) - sum_{i != k} u_ic(w) + lambda_c(w) / 2) / (1 + 2 alpha (w - w_k)^2).
template <typename Scalar>
ComplexVector<Scalar> update_mode(const SolverState<Scalar>& st, int k, Index c, double center_hz, double alpha) {
  if (k < 0 || k >= st.modes() || c < 0 || c >= st.channels()) throw InputError("update_mode: index out of range");
  ComplexVector<Scalar> numer = st.input_spectra.col(c) + st.multipliers.col(c) / Scalar(2);
  for (int i = 0; i < st.modes(); ++i) {
    if (i != k) numer -= st.mode_spectra[i].col(c);
  }
  for (Index m = 0; m < st.bins(); ++m) numer[m] *= detail::wiener_gain(st.freqs_hz[m], center_hz, alpha);
  return numer;
}

struct CenterUpdate {
  double hz = 0.0;
  bool degenerate = false;  // zero energy: previous value was kept
};

/// Power-weighted mean frequency of mode k across all channels.
template <typename Scalar>
CenterUpdate update_center_freq(const SolverState<Scalar>& st, int k, double previous_hz) {
  if (k < 0 || k >= st.modes()) throw InputError("update_center_freq: mode index out of range");
  double num = 0.0, den = 0.0;
  for (Index c = 0; c < st.channels(); ++c) {
    for (Index m = 0; m < st.bins(); ++m) {
      const double p = double(std::norm(st.mode_spectra[k](m, c)));
      num += double(st.freqs_hz[m]) * p;
      den += p;
    }
  }
  if (!(den > 0.0)) return {previous_hz, true};
  return {num / den, false};
}

/// Dual ascent: lambda_c += tau (x_c - sum_k u_kc).
template <typename Scalar>
ComplexMatrix<Scalar> update_multiplier(const SolverState<Scalar>& st, double tau) {
  ComplexMatrix<Scalar> residual = st.input_spectra;
  for (const auto& u : st.mode_spectra) residual -= u;
  return st.multipliers + Scalar(tau) * residual;
}

/// Joint decomposition of C real channels into config.n_modes modes that share
/// one center frequency per mode. Modes come back sorted by ascending center
/// frequency. Hitting max_iters is not an error; check `converged`.
template <typename Scalar>
ModeBank<Scalar> decompose(std::span<const RealSeries<Scalar>> channels, const SolverConfig& config) {
  config.validate();
  for (const auto& ch : channels) {
    if (!detail::all_finite(ch.samples())) throw NumericalError("decompose: non-finite input");
  }
  SolverState<Scalar> st = make_solver_state(channels, config.n_modes, config.mirror);
  const int N = config.n_modes;
  const Index C = st.channels();
  const Index L = st.signal_length;

  std::vector<double> omega = init_center_freqs(config.init_scheme, N, st, config.alpha);
  std::vector<bool> degenerate(N, false);

  ModeBank<Scalar> bank;
  std::vector<double> change(C), energy(C);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  while (iter < config.max_iters) {
    ++iter;
    double worst = 0.0;
    for (int k = 0; k < N; ++k) {
      detail::parallel_for(static_cast<std::size_t>(C), config.threads, [&](std::size_t c) {
        ComplexVector<Scalar> next = update_mode(st, k, Index(c), omega[k], config.alpha);
        change[c] = double((next - st.mode_spectra[k].col(c)).squaredNorm());
        energy[c] = double(st.mode_spectra[k].col(c).squaredNorm());
        st.mode_spectra[k].col(c) = next;
      });
      const auto upd = update_center_freq(st, k, omega[k]);
      omega[k] = upd.hz;
      degenerate[k] = upd.degenerate;

      const double d = std::accumulate(change.begin(), change.end(), 0.0);
      const double e = std::accumulate(energy.begin(), energy.end(), 0.0);
      const double rel = e > 0.0 ? d / e : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      worst = std::max(worst, rel);
    }
    st.multipliers = update_multiplier(st, config.tau);

    std::vector<double> norms(C);
    for (Index c = 0; c < C; ++c) {
      ComplexVector<Scalar> r = st.input_spectra.col(c);
      for (const auto& u : st.mode_spectra) r -= u.col(c);
      norms[c] = std::sqrt(double(detail::half_spectrum_energy<Scalar>(r, L)) / double(L));
    }
    bank.residual_history.push_back(std::move(norms));

    residual = worst;
    if (residual < config.tol) break;
  }

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return omega[a] < omega[b]; });

  const Index T = channels.front().size();
  const Index offset = config.mirror ? T / 2 : 0;
  double max_re = 0.0, max_im = 0.0;
  for (int k : order) {
    std::vector<RealSeries<Scalar>> row;
    row.reserve(C);
    for (Index c = 0; c < C; ++c) {
      const ComplexVector<Scalar> full = detail::complete_half_spectrum<Scalar>(st.mode_spectra[k].col(c), L);
      max_re = std::max(max_re, double(full.real().cwiseAbs().maxCoeff()));
      max_im = std::max(max_im, double(full.imag().cwiseAbs().maxCoeff()));
      row.emplace_back(Vector<Scalar>(full.real().segment(offset, T)), st.sample_rate);
    }
    bank.modes.push_back(std::move(row));
    bank.center_freqs.push_back(omega[k]);
    bank.degenerate.push_back(degenerate[k]);
  }
  bank.iterations_used = iter;
  bank.final_residual = residual;
  bank.converged = residual < config.tol;
  bank.imag_residue = max_re > 0.0 ? max_im / max_re : max_im;
  return bank;
}

template <typename Scalar>
ModeBank<Scalar> decompose(const std::vector<RealSeries<Scalar>>& channels, const SolverConfig& config) {
  return decompose(std::span<const RealSeries<Scalar>>(channels), config);
}

}  // namespace mcvmd
