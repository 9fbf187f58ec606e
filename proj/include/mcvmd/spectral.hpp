#pragma once

#include <unsupported/Eigen/FFT>

#include <utility>

#include "mcvmd/series.hpp"

namespace mcvmd {

namespace detail {

// Unnormalized forward DFT, complex to complex.
template <typename Scalar>
ComplexVector<Scalar> fft(const ComplexVector<Scalar>& in) {
  Eigen::FFT<Scalar> engine;
  ComplexVector<Scalar> out(in.size());
  engine.fwd(out, in);
  return out;
}

template <typename Scalar>
ComplexVector<Scalar> fft(const Vector<Scalar>& in) {
  return fft<Scalar>(ComplexVector<Scalar>(in.template cast<std::complex<Scalar>>()));
}

// Inverse DFT scaled by 1/L.
template <typename Scalar>
ComplexVector<Scalar> ifft(const ComplexVector<Scalar>& in) {
  Eigen::FFT<Scalar> engine;
  ComplexVector<Scalar> out(in.size());
  engine.inv(out, in);
  return out;
}

enum class BinSign { zero, positive, negative, nyquist };

// Classifies DFT bin m of a length-L transform by the sign of its frequency.
inline BinSign bin_sign(Index m, Index length) {
  if (m == 0) return BinSign::zero;
  if (length % 2 == 0 && m == length / 2) return BinSign::nyquist;
  return 2 * m < length ? BinSign::positive : BinSign::negative;
}

// Signed frequency of DFT bin m in Hz (Nyquist reported as -fs/2).
template <typename Scalar>
Scalar bin_frequency(Index m, Index length, Scalar sample_rate) {
  const Index signed_m = (2 * m < length) ? m : m - length;
  return Scalar(signed_m) * sample_rate / Scalar(length);
}

}  // namespace detail

/// Analytic signal x + jH(x) by one-sided spectral filtering of the whole record.
/// DC and Nyquist bins pass unchanged, positive bins double, negative bins vanish.
/// The real part of the result is the input itself.
template <typename Scalar>
ComplexSeries<Scalar> hilbert_analytic(const RealSeries<Scalar>& x) {
  const Index L = x.size();
  ComplexVector<Scalar> spec = detail::fft<Scalar>(x.samples());
  for (Index m = 0; m < L; ++m) {
    switch (detail::bin_sign(m, L)) {
      case detail::BinSign::positive: spec[m] *= Scalar(2); break;
      case detail::BinSign::negative: spec[m] = Scalar(0); break;
      default: break;
    }
  }
  ComplexVector<Scalar> z = detail::ifft<Scalar>(spec);
  for (Index n = 0; n < L; ++n) z[n].real(x[n]);
  return {std::move(z), x.sample_rate()};
}

template <typename Scalar>
struct ForwardBackward {
  ComplexSeries<Scalar> forward;
  ComplexSeries<Scalar> backward;
};

/// Splits an orbit signal into its forward (positive-frequency) and backward
/// (negative-frequency) rotating parts. DC is shared half and half; the Nyquist
/// bin of even-length records belongs to the backward part.
template <typename Scalar>
ForwardBackward<Scalar> split_forward_backward(const ComplexSeries<Scalar>& p) {
  const Index L = p.size();
  const ComplexVector<Scalar> spec = detail::fft<Scalar>(p.samples());
  ComplexVector<Scalar> fwd = ComplexVector<Scalar>::Zero(L);
  ComplexVector<Scalar> bwd = ComplexVector<Scalar>::Zero(L);
  for (Index m = 0; m < L; ++m) {
    switch (detail::bin_sign(m, L)) {
      case detail::BinSign::zero:
        fwd[m] = spec[m] / Scalar(2);
        bwd[m] = spec[m] / Scalar(2);
        break;
      case detail::BinSign::positive: fwd[m] = spec[m]; break;
      case detail::BinSign::negative:
      case detail::BinSign::nyquist: bwd[m] = spec[m]; break;
    }
  }
  return {ComplexSeries<Scalar>(detail::ifft<Scalar>(fwd), p.sample_rate()),
          ComplexSeries<Scalar>(detail::ifft<Scalar>(bwd), p.sample_rate())};
}

template <typename Scalar>
struct RealProjections {
  RealSeries<Scalar> plus;   // Re of the forward part
  RealSeries<Scalar> minus;  // Re of the backward part
};

/// The two real channels a complex orbit signal contributes to the joint decomposition.
template <typename Scalar>
RealProjections<Scalar> real_projections(const ComplexSeries<Scalar>& p) {
  const auto parts = split_forward_backward(p);
  return {parts.forward.real(), parts.backward.real()};
}

}  // namespace mcvmd
