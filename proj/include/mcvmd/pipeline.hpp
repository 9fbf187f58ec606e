#pragma once

#include <string>
#include <vector>

#include "mcvmd/mvmd.hpp"
#include "mcvmd/spectral.hpp"

namespace mcvmd {

/// Forward and backward complex IMF of one mode at one bearing section.
/// `forward` spins counter-clockwise (positive spectrum), `backward` clockwise.
template <typename Scalar>
struct ComplexIMFPair {
  ComplexSeries<Scalar> forward;
  ComplexSeries<Scalar> backward;

  ComplexSeries<Scalar> component() const { return {forward.samples() + backward.samples(), forward.sample_rate()}; }
};

/// Pair made directly from a complex orbit signal by the spectral split, with
/// no decomposition. Useful for single-component data.
template <typename Scalar>
ComplexIMFPair<Scalar> pair_from_split(const ComplexSeries<Scalar>& p) {
  auto parts = split_forward_backward(p);
  return {std::move(parts.forward), std::move(parts.backward)};
}

template <typename Scalar>
struct MCVMDResult {
  std::vector<std::vector<ComplexIMFPair<Scalar>>> pairs;  // [mode][section]
  std::vector<double> center_freqs;                        // Hz, ascending
  std::vector<std::string> section_labels;
  SolverConfig config_used;
  ModeBank<Scalar> bank;  // real channels [p1+, p1-, p2+, p2-, ...] per mode

  int mode_count() const { return static_cast<int>(pairs.size()); }
  std::size_t section_count() const { return section_labels.size(); }
  Scalar sample_rate() const { return pairs.front().front().forward.sample_rate(); }
  Index length() const { return pairs.front().front().forward.size(); }
  const ComplexIMFPair<Scalar>& pair(int n, std::size_t i) const { return pairs.at(n).at(i); }
};

namespace detail {

template <typename Scalar>
void check_indices(const MCVMDResult<Scalar>& r, int n, std::size_t i, const char* who) {
  if (n < 0 || n >= r.mode_count() || i >= r.section_count()) {
    throw InputError(std::string(who) + ": index out of range (mode " + std::to_string(n) + " of " +
                     std::to_string(r.mode_count()) + ", section " + std::to_string(i) + " of " +
                     std::to_string(r.section_count()) + ")");
  }
}

}  // namespace detail

/// Complex-signal decomposition of a multi-section record:
/// p_i = x_i + j y_i, split into forward and backward parts, and the real parts
/// of all 2K branches decomposed jointly so every mode has a single center
/// frequency shared by all sections and both rotation directions. The complex
/// IMFs are z^f = x+ + jH(x+) and z^b = conj(x- + jH(x-)).
template <typename Scalar>
MCVMDResult<Scalar> mcvmd(const MultiSectionRecord<Scalar>& record, const SolverConfig& config) {
  const std::size_t K = record.section_count();
  if (K == 0) throw InputError("mcvmd: record has no sections");

  std::vector<RealSeries<Scalar>> channels;
  channels.reserve(2 * K);
  for (const auto& s : record.sections()) {
    auto proj = real_projections(make_complex(s.x, s.y));
    channels.push_back(std::move(proj.plus));
    channels.push_back(std::move(proj.minus));
  }

  MCVMDResult<Scalar> out{{}, {}, record.labels(), config, decompose(channels, config)};
  out.center_freqs = out.bank.center_freqs;
  for (int n = 0; n < out.bank.mode_count(); ++n) {
    std::vector<ComplexIMFPair<Scalar>> row;
    row.reserve(K);
    for (std::size_t i = 0; i < K; ++i) {
      auto zf = hilbert_analytic(out.bank.mode(n, Index(2 * i)));
      auto zb = hilbert_analytic(out.bank.mode(n, Index(2 * i + 1)));
      row.push_back({std::move(zf), ComplexSeries<Scalar>(zb.samples().conjugate(), zb.sample_rate())});
    }
    out.pairs.push_back(std::move(row));
  }
  return out;
}

/// Single-mode orbit signal z^f + z^b of mode n at section i.
template <typename Scalar>
ComplexSeries<Scalar> reconstruct_component(const MCVMDResult<Scalar>& r, int n, std::size_t i) {
  detail::check_indices(r, n, i, "reconstruct_component");
  return r.pair(n, i).component();
}

/// Full orbit signal of section i: the sum of all mode components.
template <typename Scalar>
ComplexSeries<Scalar> reconstruct_section(const MCVMDResult<Scalar>& r, std::size_t i) {
  detail::check_indices(r, 0, i, "reconstruct_section");
  ComplexVector<Scalar> sum = ComplexVector<Scalar>::Zero(r.length());
  for (int n = 0; n < r.mode_count(); ++n) sum += r.pair(n, i).forward.samples() + r.pair(n, i).backward.samples();
  return {std::move(sum), r.sample_rate()};
}

}  // namespace mcvmd
