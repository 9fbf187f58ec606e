#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcvmd/errors.hpp"

namespace mcvmd {

using Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
  for (Index n = 0; n < v.size(); ++n) {
    const auto s = v.derived().coeff(n);
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    } else {
      if (!std::isfinite(s)) return false;
    }
  }
  return true;
}

template <typename Scalar, typename Derived>
void check_series(const Eigen::DenseBase<Derived>& samples, Scalar sample_rate, const char* kind) {
  if (samples.size() < 2) {
    std::ostringstream os;
    os << kind << ": need at least 2 samples, got " << samples.size();
    throw InputError(os.str());
  }
  if (!(sample_rate > Scalar(0)) || !std::isfinite(sample_rate)) {
    std::ostringstream os;
    os << kind << ": sample rate must be positive and finite, got " << sample_rate;
    throw InputError(os.str());
  }
  if (!all_finite(samples)) {
    throw NumericalError(std::string(kind) + ": samples must be finite");
  }
}

}  // namespace detail

/// Uniformly sampled real signal. Sample n sits at t = n / sample_rate.
template <typename Scalar>
class RealSeries {
 public:
  using value_type = Scalar;

  RealSeries(Vector<Scalar> samples, Scalar sample_rate)
      : samples_(std::move(samples)), sample_rate_(sample_rate) {
    detail::check_series(samples_, sample_rate_, "RealSeries");
  }

  const Vector<Scalar>& samples() const { return samples_; }
  Scalar sample_rate() const { return sample_rate_; }
  Index size() const { return samples_.size(); }
  Scalar operator[](Index n) const { return samples_[n]; }
  Scalar time(Index n) const { return Scalar(n) / sample_rate_; }

 private:
  Vector<Scalar> samples_;
  Scalar sample_rate_;
};

/// Uniformly sampled complex signal (orbit signal x + jy, analytic signals, complex IMFs).
template <typename Scalar>
class ComplexSeries {
 public:
  using value_type = std::complex<Scalar>;

  ComplexSeries(ComplexVector<Scalar> samples, Scalar sample_rate)
      : samples_(std::move(samples)), sample_rate_(sample_rate) {
    detail::check_series(samples_, sample_rate_, "ComplexSeries");
  }

  const ComplexVector<Scalar>& samples() const { return samples_; }
  Scalar sample_rate() const { return sample_rate_; }
  Index size() const { return samples_.size(); }
  std::complex<Scalar> operator[](Index n) const { return samples_[n]; }
  Scalar time(Index n) const { return Scalar(n) / sample_rate_; }

  RealSeries<Scalar> real() const { return {samples_.real(), sample_rate_}; }
  RealSeries<Scalar> imag() const { return {samples_.imag(), sample_rate_}; }

 private:
  ComplexVector<Scalar> samples_;
  Scalar sample_rate_;
};

/// The two perpendicular probe series of one bearing section.
template <typename Scalar>
struct SectionProbes {
  RealSeries<Scalar> x;
  RealSeries<Scalar> y;
};

/// K bearing sections sharing one sample rate and one length.
template <typename Scalar>
class MultiSectionRecord {
 public:
  MultiSectionRecord(std::vector<SectionProbes<Scalar>> sections, std::vector<std::string> labels = {})
      : sections_(std::move(sections)), labels_(std::move(labels)) {
    if (sections_.empty()) throw InputError("MultiSectionRecord: need at least one section");
    const auto n = sections_.front().x.size();
    const auto fs = sections_.front().x.sample_rate();
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      for (const auto* s : {&sections_[i].x, &sections_[i].y}) {
        if (s->size() != n || s->sample_rate() != fs) {
          std::ostringstream os;
          os << "MultiSectionRecord: section " << i + 1 << " has length " << s->size() << " at "
             << s->sample_rate() << " Hz, expected length " << n << " at " << fs << " Hz";
          throw InputError(os.str());
        }
      }
    }
    if (labels_.empty()) {
      for (std::size_t i = 0; i < sections_.size(); ++i) labels_.push_back("section" + std::to_string(i + 1));
    }
    if (labels_.size() != sections_.size()) {
      throw InputError("MultiSectionRecord: label count does not match section count");
    }
  }

  std::size_t section_count() const { return sections_.size(); }
  Index length() const { return sections_.front().x.size(); }
  Scalar sample_rate() const { return sections_.front().x.sample_rate(); }
  const SectionProbes<Scalar>& section(std::size_t i) const { return sections_.at(i); }
  const std::vector<SectionProbes<Scalar>>& sections() const { return sections_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<SectionProbes<Scalar>> sections_;
  std::vector<std::string> labels_;
};

/// p[n] = x[n] + j y[n].
template <typename Scalar>
ComplexSeries<Scalar> make_complex(const RealSeries<Scalar>& x, const RealSeries<Scalar>& y) {
  if (x.size() != y.size() || x.sample_rate() != y.sample_rate()) {
    std::ostringstream os;
    os << "make_complex: x has length " << x.size() << " at " << x.sample_rate() << " Hz but y has length "
       << y.size() << " at " << y.sample_rate() << " Hz";
    throw InputError(os.str());
  }
  ComplexVector<Scalar> p(x.size());
  for (Index n = 0; n < x.size(); ++n) p[n] = {x[n], y[n]};
  return {std::move(p), x.sample_rate()};
}

using RealSeriesd = RealSeries<double>;
using ComplexSeriesd = ComplexSeries<double>;
using MultiSectionRecordd = MultiSectionRecord<double>;

}  // namespace mcvmd
