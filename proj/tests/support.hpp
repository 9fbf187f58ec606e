// Test-only oracles and helpers. Nothing here calls into the library's FFT path.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace testsupport {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

// O(L^2) DFT, X[m] = sum_n x[n] exp(-2 pi j m n / L).
inline VectorXcd naive_dft(const VectorXcd& x) {
  const Index L = x.size();
  VectorXcd out(L);
  for (Index m = 0; m < L; ++m) {
    cplx acc = 0;
    for (Index n = 0; n < L; ++n) acc += x[n] * std::polar(1.0, -2 * pi * double((m * n) % L) / double(L));
    out[m] = acc;
  }
  return out;
}

inline VectorXcd naive_idft(const VectorXcd& X) {
  const Index L = X.size();
  VectorXcd out(L);
  for (Index n = 0; n < L; ++n) {
    cplx acc = 0;
    for (Index m = 0; m < L; ++m) acc += X[m] * std::polar(1.0, 2 * pi * double((m * n) % L) / double(L));
    out[n] = acc / double(L);
  }
  return out;
}

// Keeps only bins whose signed frequency lies within +-half_width of any +-center.
inline VectorXcd band_mask(const VectorXcd& x, double fs, const std::vector<double>& signed_centers,
                           double half_width) {
  const Index L = x.size();
  VectorXcd X = naive_dft(x);
  for (Index m = 0; m < L; ++m) {
    const double f = (2 * m < L ? double(m) : double(m - L)) * fs / double(L);
    bool keep = false;
    for (double c : signed_centers) keep = keep || std::abs(f - c) <= half_width + 1e-9;
    if (!keep) X[m] = 0;
  }
  return naive_idft(X);
}

struct Interior {
  Index begin, end;
};

// Central fraction of a record (0.9 drops 5% at each end).
inline Interior interior(Index n, double keep = 0.9) {
  const Index drop = static_cast<Index>(std::llround(n * (1.0 - keep) / 2.0));
  return {drop, n - drop};
}

template <typename A, typename B>
double rel_l2(const A& est, const B& truth, Interior in) {
  const Index len = in.end - in.begin;
  return (est.segment(in.begin, len) - truth.segment(in.begin, len)).norm() / truth.segment(in.begin, len).norm();
}

// Clean terms of the simulated two-section record, written out independently
// of the generator. harmonic 1 -> 16 Hz term, harmonic 2 -> 32 Hz term.
inline cplx two_section_term(int section, int harmonic, double t) {
  using std::cos;
  const double w1 = 2 * pi * 16 * t, w2 = 2 * pi * 32 * t;
  if (section == 1 && harmonic == 1)
    return {(2 + 0.5 * cos(2.5 * pi * t)) * cos(w1), (2 + 0.8 * cos(5 * pi * t)) * cos(w1 + 5 * pi / 3)};
  if (section == 1 && harmonic == 2)
    return {(1.2 + 0.3 * cos(8 * pi * t)) * cos(w2), (1.4 + 0.53 * cos(6 * pi * t)) * cos(w2 + 2 * pi / 7)};
  if (section == 2 && harmonic == 1)
    return {(2.6 + 0.7 * cos(5 * pi * t)) * cos(w1), (2.8 + 0.6 * cos(10 * pi * t)) * cos(w1 + 3 * pi / 8)};
  return {(1.5 + 0.5 * cos(15 * pi * t)) * cos(w2), (1.7 + 0.33 * cos(10 * pi * t)) * cos(w2 + 12 * pi / 7)};
}

inline VectorXcd two_section_clean(int section, int harmonic, Index n, double fs) {
  VectorXcd v(n);
  for (Index k = 0; k < n; ++k) {
    const double t = double(k) / fs;
    v[k] = harmonic == 0 ? two_section_term(section, 1, t) + two_section_term(section, 2, t)
                         : two_section_term(section, harmonic, t);
  }
  return v;
}

// Forward / backward parts of a complex signal via the naive DFT sign split.
struct Split {
  VectorXcd forward, backward;
};

inline Split naive_split(const VectorXcd& p) {
  const Index L = p.size();
  const VectorXcd P = naive_dft(p);
  VectorXcd F = VectorXcd::Zero(L), B = VectorXcd::Zero(L);
  for (Index m = 0; m < L; ++m) {
    if (m == 0) F[m] = B[m] = P[m] / 2.0;
    else if (2 * m < L) F[m] = P[m];
    else B[m] = P[m];
  }
  return {naive_idft(F), naive_idft(B)};
}

// Least-squares conic fit a x^2 + b xy + c y^2 + d x + e y = 1; returns the
// major-axis angle in [0, pi).
inline double fitted_major_axis_angle(const VectorXcd& orbit) {
  const Index n = orbit.size();
  Eigen::MatrixXd A(n, 5);
  VectorXd rhs = VectorXd::Ones(n);
  for (Index k = 0; k < n; ++k) {
    const double x = orbit[k].real(), y = orbit[k].imag();
    A.row(k) << x * x, x * y, y * y, x, y;
  }
  const VectorXd q = A.colPivHouseholderQr().solve(rhs);
  // Quadratic form [[a, b/2], [b/2, c]]: the major axis is the eigenvector of the smaller eigenvalue.
  Eigen::Matrix2d M;
  M << q[0], q[1] / 2, q[1] / 2, q[2];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  const Eigen::Vector2d v = es.eigenvectors().col(0);
  double ang = std::atan2(v[1], v[0]);
  while (ang < 0) ang += pi;
  while (ang >= pi) ang -= pi;
  return ang;
}

inline double angle_distance_mod_pi(double a, double b) {
  double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

}  // namespace testsupport
