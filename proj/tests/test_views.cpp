#include "doctest.h"

#include "mcvmd/simulate.hpp"
#include "mcvmd/views.hpp"
#include "support.hpp"

using namespace mcvmd;
using namespace testsupport;

namespace {

constexpr double kFs = 1024.0;
constexpr Index kN = 1024;

ComplexSeriesd rotating(double radius, double f_hz, double phase) {
  VectorXcd z(kN);
  for (Index k = 0; k < kN; ++k) z[k] = std::polar(radius, 2 * pi * f_hz * k / kFs + phase);
  return {z, kFs};
}

// Result holding hand-made pairs: pairs[n][i].
MCVMDResult<double> result_of(std::vector<std::vector<ComplexIMFPair<double>>> pairs, std::vector<double> freqs) {
  MCVMDResult<double> r;
  r.pairs = std::move(pairs);
  r.center_freqs = std::move(freqs);
  for (std::size_t i = 0; i < r.pairs.front().size(); ++i) r.section_labels.push_back("s" + std::to_string(i + 1));
  return r;
}

std::vector<OrbitFeatureSeries<double>> features_of(const MCVMDResult<double>& r, int n) {
  std::vector<OrbitFeatureSeries<double>> f;
  for (std::size_t i = 0; i < r.section_count(); ++i) f.push_back(orbit_features(r, n, i));
  return f;
}

const MCVMDResult<double>& noiseless41() {
  static const auto r = mcvmd::mcvmd(simulate_two_section(1.0, 1024.0), SolverConfig{});
  return r;
}

}  // namespace

TEST_CASE("mode_if") {
  const auto in = interior(kN);
  SUBCASE("opposite branches of one section") {
    const auto r = result_of({{{rotating(1, 16, 0.2), rotating(0.5, -16, 1.0)}}}, {16});
    const VectorXd f = mode_if(r, 0);
    CHECK((f.array() - 16).abs().maxCoeff() < 1e-9);
  }
  SUBCASE("clean 16 Hz mode over two sections") {
    VectorXd x1(kN), y1(kN), x2(kN), y2(kN);
    for (Index k = 0; k < kN; ++k) {
      const double w = 2 * pi * 16 * k / kFs;
      x1[k] = 2 * std::cos(w), y1[k] = 1.2 * std::cos(w + 1.0);
      x2[k] = 1.5 * std::cos(w + 0.3), y2[k] = 2.5 * std::cos(w - 2.0);
    }
    const MultiSectionRecordd rec({{RealSeriesd(x1, kFs), RealSeriesd(y1, kFs)}, {RealSeriesd(x2, kFs), RealSeriesd(y2, kFs)}});
    SolverConfig cfg;
    cfg.n_modes = 1;
    // Mirror extension reverses the tone's phase at the record ends; the
    // resulting edge transient reaches about 8% into the record.
    const auto r = mcvmd::mcvmd(rec, cfg);
    const VectorXd f = mode_if(r, 0);
    const auto core = interior(kN, 0.8);
    for (Index k = core.begin; k < core.end; ++k) CHECK(std::abs(f[k] - 16) < 0.005 * 16);

    cfg.mirror = false;
    const VectorXd g = mode_if(mcvmd::mcvmd(rec, cfg), 0);
    for (Index k = in.begin; k < in.end; ++k) CHECK(std::abs(g[k] - 16) < 0.001 * 16);
  }
  SUBCASE("AM tone has a flat IF") {
    VectorXcd p(kN);
    for (Index k = 0; k < kN; ++k) {
      const double t = k / kFs;
      p[k] = std::polar(2 + 0.5 * std::cos(2.5 * pi * t), 2 * pi * 16 * t) +
             std::polar(1 + 0.3 * std::cos(5 * pi * t), -2 * pi * 16 * t + 0.4);
    }
    const auto r = result_of({{pair_from_split(ComplexSeriesd(p, kFs))}}, {16});
    const VectorXd f = mode_if(r, 0).segment(in.begin, in.end - in.begin);
    const double mean = f.mean();
    const double var = (f.array() - mean).square().mean();
    CHECK(var < 0.2 * 0.2);
    CHECK(mean == doctest::Approx(16).epsilon(1e-3));
  }
  SUBCASE("undefined everywhere") {
    const ComplexSeriesd zero(VectorXcd::Zero(kN), kFs);
    const auto r = result_of({{{rotating(1, 16, 0), zero}}, {{zero, zero}}}, {16, 40});
    CHECK(mode_if(r, 1).array().isNaN().all());
    CHECK_FALSE(mode_if(r, 0).array().isNaN().any());
    CHECK_THROWS_AS(mode_if(r, 2), InputError);
  }
}

TEST_CASE("phase_rate") {
  VectorXd phi(5);
  phi << 0.0, 1.0, 3.0, undefined_value<double>, 7.0;
  const VectorXd w = phase_rate<double>(phi, 2.0);
  CHECK(w[0] == 2.0);
  CHECK(w[1] == 3.0);
  CHECK(w[2] == 4.0);
  CHECK(std::isnan(w[3]));
  CHECK(std::isnan(w[4]));
}

TEST_CASE("time_fs: forward circle and conservation") {
  const ComplexSeriesd zero(VectorXcd::Zero(kN), kFs);
  SUBCASE("single forward circle sits on the positive half") {
    const auto r = result_of({{{rotating(1.5, 20, 0), zero}}}, {20});
    const auto g = time_fs(r);
    CHECK(g.resolution_hz == 1.0);
    CHECK(g.freqs.size() == 1025);
    CHECK(g.freqs[0] == -512);
    CHECK(g.freqs[1024] == 512);
    const Index zero_bin = g.bin_of(0.0);
    CHECK(g.energy[0].leftCols(zero_bin + 1).isZero(0));
    CHECK((g.energy[0].col(g.bin_of(20.0)).array() - 1.5).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("deposits conserve r_plus + r_minus and come in signed pairs") {
    const auto r = result_of({{{rotating(1.0, 30, 0.1), rotating(0.4, -30, 2.0)}}}, {30});
    const auto g = time_fs(r, 2.0);
    const auto a = instantaneous_amplitudes(r.pair(0, 0));
    const Index half = (g.freqs.size() - 1) / 2;
    for (Index k = 0; k < kN; ++k) {
      CHECK(g.energy[0].row(k).sum() == doctest::Approx(a.r_plus[k] + a.r_minus[k]).epsilon(1e-14));
      for (Index j = 1; j <= half; ++j) {
        CHECK((g.energy[0](k, half + j) > 0) == (g.energy[0](k, half - j) > 0));
      }
    }
    CHECK(g.skipped == 0);
  }
}

TEST_CASE("time_fs: two-section record") {
  const auto& r = noiseless41();
  const auto g = time_fs(r);
  REQUIRE(g.energy.size() == 2);
  CHECK((g.freqs.tail(g.freqs.size() - 1) - g.freqs.head(g.freqs.size() - 1)).minCoeff() > 0);
  const auto in = interior(kN);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(g.energy[i].minCoeff() >= 0);
    double worst = 1;
    for (Index k = in.begin; k < in.end; ++k) {
      double near = 0;
      for (double f : {-32.0, -16.0, 16.0, 32.0}) {
        for (Index j = g.bin_of(f - 1); j <= g.bin_of(f + 1); ++j) near += g.energy[i](k, j);
      }
      worst = std::min(worst, near / g.energy[i].row(k).sum());
    }
    CHECK(worst >= 0.9);
  }

  // Per-frame centroid of one mode's positive deposits recovers its IF within a bin.
  MCVMDResult<double> single = r;
  single.pairs = {r.pairs[0]};
  single.center_freqs = {r.center_freqs[0]};
  const auto g1 = time_fs(single);
  const VectorXd f = mode_if(r, 0);
  const Index half = (g1.freqs.size() - 1) / 2;
  for (Index k = in.begin; k < in.end; k += 7) {
    const VectorXd pos = g1.energy[0].row(k).tail(half).transpose();
    const double centroid = pos.dot(g1.freqs.tail(half)) / pos.sum();
    CHECK(std::abs(centroid - f[k]) <= g1.resolution_hz);
  }
}

TEST_CASE("sample_ellipse") {
  const auto c = sample_ellipse(1.0, 1.0, 0.7, 64);
  CHECK((c.rowwise().norm().array() - 1).abs().maxCoeff() < 1e-15);

  const auto seg = sample_ellipse(2.0, 0.0, 0.4, 32);
  for (Index k = 0; k < 32; ++k) CHECK(std::abs(seg(k, 1) * std::cos(0.4) - seg(k, 0) * std::sin(0.4)) < 1e-15);

  const double ra = 3.0, rb = 1.25, th = 2.1;
  const auto e = sample_ellipse(ra, rb, th, 100);
  double worst = 0;
  for (Index k = 0; k < 100; ++k) {
    const double u = e(k, 0) * std::cos(th) + e(k, 1) * std::sin(th);
    const double v = -e(k, 0) * std::sin(th) + e(k, 1) * std::cos(th);
    worst = std::max(worst, std::abs(u * u / (ra * ra) + v * v / (rb * rb) - 1));
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(sample_ellipse(1.0, 2.0, 0.0, 10), InputError);
}

TEST_CASE("build_iom_frame") {
  SUBCASE("identical sections give axial posture lines") {
    const auto z = rotating(2, 16, 0.3), b = rotating(0.7, -16, 1.1);
    const auto r = result_of({{{z, b}, {z, b}}}, {16});
    const auto frame = build_iom_frame(r, 0, 0.3, features_of(r, 0), 8, {0.0, 1.5});
    REQUIRE(frame.posture_lines.size() == 8);
    for (const auto& line : frame.posture_lines) {
      REQUIRE(line.size() == 2);
      CHECK((line[0].head<2>() - line[1].head<2>()).norm() < 1e-12);
      CHECK(line[0].z() == 0.0);
      CHECK(line[1].z() == 1.5);
    }
  }
  SUBCASE("stationary ellipse: anchor 0 is the orbit at the initial phase time") {
    const double w = 2 * pi * 16;
    const auto r = result_of({{{rotating(2, 16, 0.3), rotating(0.7, -16, 1.1)}}}, {16});
    const auto frame = build_iom_frame(r, 0, 0.4, features_of(r, 0), 6);
    const auto& s = frame.sections[0];
    const double t0 = s.initial_phase_time;
    CHECK(t0 <= 0.4);
    CHECK(t0 > 0.4 - 1.0 / 16);
    CHECK(w * t0 + 0.3 == doctest::Approx(s.initial_phase).epsilon(1e-9));
    const cplx expected = std::polar(2.0, w * t0 + 0.3) + std::polar(0.7, -w * t0 + 1.1);
    CHECK(std::abs(s.anchors[0] - expected) < 1e-9);
    // Anchor j is the orbit j / 6 of a period later.
    const double tj = t0 + 2.0 / 6 / 16;
    CHECK(std::abs(s.anchors[2] - (std::polar(2.0, w * tj + 0.3) + std::polar(0.7, -w * tj + 1.1))) < 1e-9);
  }
  SUBCASE("opposite precession advances in opposite directions") {
    const ComplexSeriesd zero(VectorXcd::Zero(kN), kFs);
    const auto r = result_of({{{rotating(1, 16, 0.5), zero}, {zero, rotating(1, -16, 0.5)}}}, {16});
    const auto frame = build_iom_frame(r, 0, 0.25, features_of(r, 0), 8);
    CHECK(frame.sections[0].precession == Precession::forward);
    CHECK(frame.sections[1].precession == Precession::backward);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& a = frame.sections[i].anchors;
      const double sign = i == 0 ? 1.0 : -1.0;
      for (std::size_t j = 1; j < a.size(); ++j) {
        CHECK(std::arg(a[j] / a[j - 1]) == doctest::Approx(sign * 2 * pi / 8).epsilon(1e-9));
      }
    }
    CHECK(frame.sections[0].degenerate);  // a circle has no inclination
  }
  SUBCASE("two-section record at 155.3 ms") {
    const auto& r = noiseless41();
    for (int n = 0; n < 2; ++n) {
      const auto feats = features_of(r, n);
      const auto frame = build_iom_frame(r, n, 0.1553, feats, 12);
      CHECK(frame.sample == 159);
      CHECK(frame.anchor_step == 2 * pi / 12);
      for (std::size_t i = 0; i < 2; ++i) {
        const auto& s = frame.sections[i];
        CHECK(s.r_a == feats[i].r_a[159]);
        CHECK(s.r_b == feats[i].r_b[159]);
        CHECK(s.theta == feats[i].theta[159]);
        CHECK(s.orbit_point == reconstruct_component(r, n, i)[159]);
        REQUIRE(s.anchor_phases.size() == 12);
        for (std::size_t j = 1; j < 12; ++j) {
          CHECK(s.anchor_phases[j] - s.anchor_phases[j - 1] == doctest::Approx(frame.anchor_step).epsilon(1e-12));
        }
        CHECK(std::fmod(s.initial_phase, 2 * pi) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(s.initial_phase_time <= frame.time);
        CHECK(s.initial_phase_time > frame.time - 1.0 / 16.0);
        // Anchors lie on the frame's instantaneous ellipse.
        for (const auto& a : s.anchors) {
          const double u = a.real() * std::cos(s.theta) + a.imag() * std::sin(s.theta);
          const double v = -a.real() * std::sin(s.theta) + a.imag() * std::cos(s.theta);
          CHECK(u * u / (s.r_a * s.r_a) + v * v / (s.r_b * s.r_b) == doctest::Approx(1.0).epsilon(1e-9));
        }
      }
      CHECK(frame.sections[0].precession == (n == 0 ? Precession::forward : Precession::backward));
      CHECK(frame.sections[1].precession == (n == 0 ? Precession::backward : Precession::forward));
    }
    CHECK_THROWS_AS(build_iom_frame(r, 0, 2.0, features_of(r, 0)), InputError);
    CHECK_THROWS_AS(build_iom_frame(r, 0, 0.1, features_of(r, 0), 0), InputError);
    CHECK_THROWS_AS(build_iom_frame(r, 0, 0.1, features_of(r, 0), 8, {1.0}), InputError);
  }
}
