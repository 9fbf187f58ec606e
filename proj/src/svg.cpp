#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mcvmd::io {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// White -> orange -> dark red ramp for u in [0, 1].
std::string heat(double u) {
  u = std::clamp(u, 0.0, 1.0);
  int r, g, b;
  if (u < 0.5) {
    const double s = u / 0.5;
    r = 255, g = int(std::lround(245 - 110 * s)), b = int(std::lround(220 - 200 * s));
  } else {
    const double s = (u - 0.5) / 0.5;
    r = int(std::lround(255 - 125 * s)), g = int(std::lround(135 - 135 * s)), b = int(std::lround(20 - 20 * s));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
  return colors[k % 8];
}

struct Frame {
  double x0, y0, w, h;
  double px(double u) const { return x0 + u * w; }
  double py(double v) const { return y0 + (1 - v) * h; }
};

void axes_box(Svg& svg, const Frame& f) {
  svg.rect(f.x0, f.y0, f.w, f.h, "none", "stroke=\"#444\" stroke-width=\"1\"");
}

}  // namespace

Svg::Svg(double width, double height) : width_(width), height_(height) {}

void Svg::rect(double x, double y, double w, double h, const std::string& fill, const std::string& extra) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"" + fill + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
}

void Svg::line(double x1, double y1, double x2, double y2, const std::string& stroke, double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Svg::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width,
                   bool closed) {
  std::string p;
  for (const auto& [x, y] : pts) p += num(x) + "," + num(y) + " ";
  if (!p.empty()) p.pop_back();
  body_ += std::string(closed ? "<polygon" : "<polyline") + " points=\"" + p + "\" fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Svg::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill + "\"/>\n";
}

void Svg::text(double x, double y, const std::string& s, const std::string& anchor, double size) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

std::string Svg::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

std::string timefs_svg(const TimeFSGrid<double>& g, std::size_t section, const std::string& title) {
  const auto& E = g.energy.at(section);
  const Index T = E.rows(), F = E.cols();
  const Frame f{70, 40, 640, 400};
  Svg svg(760, 500);
  svg.text(f.x0 + f.w / 2, 24, title, "middle", 14);

  const Index cols = std::min<Index>(T, 480);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(cols, F);
  for (Index k = 0; k < T; ++k) {
    const Index c = k * cols / T;
    pooled.row(c) = pooled.row(c).cwiseMax(E.row(k));
  }
  const double peak = pooled.maxCoeff();
  const double cw = f.w / double(cols), ch = std::max(1.0, f.h / double(F));
  const double fmin = g.freqs[0], fmax = g.freqs[F - 1];
  for (Index c = 0; c < cols; ++c) {
    for (Index j = 0; j < F; ++j) {
      if (pooled(c, j) <= 0) continue;
      const double v = (g.freqs[j] - fmin) / (fmax - fmin);
      svg.rect(f.px(double(c) / double(cols)), f.py(v) - ch / 2, cw, ch, heat(pooled(c, j) / peak));
    }
  }
  axes_box(svg, f);

  // Signed frequency axis.
  std::string axis = "<g id=\"freq-axis\" data-min=\"" + label(fmin) + "\" data-max=\"" + label(fmax) + "\">\n";
  Svg ticks(0, 0);
  for (int q = 0; q <= 4; ++q) {
    const double v = q / 4.0;
    const double hz = fmin + v * (fmax - fmin);
    ticks.line(f.x0 - 5, f.py(v), f.x0, f.py(v), "#444");
    ticks.text(f.x0 - 8, f.py(v) + 4, label(hz), "end");
  }
  const std::string tick_doc = ticks.str();
  const auto open = tick_doc.find("fill=\"white\"/>\n") + 15;
  axis += tick_doc.substr(open, tick_doc.rfind("</svg>") - open) + "</g>\n";
  svg.line(f.x0, f.py(0.5), f.x0 + f.w, f.py(0.5), "#999", 0.5);
  svg.text(20, f.y0 + f.h / 2, "Hz", "middle");

  const double duration = T > 1 ? g.times[T - 1] * double(T) / double(T - 1) : 0;
  for (int q = 0; q <= 4; ++q) {
    const double u = q / 4.0;
    svg.line(f.px(u), f.y0 + f.h, f.px(u), f.y0 + f.h + 5, "#444");
    svg.text(f.px(u), f.y0 + f.h + 18, label(std::round(u * duration * 1e4) / 1e4), "middle");
  }
  svg.text(f.x0 + f.w / 2, f.y0 + f.h + 36, "time (s)", "middle");

  std::string doc = svg.str();
  doc.insert(doc.rfind("</svg>"), axis);
  return doc;
}

std::string iom_svg(const std::vector<IOMFrame>& frames, const std::vector<std::string>& labels) {
  const double panel_w = 520, panel_h = 360;
  Svg svg(panel_w, panel_h * double(std::max<std::size_t>(frames.size(), 1)));
  for (std::size_t p = 0; p < frames.size(); ++p) {
    const auto& fr = frames[p];
    const double top = panel_h * double(p);
    double reach = 1e-12, zmin = 0, zmax = 0;
    for (std::size_t i = 0; i < fr.sections.size(); ++i) {
      reach = std::max(reach, fr.sections[i].r_a);
      zmin = i ? std::min(zmin, fr.sections[i].axial_position) : fr.sections[i].axial_position;
      zmax = i ? std::max(zmax, fr.sections[i].axial_position) : fr.sections[i].axial_position;
    }
    const double span = std::max(zmax - zmin, 1e-12);
    const double scale = 70.0 / reach;
    // Shaft axis to the right; orbit x recedes along a 30 degree diagonal, orbit y up.
    const double cos30 = std::cos(std::numbers::pi / 6), sin30 = 0.5;
    auto project = [&](double x, double y, double z) {
      const double sx = 110 + (z - zmin) / span * 300 + 0.6 * scale * x * cos30;
      const double sy = top + 190 - scale * y - 0.6 * scale * x * sin30;
      return std::pair<double, double>{sx, sy};
    };

    svg.text(panel_w / 2, top + 24,
             "mode " + std::to_string(fr.mode + 1) + ", t = " + label(std::round(fr.time * 1e4) / 1e4) + " s", "middle",
             13);
    const auto a = project(0, 0, zmin), b = project(0, 0, zmax);
    svg.line(a.first - 30, a.second, b.first + 30, b.second, "#888", 0.8);

    for (std::size_t i = 0; i < fr.sections.size(); ++i) {
      const auto& s = fr.sections[i];
      const auto pts = sample_ellipse(s.r_a, s.r_b, s.theta, 96);
      std::vector<std::pair<double, double>> poly;
      for (Index k = 0; k < pts.rows(); ++k) poly.push_back(project(pts(k, 0), pts(k, 1), s.axial_position));
      svg.polyline(poly, palette(i), 1.5, true);
      const auto op = project(s.orbit_point.real(), s.orbit_point.imag(), s.axial_position);
      svg.circle(op.first, op.second, 3.5, "#000");
      const auto base = project(0, -reach * 1.25, s.axial_position);
      const std::string name = i < labels.size() ? labels[i] : "section" + std::to_string(i + 1);
      svg.text(base.first, base.second + 14, name + " (" + std::string(to_string(s.precession)) + ")", "middle", 10);
    }
    for (std::size_t j = 0; j < fr.posture_lines.size(); ++j) {
      std::vector<std::pair<double, double>> poly;
      for (const auto& q : fr.posture_lines[j]) poly.push_back(project(q.x(), q.y(), q.z()));
      svg.polyline(poly, j == 0 ? "#000" : "#777", j == 0 ? 1.4 : 0.7);
    }
  }
  return svg.str();
}

std::string modes_svg(const MCVMDResult<double>& r) {
  const std::size_t K = r.section_count();
  const int N = r.mode_count();
  const double row_h = 110, width = 760;
  Svg svg(width, row_h * double(N) * double(K) + 30);
  const Index T = r.length();
  std::size_t row = 0;
  for (int n = 0; n < N; ++n) {
    for (std::size_t i = 0; i < K; ++i, ++row) {
      const auto z = reconstruct_component(r, n, i);
      const Frame f{70, 20 + row_h * double(row), 660, row_h - 30};
      const double peak = std::max({z.samples().real().cwiseAbs().maxCoeff(), z.samples().imag().cwiseAbs().maxCoeff(), 1e-300});
      const Index stride = std::max<Index>(1, T / 1200);
      std::vector<std::pair<double, double>> xs, ys;
      for (Index k = 0; k < T; k += stride) {
        const double u = T > 1 ? double(k) / double(T - 1) : 0;
        xs.emplace_back(f.px(u), f.py(0.5 + 0.5 * z[k].real() / peak));
        ys.emplace_back(f.px(u), f.py(0.5 + 0.5 * z[k].imag() / peak));
      }
      axes_box(svg, f);
      svg.polyline(xs, palette(0), 0.8);
      svg.polyline(ys, palette(1), 0.8);
      svg.text(f.x0 + 4, f.y0 + 12,
               "mode " + std::to_string(n + 1) + " (" + label(std::round(r.center_freqs[n] * 100) / 100) + " Hz), " +
                   r.section_labels[i] + ": x blue, y red",
               "start", 10);
    }
  }
  return svg.str();
}

std::string orbits_svg(const MCVMDResult<double>& r) {
  const std::size_t K = r.section_count();
  const int N = r.mode_count();
  const double cell = 220;
  Svg svg(cell * double(K), cell * double(N));
  for (int n = 0; n < N; ++n) {
    for (std::size_t i = 0; i < K; ++i) {
      const auto z = reconstruct_component(r, n, i);
      const double peak = std::max(z.samples().cwiseAbs().maxCoeff(), 1e-300);
      const double cx = cell * (double(i) + 0.5), cy = cell * (double(n) + 0.5) + 8;
      const double s = (cell / 2 - 30) / peak;
      std::vector<std::pair<double, double>> poly;
      for (Index k = 0; k < z.size(); ++k) poly.emplace_back(cx + s * z[k].real(), cy - s * z[k].imag());
      svg.line(cx - cell / 2 + 20, cy, cx + cell / 2 - 20, cy, "#ccc", 0.5);
      svg.line(cx, cy - cell / 2 + 30, cx, cy + cell / 2 - 20, "#ccc", 0.5);
      svg.polyline(poly, palette(std::size_t(n)), 0.6);
      svg.text(cx, cell * double(n) + 16, "mode " + std::to_string(n + 1) + ", " + r.section_labels[i], "middle", 11);
    }
  }
  return svg.str();
}

}  // namespace mcvmd::io
