#pragma once

#include <string>
#include <vector>

#include "mcvmd/views.hpp"

namespace mcvmd::io {

/// Minimal SVG document builder. Coordinates are written with two decimals.
class Svg {
 public:
  Svg(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& extra = "");
  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.0,
                bool closed = false);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& s, const std::string& anchor = "start", double size = 11.0);

  std::string str() const;

 private:
  double width_, height_;
  std::string body_;
};

/// Heat map of one section's Time-FS grid with a signed frequency axis
/// spanning [-fs/2, fs/2].
std::string timefs_svg(const TimeFSGrid<double>& g, std::size_t section, const std::string& title);

/// Axonometric view of IOM frames: ellipses stacked along the shaft axis,
/// orbit points and posture lines. One panel per frame.
std::string iom_svg(const std::vector<IOMFrame>& frames, const std::vector<std::string>& labels);

/// Real parts of every mode component, one row per (mode, section).
std::string modes_svg(const MCVMDResult<double>& r);

/// Orbit (Re, Im) of every mode component, one panel per (mode, section).
std::string orbits_svg(const MCVMDResult<double>& r);

}  // namespace mcvmd::io
