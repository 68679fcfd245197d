#ifndef HARVESTLAB_REGION_PLOT_HPP
#define HARVESTLAB_REGION_PLOT_HPP

/* Deterministic SVG rendering of entanglement-region slices: the
 * stationary-phase region underneath, the numerically established region
 * overlaid with transparency.  Pure string building, byte-stable for
 * identical inputs, no external references in the output.
 */

#include <cstdio>
#include <string>

#include "harvestlab/analysis.hpp"

namespace harvestlab::plot {

using analysis::RegionGrid;

struct PlotStyle {
  int cell_px = 4;                       // pixel size of one grid cell
  std::string sp_color = "#2ca02c";      // stationary-phase region (green)
  std::string numeric_color = "#1f77b4"; // numerical region overlay (blue)
  double overlay_alpha = 0.6;

  bool valid() const {
    return cell_px >= 1 && overlay_alpha > 0.0 && overlay_alpha <= 1.0;
  }
};

namespace detail {

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Fixed world axes c1 in [0, 6] (horizontal) and c2 in [0, 3] (vertical);
// one filled rect per true mask cell, centered on its grid point.
inline std::string render_region_svg(const RegionGrid& grid, const PlotStyle& style = {}) {
  if (!style.valid()) throw std::invalid_argument("invalid PlotStyle");
  using detail::num;
  using detail::px;

  const double c1_step =
      grid.c1_axis.size() >= 2 ? grid.c1_axis[1] - grid.c1_axis[0] : 0.1;
  const double c2_step =
      grid.c2_axis.size() >= 2 ? grid.c2_axis[1] - grid.c2_axis[0] : 0.1;
  const double sx = style.cell_px / c1_step;  // px per unit c1
  const double sy = style.cell_px / c2_step;  // px per unit c2

  const double plot_w = 6.0 * sx;
  const double plot_h = 3.0 * sy;
  const double left = 56.0, top = 34.0, right = 16.0, bottom = 68.0;
  // Canvas never narrower than the legend row.
  const double width = left + std::max(plot_w, 210.0) + right;
  const double height = top + plot_h + bottom;

  const auto x_px = [&](double c1) { return left + c1 * sx; };
  const auto y_px = [&](double c2) { return top + plot_h - c2 * sy; };

  std::string svg;
  svg.reserve(1 << 16);
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) +
         "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + " " +
         px(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + px(width) + "\" height=\"" + px(height) +
         "\" fill=\"#ffffff\"/>\n";

  const auto cell_rect = [&](std::size_t i1, std::size_t i2, const std::string& cls,
                             const std::string& fill, bool translucent) {
    const double c1 = grid.c1_axis[i1];
    const double c2 = grid.c2_axis[i2];
    std::string rect = "<rect class=\"" + cls + "\" x=\"" +
                       px(x_px(c1 - 0.5 * c1_step)) + "\" y=\"" +
                       px(y_px(c2 + 0.5 * c2_step)) + "\" width=\"" +
                       px(c1_step * sx) + "\" height=\"" + px(c2_step * sy) +
                       "\" fill=\"" + fill + "\"";
    if (translucent) rect += " fill-opacity=\"" + num(style.overlay_alpha) + "\"";
    rect += "/>\n";
    return rect;
  };

  // Stationary-phase region first, numerical overlay second.
  for (std::size_t i2 = 0; i2 < grid.c2_axis.size(); ++i2)
    for (std::size_t i1 = 0; i1 < grid.c1_axis.size(); ++i1)
      if (grid.sp_mask[grid.idx(i1, i2)])
        svg += cell_rect(i1, i2, "sp", style.sp_color, false);
  for (std::size_t i2 = 0; i2 < grid.c2_axis.size(); ++i2)
    for (std::size_t i1 = 0; i1 < grid.c1_axis.size(); ++i1)
      if (grid.numeric_mask[grid.idx(i1, i2)])
        svg += cell_rect(i1, i2, "num", style.numeric_color, true);

  // Frame and ticks.
  svg += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(plot_w) +
         "\" height=\"" + px(plot_h) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
  for (int v = 0; v <= 6; ++v) {
    const double x = x_px(v);
    svg += "<line x1=\"" + px(x) + "\" y1=\"" + px(top + plot_h) + "\" x2=\"" + px(x) +
           "\" y2=\"" + px(top + plot_h + 5) + "\" stroke=\"#000000\"/>\n";
    svg += "<text x=\"" + px(x) + "\" y=\"" + px(top + plot_h + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           std::to_string(v) + "</text>\n";
  }
  for (int v = 0; v <= 3; ++v) {
    const double y = y_px(v);
    svg += "<line x1=\"" + px(left - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(left) +
           "\" y2=\"" + px(y) + "\" stroke=\"#000000\"/>\n";
    svg += "<text x=\"" + px(left - 9) + "\" y=\"" + px(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
           std::to_string(v) + "</text>\n";
  }
  svg += "<text x=\"" + px(left + plot_w / 2) + "\" y=\"" + px(top + plot_h + 36) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">c1</text>\n";
  svg += "<text x=\"" + px(18.0) + "\" y=\"" + px(top + plot_h / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">c2</text>\n";
  svg += "<text x=\"" + px(left) + "\" y=\"" + px(20.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\">c3 = " + num(grid.c3) +
         "</text>\n";

  // Legend row at the bottom.
  const double lx = left, ly = top + plot_h + 46.0;
  svg += "<rect class=\"legend-sp\" x=\"" + px(lx) + "\" y=\"" + px(ly) +
         "\" width=\"12\" height=\"12\" fill=\"" + style.sp_color + "\"/>\n";
  svg += "<text x=\"" + px(lx + 16) + "\" y=\"" + px(ly + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\">stationary phase</text>\n";
  svg += "<rect class=\"legend-num\" x=\"" + px(lx + 118) + "\" y=\"" + px(ly) +
         "\" width=\"12\" height=\"12\" fill=\"" + style.numeric_color +
         "\" fill-opacity=\"" + num(style.overlay_alpha) + "\"/>\n";
  svg += "<text x=\"" + px(lx + 134) + "\" y=\"" + px(ly + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\">numerical</text>\n";

  svg += "</svg>\n";
  return svg;
}

}  // namespace harvestlab::plot

#endif  // HARVESTLAB_REGION_PLOT_HPP
