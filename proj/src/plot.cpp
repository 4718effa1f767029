#include "epr/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "epr/types.hpp"
#include "epr/util.hpp"

namespace epr {

namespace {

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void emit_plot_data(const std::array<double, 16>& empirical,
                    const std::array<double, 16>& target,
                    const std::string& csv_path, const std::string& svg_path,
                    const std::vector<std::string>& provenance) {
  {
    std::ofstream f(csv_path);
    if (!f) throw InputError("cannot open for writing: " + csv_path);
    for (const auto& line : provenance) f << "# " << line << "\n";
    f << "cell,empirical,target\n";
    for (int c = 0; c < 16; ++c) {
      f << cell_label(c) << ',' << format_double(empirical[c]) << ','
        << format_double(target[c]) << "\n";
    }
    if (!f) throw InputError("failed writing: " + csv_path);
  }

  const double width = 960, height = 420;
  const double ml = 56, mr = 16, mt = 28, mb = 64;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;
  double vmax = 0.0;
  for (int c = 0; c < 16; ++c) {
    vmax = std::max({vmax, empirical[c], target[c]});
  }
  if (vmax <= 0.0) vmax = 1.0;
  const double yscale = plot_h / (vmax * 1.08);
  const double group_w = plot_w / 16.0;
  const double bar_w = group_w * 0.34;

  std::ofstream f(svg_path);
  if (!f) throw InputError("cannot open for writing: " + svg_path);
  f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  for (const auto& line : provenance) f << "<!-- " << line << " -->\n";
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
    << height << "\">\n";
  f << "<rect width=\"" << width << "\" height=\"" << height
    << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << coord(ml) << "\" y=\"18\" font-family=\"sans-serif\" "
       "font-size=\"13\">empirical (dark) vs target (light), per "
       "(a,b,x,y) cell</text>\n";
  // y axis with 4 gridlines
  for (int t = 0; t <= 4; ++t) {
    const double val = vmax * 1.08 * t / 4.0;
    const double y = mt + plot_h - val * yscale;
    f << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(y) << "\" x2=\""
      << coord(width - mr) << "\" y2=\"" << coord(y)
      << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    f << "<text x=\"" << coord(ml - 6) << "\" y=\"" << coord(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
      << coord(val) << "</text>\n";
  }
  for (int c = 0; c < 16; ++c) {
    const double gx = ml + c * group_w;
    const double he = empirical[c] * yscale;
    const double ht = target[c] * yscale;
    f << "<rect x=\"" << coord(gx + group_w * 0.12) << "\" y=\""
      << coord(mt + plot_h - he) << "\" width=\"" << coord(bar_w)
      << "\" height=\"" << coord(he) << "\" fill=\"#1f4e79\"/>\n";
    f << "<rect x=\"" << coord(gx + group_w * 0.52) << "\" y=\""
      << coord(mt + plot_h - ht) << "\" width=\"" << coord(bar_w)
      << "\" height=\"" << coord(ht) << "\" fill=\"#9dc3e6\"/>\n";
    const std::string label = cell_label(c).substr(3);  // drop "ab="
    f << "<text x=\"" << coord(gx + group_w / 2) << "\" y=\""
      << coord(mt + plot_h + 14)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"9\">"
      << label.substr(0, 2) << "</text>\n";
    f << "<text x=\"" << coord(gx + group_w / 2) << "\" y=\""
      << coord(mt + plot_h + 26)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"9\">"
      << label.substr(6) << "</text>\n";
  }
  f << "<line x1=\"" << coord(ml) << "\" y1=\"" << coord(mt + plot_h)
    << "\" x2=\"" << coord(width - mr) << "\" y2=\"" << coord(mt + plot_h)
    << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  f << "</svg>\n";
  if (!f) throw InputError("failed writing: " + svg_path);
}

}  // namespace epr
