#include "polab/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

namespace polab {
namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> xy;
};

constexpr int kWidth = 720;
constexpr int kHeight = 360;
constexpr int kMargin = 48;

void write_svg(const std::string& path, const std::string& title,
               const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.xy) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin < xmax)) xmax = xmin + 1.0;
  if (!(ymin < ymax)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto sx = [&](double x) {
    return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
  };
  const auto sy = [&](double y) {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  };

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open chart file: " + path);
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
    << kHeight << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n";
  f << "<rect width='100%' height='100%' fill='white'/>\n";
  f << "<text x='" << kWidth / 2 << "' y='20' text-anchor='middle' "
    << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  // Axes.
  f << "<line x1='" << kMargin << "' y1='" << kHeight - kMargin << "' x2='"
    << kWidth - kMargin << "' y2='" << kHeight - kMargin
    << "' stroke='black' stroke-width='1'/>\n";
  f << "<line x1='" << kMargin << "' y1='" << kMargin << "' x2='" << kMargin
    << "' y2='" << kHeight - kMargin << "' stroke='black' stroke-width='1'/>\n";
  f << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
    << "' text-anchor='middle' font-family='sans-serif' font-size='11'>step</text>\n";
  // Axis extremes.
  f << "<text x='" << kMargin - 4 << "' y='" << sy(ymin)
    << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << ymin
    << "</text>\n";
  f << "<text x='" << kMargin - 4 << "' y='" << sy(ymax)
    << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << ymax
    << "</text>\n";

  int legend_y = kMargin;
  for (const auto& s : series) {
    if (s.xy.empty()) continue;
    f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
    for (const auto& [x, y] : s.xy) f << sx(x) << ',' << sy(y) << ' ';
    f << "'/>\n";
    f << "<text x='" << kWidth - kMargin - 4 << "' y='" << legend_y
      << "' text-anchor='end' font-family='sans-serif' font-size='11' fill='"
      << s.color << "'>" << s.label << "</text>\n";
    legend_y += 14;
  }
  f << "</svg>\n";
}

Series collect(const Trajectory& traj, const std::string& label,
               const std::string& color,
               const std::function<std::optional<double>(const TrajectoryPoint&)>& get) {
  Series s{label, color, {}};
  for (const auto& p : traj.points) {
    const auto v = get(p);
    if (v && std::isfinite(*v)) s.xy.emplace_back(static_cast<double>(p.step), *v);
  }
  return s;
}

}  // namespace

bool write_charts(const Trajectory& traj, const std::string& stem) {
  try {
    write_svg(stem + "_likelihoods.svg", "likelihoods over steps",
              {collect(traj, "z_w", "#1f77b4",
                       [](const TrajectoryPoint& p) { return std::optional(p.z_w); }),
               collect(traj, "z_l", "#d62728",
                       [](const TrajectoryPoint& p) { return std::optional(p.z_l); })});
    write_svg(stem + "_margin.svg", "margin over steps",
              {collect(traj, "margin", "#2ca02c", [](const TrajectoryPoint& p) {
                return std::optional(p.margin);
              })});
    write_svg(
        stem + "_band.svg", "band vs realized log ratio",
        {collect(traj, "band_lo", "#9467bd",
                 [](const TrajectoryPoint& p) { return p.band_lo; }),
         collect(traj, "band_hi", "#9467bd",
                 [](const TrajectoryPoint& p) { return p.band_hi; }),
         collect(traj, "log_r", "#ff7f0e",
                 [](const TrajectoryPoint& p) { return p.log_r; }),
         collect(traj, "log_r_star", "#7f7f7f",
                 [](const TrajectoryPoint& p) { return p.log_r_star; })});
    return true;
  } catch (const std::exception& e) {
    std::cerr << "chart emission failed (run unaffected): " << e.what() << "\n";
    return false;
  }
}

}  // namespace polab
