#include "sphere_servo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

namespace sphere_servo {
namespace {

constexpr int kMaxPoints = 2000;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Empty or flat ranges get a unit or padded span so the mapping stays finite.
  Range padded() const {
    if (!(lo <= hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
  }
};

struct Box {
  double x, y, w, h;
};

double map(double v, const Range& r, double a, double b) {
  return a + (v - r.lo) / (r.hi - r.lo) * (b - a);
}

std::string svg_open(int width, int height) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height);
}

std::string label(double x, double y, const std::string& text, const char* anchor = "start") {
  return fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"{}\">{}</text>\n", x, y,
                     anchor, text);
}

// Polylines broken at non-finite samples.
std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* colour) {
  std::string out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
                         colour, current);
      current.clear();
    }
  };
  for (const auto& [x, y] : pts) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      flush();
      continue;
    }
    current += fmt::format("{:.2f},{:.2f} ", x, y);
  }
  flush();
  return out;
}

std::size_t stride_for(std::size_t n) {
  return std::max<std::size_t>(1, n / kMaxPoints);
}

struct Series {
  const char* colour;
  std::function<double(const LogRecord&)> value;
};

std::string panel(const std::vector<LogRecord>& records, const Box& box, const std::string& title,
                  const std::vector<Series>& series, const Range& t_range, bool time_labels) {
  Range y_range;
  const std::size_t stride = stride_for(records.size());
  for (std::size_t i = 0; i < records.size(); i += stride) {
    for (const Series& s : series) y_range.add(s.value(records[i]));
  }
  y_range = y_range.padded();

  std::string out = fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      box.x, box.y, box.w, box.h);
  out += label(box.x + 4, box.y + 13, title);
  out += label(box.x - 4, box.y + 10, fmt::format("{:.3g}", y_range.hi), "end");
  out += label(box.x - 4, box.y + box.h, fmt::format("{:.3g}", y_range.lo), "end");
  if (y_range.lo < 0.0 && y_range.hi > 0.0) {
    const double y0 = map(0.0, y_range, box.y + box.h, box.y);
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#bbb\" "
        "stroke-dasharray=\"3,3\"/>\n",
        box.x, y0, box.x + box.w, y0);
  }
  if (time_labels) {
    out += label(box.x, box.y + box.h + 14, fmt::format("{:.3g}", t_range.lo), "middle");
    out += label(box.x + box.w, box.y + box.h + 14, fmt::format("{:.3g}", t_range.hi), "middle");
    out += label(box.x + box.w / 2, box.y + box.h + 14, "t [s]", "middle");
  }
  for (const Series& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < records.size(); i += stride) {
      const double v = s.value(records[i]);
      pts.emplace_back(map(records[i].t, t_range, box.x, box.x + box.w),
                       std::isfinite(v) ? map(v, y_range, box.y + box.h, box.y) : v);
    }
    out += polyline(pts, s.colour);
  }
  return out;
}

// Oblique view: inertial x to the right, y receding, altitude (-z) up.
std::pair<double, double> project(const Vec3& p) {
  constexpr double kDepth = 0.45;
  return {p.x() + kDepth * p.y(), -p.z() + kDepth * p.y()};
}

}  // namespace

std::string trajectory_svg(const std::vector<LogRecord>& records, int triad_count) {
  constexpr int kWidth = 800;
  constexpr int kHeight = 600;
  const Box box{60, 40, kWidth - 100, kHeight - 90};

  Range xr;
  Range yr;
  for (const LogRecord& r : records) {
    for (const Vec3& p : {r.p_B, r.p_T}) {
      const auto [px, py] = project(p);
      xr.add(px);
      yr.add(py);
    }
  }
  xr = xr.padded();
  yr = yr.padded();
  // Equal scale on both screen axes.
  const double scale = std::min(box.w / (xr.hi - xr.lo), box.h / (yr.hi - yr.lo));
  const double cx = 0.5 * (xr.lo + xr.hi);
  const double cy = 0.5 * (yr.lo + yr.hi);
  auto to_screen = [&](const Vec3& p) -> std::pair<double, double> {
    const auto [px, py] = project(p);
    return {box.x + box.w / 2 + (px - cx) * scale, box.y + box.h / 2 - (py - cy) * scale};
  };

  std::string out = svg_open(kWidth, kHeight);
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      box.x, box.y, box.w, box.h);
  out += label(box.x, 24, "vehicle (blue) and target (green); body axes x red, y green, z blue");
  out += label(box.x + box.w, box.y + box.h + 20,
               fmt::format("{:.3g} m per 100 px", 100.0 / scale), "end");

  const std::size_t stride = stride_for(records.size());
  std::vector<std::pair<double, double>> vehicle;
  std::vector<std::pair<double, double>> target;
  for (std::size_t i = 0; i < records.size(); i += stride) {
    vehicle.push_back(to_screen(records[i].p_B));
    target.push_back(to_screen(records[i].p_T));
  }
  out += polyline(target, "#2a9d3a");
  out += polyline(vehicle, "#1f5fbf");

  if (!records.empty() && triad_count > 0) {
    const double arm = 0.04 * std::max(box.w, box.h) / scale;
    const std::size_t every = std::max<std::size_t>(1, records.size() / static_cast<std::size_t>(triad_count));
    static constexpr const char* kAxisColours[3] = {"#d62728", "#2ca02c", "#1f77b4"};
    for (std::size_t i = 0; i < records.size(); i += every) {
      const LogRecord& r = records[i];
      if (!r.p_B.allFinite() || !r.R.allFinite()) continue;
      const auto [x0, y0] = to_screen(r.p_B);
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"#1f5fbf\"/>\n", x0, y0);
      const auto [tx, ty] = to_screen(r.p_T);
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"#2a9d3a\"/>\n", tx, ty);
      for (int a = 0; a < 3; ++a) {
        const auto [x1, y1] = to_screen(r.p_B + arm * r.R.col(a));
        out += fmt::format(
            "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
            "stroke-width=\"1.5\"/>\n",
            x0, y0, x1, y1, kAxisColours[a]);
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string error_series_svg(const std::vector<LogRecord>& records) {
  constexpr int kWidth = 800;
  constexpr int kPanelHeight = 110;
  constexpr int kGap = 26;
  constexpr int kTop = 30;
  const int height = kTop + 6 * (kPanelHeight + kGap) + 10;

  Range t_range;
  for (const LogRecord& r : records) t_range.add(r.t);
  if (!(t_range.lo < t_range.hi)) t_range = t_range.padded();

  auto component = [](Vec3 LogRecord::*field, int i) {
    return [field, i](const LogRecord& r) { return (r.*field)[i]; };
  };
  const char* red = "#d62728";
  const char* green = "#2ca02c";
  const char* blue = "#1f77b4";

  const std::vector<std::pair<std::string, std::vector<Series>>> panels = {
      {"||delta1||", {{blue, [](const LogRecord& r) { return r.delta1.norm(); }}}},
      {"delta2", {{blue, [](const LogRecord& r) { return r.delta2; }}}},
      {"||delta3|| [1/s]", {{blue, [](const LogRecord& r) { return r.delta3.norm(); }}}},
      {"w_d x,y,z [1/s]",
       {{red, component(&LogRecord::w_d, 0)},
        {green, component(&LogRecord::w_d, 1)},
        {blue, component(&LogRecord::w_d, 2)}}},
      {"rho_hat x,y,z [1/s^2]",
       {{red, component(&LogRecord::rho_hat, 0)},
        {green, component(&LogRecord::rho_hat, 1)},
        {blue, component(&LogRecord::rho_hat, 2)}}},
      {"r_hat [m]", {{blue, [](const LogRecord& r) { return r.r_hat; }}}},
  };

  std::string out = svg_open(kWidth, height);
  out += label(70, 18, "tracking errors and estimates");
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const Box box{70, static_cast<double>(kTop + static_cast<int>(i) * (kPanelHeight + kGap)),
                  kWidth - 100, kPanelHeight};
    out += panel(records, box, panels[i].first, panels[i].second, t_range, true);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sphere_servo
