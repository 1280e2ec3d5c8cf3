#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "stride_lab/errors.hpp"
#include "stride_lab/metrics.hpp"
#include "stride_lab/model.hpp"
#include "stride_lab/terrain.hpp"

namespace stride_lab::bench {

/// Shortest decimal string that parses back to exactly `v`.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline constexpr std::string_view kStepsHeader =
    "step_index,t_touchdown_s,vx_cmd_mps,vy_cmd_mps,vx_avg_mps,vy_avg_mps,plan_x_m,plan_y_m,"
    "raibert_dx_m,raibert_dy_m,gap_shift_m,foot_x_m,foot_y_m,positive_work_j,fell";

[[nodiscard]] inline std::string steps_csv(const EpisodeLog& log) {
  std::string out(kStepsHeader);
  out += '\n';
  for (const auto& s : log.steps) {
    const double cols[] = {s.t_touchdown,          s.v_desired.x,         s.v_desired.y,
                           s.v_step_avg.x,         s.v_step_avg.y,        s.plan.target.x,
                           s.plan.target.y,        s.plan.raibert_offset.x, s.plan.raibert_offset.y,
                           s.plan.gap_shift,       s.executed_foot.x,     s.executed_foot.y,
                           s.positive_work};
    out += std::to_string(s.step_index);
    for (double c : cols) {
      out += ',';
      out += format_double(c);
    }
    out += s.fell ? ",1\n" : ",0\n";
  }
  return out;
}

struct SummaryRow {
  std::string metric;
  std::string value;
  std::string units;
};

class Summary {
 public:
  void add(std::string metric, double value, std::string units) {
    rows_.push_back({std::move(metric), format_double(value), std::move(units)});
  }
  void add_text(std::string metric, std::string value, std::string units = "") {
    rows_.push_back({std::move(metric), std::move(value), std::move(units)});
  }
  [[nodiscard]] const std::vector<SummaryRow>& rows() const { return rows_; }

  [[nodiscard]] const SummaryRow* find(std::string_view metric) const {
    for (const auto& r : rows_) {
      if (r.metric == metric) return &r;
    }
    return nullptr;
  }

  [[nodiscard]] std::string csv() const {
    std::string out = "metric,value,units\n";
    for (const auto& r : rows_) out += r.metric + ',' + r.value + ',' + r.units + '\n';
    return out;
  }

 private:
  std::vector<SummaryRow> rows_;
};

/// Generic CSV: header line plus rows of pre-formatted cells.
[[nodiscard]] inline std::string csv_table(std::string_view header,
                                           const std::vector<std::vector<std::string>>& rows) {
  std::string out(header);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

namespace svg {

inline std::string fx(double v) {
  if (!std::isfinite(v)) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  return s == "-0.00" ? "0.00" : s;
}

/// Maps data ranges onto a plot area with a fixed margin.
struct Frame {
  double width = 640, height = 400, margin = 40;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  [[nodiscard]] double px(double x) const {
    return margin + (x - x0) / (x1 - x0) * (width - 2 * margin);
  }
  [[nodiscard]] double py(double y) const {
    return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
  }
};

inline std::string header(const Frame& f, std::string_view title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fx(f.width) +
       "\" height=\"" + fx(f.height) + "\">\n";
  s += "<title>" + std::string(title) + "</title>\n";
  s += "<rect x=\"0.00\" y=\"0.00\" width=\"" + fx(f.width) + "\" height=\"" + fx(f.height) +
       "\" fill=\"white\"/>\n";
  s += "<rect x=\"" + fx(f.margin) + "\" y=\"" + fx(f.margin) + "\" width=\"" +
       fx(f.width - 2 * f.margin) + "\" height=\"" + fx(f.height - 2 * f.margin) +
       "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  return s;
}

inline std::string polyline(const std::vector<std::pair<double, double>>& pts,
                            std::string_view stroke, std::string_view cls) {
  std::string s = "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" +
                  std::string(stroke) + "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += fx(pts[i].first) + ',' + fx(pts[i].second);
  }
  return s + "\"/>\n";
}

inline std::string circle(double cx, double cy, double r, std::string_view fill,
                          std::string_view cls) {
  return "<circle class=\"" + std::string(cls) + "\" cx=\"" + fx(cx) + "\" cy=\"" + fx(cy) +
         "\" r=\"" + fx(r) + "\" fill=\"" + std::string(fill) + "\"/>\n";
}

inline std::string rect(double x, double y, double w, double h, std::string_view fill,
                        std::string_view cls) {
  return "<rect class=\"" + std::string(cls) + "\" x=\"" + fx(x) + "\" y=\"" + fx(y) +
         "\" width=\"" + fx(w) + "\" height=\"" + fx(h) + "\" fill=\"" + std::string(fill) +
         "\"/>\n";
}

}  // namespace svg

/// Commanded and achieved step-average forward velocity against step index.
[[nodiscard]] inline std::string velocity_svg(const EpisodeLog& log) {
  svg::Frame f;
  f.x1 = std::max<double>(1.0, static_cast<double>(log.steps.size()));
  double lo = 0.0, hi = 0.1;
  for (const auto& s : log.steps) {
    lo = std::min({lo, s.v_desired.x, s.v_step_avg.x});
    hi = std::max({hi, s.v_desired.x, s.v_step_avg.x});
  }
  const double pad = 0.05 * (hi - lo);
  f.y0 = lo - pad;
  f.y1 = hi + pad;
  std::vector<std::pair<double, double>> cmd, act;
  for (const auto& s : log.steps) {
    const double k = s.step_index;
    cmd.emplace_back(f.px(k), f.py(s.v_desired.x));
    act.emplace_back(f.px(k), f.py(s.v_step_avg.x));
  }
  std::string out = svg::header(f, "forward velocity: commanded vs step average");
  out += svg::polyline(cmd, "gray", "commanded");
  out += svg::polyline(act, "steelblue", "achieved");
  return out + "</svg>\n";
}

/// Push outcomes in polar form: angle is the push direction, radius the impulse.
[[nodiscard]] inline std::string pushmap_svg(const PushGrid& grid, double i_max) {
  svg::Frame f;
  f.width = f.height = 440;
  f.x0 = f.y0 = -i_max;
  f.x1 = f.y1 = i_max;
  std::string out = svg::header(f, "push recovery: impulse and direction");
  for (const auto& s : grid.samples) {
    const double x = s.impulse * std::cos(s.angle);
    const double y = s.impulse * std::sin(s.angle);
    out += svg::circle(f.px(x), f.py(y), 3.0, s.recovered ? "seagreen" : "crimson",
                       s.recovered ? "sample recovered" : "sample fell");
  }
  return out + "</svg>\n";
}

/// Planned (hollow squares) and executed (dots) footholds over the terrain,
/// gaps shaded.
[[nodiscard]] inline std::string footfalls_svg(const EpisodeLog& log, const Terrain& terrain) {
  svg::Frame f;
  f.width = 800;
  f.height = 300;
  double x_lo = 0.0, x_hi = 0.5, y_lo = -0.2, y_hi = 0.2;
  for (const auto& s : log.steps) {
    x_lo = std::min({x_lo, s.plan.target.x, s.executed_foot.x});
    x_hi = std::max({x_hi, s.plan.target.x, s.executed_foot.x});
    y_lo = std::min({y_lo, s.plan.target.y, s.executed_foot.y});
    y_hi = std::max({y_hi, s.plan.target.y, s.executed_foot.y});
  }
  for (const auto& g : terrain.gaps()) {
    x_lo = std::min(x_lo, g.begin);
    x_hi = std::max(x_hi, g.end);
  }
  f.x0 = x_lo - 0.1;
  f.x1 = x_hi + 0.1;
  f.y0 = y_lo - 0.05;
  f.y1 = y_hi + 0.05;
  std::string out = svg::header(f, "footfalls: planned vs executed");
  for (const auto& g : terrain.gaps()) {
    out += svg::rect(f.px(g.begin), f.margin, f.px(g.end) - f.px(g.begin),
                     f.height - 2 * f.margin, "lightgray", "gap");
  }
  for (const auto& s : log.steps) {
    out += "<rect class=\"planned\" x=\"" + svg::fx(f.px(s.plan.target.x) - 4) + "\" y=\"" +
           svg::fx(f.py(s.plan.target.y) - 4) +
           "\" width=\"8.00\" height=\"8.00\" fill=\"none\" stroke=\"steelblue\"/>\n";
    out += svg::circle(f.px(s.executed_foot.x), f.py(s.executed_foot.y), 2.5,
                       s.fell ? "crimson" : "black", "executed");
  }
  return out + "</svg>\n";
}

}  // namespace stride_lab::bench
