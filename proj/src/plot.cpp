#include "cdpo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cdpo::lab {

namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 290.0;
constexpr double kMarginTop = 42.0;
constexpr double kMarginLeft[3] = {52.0, 472.0, 892.0};
constexpr double kWidth = 1300.0;
constexpr double kHeight = 400.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                          "#d62728", "#9467bd", "#8c564b"};
constexpr const char* kBaselineColor = "#7f7f7f";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<long> steps;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

void render_panel(std::ostringstream& svg, const Panel& panel, int slot) {
  const double x0 = kMarginLeft[slot];
  const double y0 = kMarginTop;

  svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\""
      << num(kPanelW) << "\" height=\"" << num(kPanelH)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << num(x0 + kPanelW / 2) << "\" y=\"" << num(y0 - 12)
      << "\" text-anchor=\"middle\" font-size=\"15\" font-family=\"sans-serif\">"
      << panel.title << "</text>\n";

  bool has_points = false;
  long x_max = 1;
  double y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : panel.series) {
    for (size_t i = 0; i < std::min(s.mean.size(), s.steps.size()); ++i) {
      if (std::isnan(s.mean[i])) continue;
      const double se = i < s.stderr_.size() && !std::isnan(s.stderr_[i])
                            ? s.stderr_[i]
                            : 0.0;
      if (first) {
        y_min = s.mean[i] - se;
        y_max = s.mean[i] + se;
        first = false;
      } else {
        y_min = std::min(y_min, s.mean[i] - se);
        y_max = std::max(y_max, s.mean[i] + se);
      }
      x_max = std::max(x_max, s.steps[i]);
      has_points = true;
    }
  }
  if (!has_points) {
    svg << "<text x=\"" << num(x0 + kPanelW / 2) << "\" y=\""
        << num(y0 + kPanelH / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#a0a0a0\" "
           "font-family=\"sans-serif\">no data</text>\n";
    return;
  }
  if (y_max - y_min < 1e-9) {
    y_max += 1.0;
    y_min -= 1.0;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto px = [&](long step) {
    return x0 + kPanelW * static_cast<double>(step) / static_cast<double>(x_max);
  };
  auto py = [&](double v) {
    return y0 + kPanelH * (1.0 - (v - y_min) / (y_max - y_min));
  };

  // axis labels (min/max ticks)
  svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(y_min))
      << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
      << num(y_min) << "</text>\n";
  svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(y_max) + 10)
      << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
      << num(y_max) << "</text>\n";
  svg << "<text x=\"" << num(x0 + kPanelW) << "\" y=\""
      << num(y0 + kPanelH + 16)
      << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
      << x_max << " steps</text>\n";

  // one band + polyline per contiguous run of valid points
  for (const auto& s : panel.series) {
    size_t i = 0;
    const size_t n = std::min(s.mean.size(), s.steps.size());
    while (i < n) {
      while (i < n && std::isnan(s.mean[i])) ++i;
      size_t j = i;
      while (j < n && !std::isnan(s.mean[j])) ++j;
      if (j > i + 1) {
        std::ostringstream upper, lower;
        for (size_t k = i; k < j; ++k) {
          const double se =
              k < s.stderr_.size() && !std::isnan(s.stderr_[k]) ? s.stderr_[k]
                                                                : 0.0;
          upper << num(px(s.steps[k])) << ',' << num(py(s.mean[k] + se)) << ' ';
        }
        for (size_t k = j; k-- > i;) {
          const double se =
              k < s.stderr_.size() && !std::isnan(s.stderr_[k]) ? s.stderr_[k]
                                                                : 0.0;
          lower << num(px(s.steps[k])) << ',' << num(py(s.mean[k] - se)) << ' ';
        }
        svg << "<polygon points=\"" << upper.str() << lower.str()
            << "\" fill=\"" << s.color << "\" fill-opacity=\"0.15\" "
               "stroke=\"none\"/>\n";
        svg << "<polyline points=\"";
        for (size_t k = i; k < j; ++k)
          svg << num(px(s.steps[k])) << ',' << num(py(s.mean[k])) << ' ';
        svg << "\" fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"";
        if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << "/>\n";
      } else if (j == i + 1) {
        svg << "<circle cx=\"" << num(px(s.steps[i])) << "\" cy=\""
            << num(py(s.mean[i])) << "\" r=\"2\" fill=\"" << s.color
            << "\"/>\n";
      }
      i = j;
    }
  }

  // legend
  double ly = y0 + 14.0;
  for (const auto& s : panel.series) {
    svg << "<line x1=\"" << num(x0 + 8) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(x0 + 30) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/>\n";
    svg << "<text x=\"" << num(x0 + 36) << "\" y=\"" << num(ly)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label
        << "</text>\n";
    ly += 14.0;
  }
}

Series baseline_series(const SweepSummary& summary) {
  Series s;
  const SweepCell* base = summary.find("ppo", 0.0);
  if (base == nullptr) return s;
  s.label = "ppo (no reg)";
  s.color = kBaselineColor;
  s.dashed = true;
  s.steps = base->steps;
  s.mean = base->mean_curve;
  s.stderr_ = base->stderr_curve;
  return s;
}

void fill_coefficient_panel(Panel& panel, const SweepSummary& summary,
                            const std::string& algo,
                            const Series& baseline) {
  std::vector<const SweepCell*> cells;
  for (const auto& cell : summary.cells)
    if (cell.algo == algo) cells.push_back(&cell);
  std::sort(cells.begin(), cells.end(),
            [](const SweepCell* a, const SweepCell* b) {
              return a->reg_coef > b->reg_coef;
            });
  int color = 0;
  for (const SweepCell* cell : cells) {
    Series s;
    s.label = algo + " c=" + format_double(cell->reg_coef);
    s.color = kPalette[color % 6];
    color += 1;
    s.steps = cell->steps;
    s.mean = cell->mean_curve;
    s.stderr_ = cell->stderr_curve;
    panel.series.push_back(std::move(s));
  }
  if (!baseline.steps.empty()) panel.series.push_back(baseline);
}

}  // namespace

std::string render_learning_curves(const SweepSummary& summary) {
  if (summary.cells.empty())
    throw std::invalid_argument("emit_plots: empty summary");

  const Series baseline = baseline_series(summary);

  Panel left{"cdpo by coefficient", {}};
  fill_coefficient_panel(left, summary, "cdpo", baseline);
  Panel center{"ppo-ent by coefficient", {}};
  fill_coefficient_panel(center, summary, "ppo-ent", baseline);

  Panel right{"aggregated over coefficients", {}};
  int color = 0;
  for (const auto& algo : {std::string("cdpo"), std::string("ppo-ent")}) {
    auto it = summary.aggregate_mean.find(algo);
    if (it == summary.aggregate_mean.end()) continue;
    Series s;
    s.label = algo + " (mean over c)";
    s.color = kPalette[color % 6];
    color += 1;
    s.steps = summary.aggregate_steps.at(algo);
    s.mean = it->second;
    s.stderr_ = summary.aggregate_stderr.at(algo);
    right.series.push_back(std::move(s));
  }
  if (!baseline.steps.empty()) right.series.push_back(baseline);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth)
      << ' ' << num(kHeight) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  render_panel(svg, left, 0);
  render_panel(svg, center, 1);
  render_panel(svg, right, 2);
  svg << "</svg>\n";
  return svg.str();
}

std::string emit_plots(const SweepSummary& summary,
                       const std::string& out_dir) {
  const std::string content = render_learning_curves(summary);
  std::filesystem::create_directories(out_dir);
  const std::string path =
      (std::filesystem::path(out_dir) / "learning_curves.svg").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
  return path;
}

}  // namespace cdpo::lab
