#pragma once

// Minimal standalone SVG line plots: PCE curves with a shaded band, the
// BIC / CV sweep as two panels, and power curves. Output depends only on the
// input values, so identical inputs produce identical bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nnstat/effects.hpp"
#include "nnstat/selection.hpp"
#include "nnstat/simgen.hpp"

namespace nnstat::io {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // band, empty for none
  std::vector<double> hi;
  std::string color = "black";
  bool dashed = false;
  bool markers = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  // Horizontal reference line drawn blue dashed.
  std::optional<double> reference;
  std::string reference_label;
  bool log_x = false;
  bool integer_x = false;  // x ticks at whole numbers only
  // Fixed y range; derived from the data when unset.
  std::optional<std::pair<double, double>> y_range;
};

// Panels are laid out side by side. Throws InputError when a panel has no
// points or a series has mismatched lengths.
std::string render_svg(const std::vector<PlotPanel>& panels,
                       int panel_width = 480, int height = 360);

// One series per conditioning label. The band is drawn when a series has at
// least two points. `linear_reference` is the linear-model effect.
PlotPanel pce_panel(const PceCurve& curve, const std::string& x_label,
                    const std::string& y_label,
                    std::optional<double> linear_reference = std::nullopt);
// BIC on the left, CV RMSE with +/- one se on the right.
std::vector<PlotPanel> sweep_panels(const SelectionSweep& sweep);
// SP and MP power against the effect size, log x when all effects are
// positive.
PlotPanel power_panel(const std::vector<PowerRow>& rows);

void emit_plot(const std::vector<PlotPanel>& panels,
               const std::filesystem::path& svg_path);

}  // namespace nnstat::io
