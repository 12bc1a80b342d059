#include "nnstat/io/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nnstat/error.hpp"
#include "nnstat/io/files.hpp"

namespace nnstat::io {

namespace {

constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTop = 32.0;
constexpr double kBottom = 52.0;

const char* const kPalette[] = {"black", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  // Degenerate ranges are widened around the value; others padded by 5%.
  void pad() {
    const double span = hi - lo;
    if (span <= 1e-12 * std::max(1.0, std::abs(hi))) {
      const double half = std::abs(hi) > 0 ? 0.5 * std::abs(hi) : 0.5;
      lo -= half;
      hi += half;
    } else {
      lo -= 0.05 * span;
      hi += 0.05 * span;
    }
  }
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double m = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
  return m * mag;
}

struct Tick {
  double value;  // in axis coordinates (log10 for log axes)
  std::string label;
};

std::vector<Tick> linear_ticks(const Range& r, bool integer = false) {
  const double step =
      integer ? std::max(1.0, nice_step(r.hi - r.lo)) : nice_step(r.hi - r.lo);
  const int decimals = std::max(0, -static_cast<int>(std::floor(std::log10(step))));
  std::vector<Tick> ticks;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step;
       t += step) {
    const double v = std::abs(t) < 1e-9 * step ? 0.0 : t;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    ticks.push_back({v, buf});
  }
  return ticks;
}

std::vector<Tick> log_ticks(const Range& r) {
  std::vector<Tick> ticks;
  for (double e = std::ceil(r.lo); e <= r.hi + 1e-9; e += 1.0) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", std::pow(10.0, e));
    ticks.push_back({e, buf});
  }
  if (ticks.size() >= 2) return ticks;
  ticks = linear_ticks(r);
  for (auto& t : ticks) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", std::pow(10.0, t.value));
    t.label = buf;
  }
  return ticks;
}

void validate(const PlotPanel& panel) {
  size_t points = 0;
  for (const auto& s : panel.series) {
    if (s.y.size() != s.x.size()) {
      throw InputError("plot series '" + s.label + "' has " +
                       std::to_string(s.x.size()) + " x values and " +
                       std::to_string(s.y.size()) + " y values");
    }
    if (!s.lo.empty() && (s.lo.size() != s.x.size() || s.hi.size() != s.x.size())) {
      throw InputError("plot series '" + s.label + "' has a band of the wrong length");
    }
    if (panel.log_x) {
      for (double x : s.x) {
        if (!(x > 0)) throw InputError("log axis needs positive x values");
      }
    }
    points += s.x.size();
  }
  if (points == 0) {
    throw InputError("plot panel '" + panel.title + "' has no points");
  }
}

std::string render_panel(const PlotPanel& panel, double x0, double width,
                         double height) {
  auto tx = [&](double x) { return panel.log_x ? std::log10(x) : x; };
  Range xr, yr;
  for (const auto& s : panel.series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      xr.add(tx(s.x[i]));
      yr.add(s.y[i]);
      if (!s.lo.empty()) {
        yr.add(s.lo[i]);
        yr.add(s.hi[i]);
      }
    }
  }
  if (panel.reference) yr.add(*panel.reference);
  if (xr.empty()) xr = {0.0, 1.0};
  if (yr.empty()) yr = {0.0, 1.0};
  xr.pad();
  if (panel.y_range) {
    yr.lo = panel.y_range->first;
    yr.hi = panel.y_range->second;
  } else {
    yr.pad();
  }

  const double pw = width - kLeft - kRight;
  const double ph = height - kTop - kBottom;
  auto px = [&](double x) {
    return x0 + kLeft + (tx(x) - xr.lo) / (xr.hi - xr.lo) * pw;
  };
  auto py = [&](double y) {
    return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph;
  };

  std::string out;
  out += "<g>\n";
  out += "<rect x=\"" + num(x0 + kLeft) + "\" y=\"" + num(kTop) +
         "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  const auto xticks =
      panel.log_x ? log_ticks(xr) : linear_ticks(xr, panel.integer_x);
  for (const auto& t : xticks) {
    const double x = x0 + kLeft + (t.value - xr.lo) / (xr.hi - xr.lo) * pw;
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + escape(t.label) + "</text>\n";
  }
  for (const auto& t : linear_ticks(yr)) {
    if (t.value < yr.lo || t.value > yr.hi) continue;
    const double y = py(t.value);
    out += "<line x1=\"" + num(x0 + kLeft - 5) + "\" y1=\"" + num(y) +
           "\" x2=\"" + num(x0 + kLeft) + "\" y2=\"" + num(y) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x0 + kLeft - 8) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\">" + escape(t.label) + "</text>\n";
  }
  out += "<text x=\"" + num(x0 + kLeft + pw / 2) + "\" y=\"" +
         num(height - 12) + "\" text-anchor=\"middle\">" +
         escape(panel.x_label) + "</text>\n";
  const double ylx = x0 + 16;
  const double yly = kTop + ph / 2;
  out += "<text x=\"" + num(ylx) + "\" y=\"" + num(yly) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(ylx) + " " +
         num(yly) + ")\">" + escape(panel.y_label) + "</text>\n";
  out += "<text x=\"" + num(x0 + kLeft + pw / 2) + "\" y=\"" + num(kTop - 12) +
         "\" text-anchor=\"middle\" font-weight=\"bold\">" +
         escape(panel.title) + "</text>\n";

  for (const auto& s : panel.series) {
    if (!s.lo.empty() && s.x.size() >= 2) {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        pts += num(px(s.x[i])) + "," + num(py(s.hi[i])) + " ";
      }
      for (size_t i = s.x.size(); i-- > 0;) {
        pts += num(px(s.x[i])) + "," + num(py(s.lo[i])) + " ";
      }
      pts.pop_back();
      const std::string fill = s.color == "black" ? "#bbbbbb" : s.color;
      out += "<polygon points=\"" + pts + "\" fill=\"" + fill +
             "\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
    }
  }
  if (panel.reference) {
    const double y = py(*panel.reference);
    out += "<line x1=\"" + num(x0 + kLeft) + "\" y1=\"" + num(y) +
           "\" x2=\"" + num(x0 + kLeft + pw) + "\" y2=\"" + num(y) +
           "\" stroke=\"blue\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (const auto& s : panel.series) {
    const std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    if (s.x.size() >= 2) {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      }
      pts.pop_back();
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             s.color + "\" stroke-width=\"1.5\"" + dash + "/>\n";
    }
    if (s.markers || s.x.size() == 1) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" +
               num(py(s.y[i])) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> legend;  // label, style
  if (panel.series.size() > 1 || panel.reference) {
    for (const auto& s : panel.series) {
      if (!s.label.empty()) {
        legend.push_back({s.label, "stroke=\"" + s.color + "\"" +
                                       (s.dashed ? " stroke-dasharray=\"6,4\""
                                                 : std::string())});
      }
    }
    if (panel.reference && !panel.reference_label.empty()) {
      legend.push_back({panel.reference_label,
                        "stroke=\"blue\" stroke-dasharray=\"6,4\""});
    }
  }
  for (size_t i = 0; i < legend.size(); ++i) {
    const double ly = kTop + 14 + 16 * static_cast<double>(i);
    const double lx = x0 + kLeft + pw - 150;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(lx + 20) + "\" y2=\"" + num(ly - 4) + "\" " + legend[i].second +
           " stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\">" +
           escape(legend[i].first) + "</text>\n";
  }
  out += "</g>\n";
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int panel_width,
                       int height) {
  if (panels.empty()) throw InputError("nothing to plot");
  for (const auto& p : panels) validate(p);
  const int width = panel_width * static_cast<int>(panels.size());
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      std::to_string(width) + "\" height=\"" + std::to_string(height) +
      "\" viewBox=\"0 0 " + std::to_string(width) + " " +
      std::to_string(height) +
      "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (size_t i = 0; i < panels.size(); ++i) {
    out += render_panel(panels[i], static_cast<double>(panel_width) * i,
                        panel_width, height);
  }
  out += "</svg>\n";
  return out;
}

PlotPanel pce_panel(const PceCurve& curve, const std::string& x_label,
                    const std::string& y_label,
                    std::optional<double> linear_reference) {
  PlotPanel panel;
  panel.x_label = x_label;
  panel.y_label = y_label;
  panel.title = "Partial covariate effect";
  panel.reference = linear_reference;
  if (linear_reference) panel.reference_label = "linear model";
  const auto labels = curve.labels();
  const std::vector<std::string> groups =
      labels.empty() ? std::vector<std::string>{""} : labels;
  for (size_t g = 0; g < groups.size(); ++g) {
    PlotSeries s;
    s.label = groups[g];
    s.color = kPalette[g % std::size(kPalette)];
    for (const auto& pt : curve.points) {
      if (pt.label != groups[g]) continue;
      s.x.push_back(pt.x);
      s.y.push_back(pt.beta_hat);
      s.lo.push_back(pt.lo);
      s.hi.push_back(pt.hi);
    }
    panel.series.push_back(std::move(s));
  }
  return panel;
}

std::vector<PlotPanel> sweep_panels(const SelectionSweep& sweep) {
  PlotPanel bic;
  bic.title = "BIC";
  bic.x_label = "hidden nodes q";
  bic.y_label = "BIC";
  PlotPanel cv;
  cv.title = "Cross-validation";
  cv.x_label = "hidden nodes q";
  cv.y_label = "CV RMSE";
  bic.integer_x = cv.integer_x = true;
  PlotSeries bs, cs;
  bs.markers = cs.markers = true;
  for (const auto& e : sweep.entries) {
    if (e.bic) {
      bs.x.push_back(e.q);
      bs.y.push_back(*e.bic);
    }
    if (e.cv_rmse) {
      cs.x.push_back(e.q);
      cs.y.push_back(*e.cv_rmse);
      const double se = e.cv_se.value_or(0.0);
      cs.lo.push_back(*e.cv_rmse - se);
      cs.hi.push_back(*e.cv_rmse + se);
    }
  }
  bic.series.push_back(std::move(bs));
  cv.series.push_back(std::move(cs));
  return {bic, cv};
}

PlotPanel power_panel(const std::vector<PowerRow>& rows) {
  PlotPanel panel;
  panel.title = "Power";
  panel.x_label = "effect size";
  panel.y_label = "rejection rate";
  panel.y_range = std::make_pair(0.0, 1.0);
  panel.log_x = !rows.empty() && std::all_of(rows.begin(), rows.end(),
                                             [](const PowerRow& r) {
                                               return r.effect > 0;
                                             });
  PlotSeries sp, mp;
  sp.label = "single-parameter";
  sp.color = "#d62728";
  sp.dashed = true;
  mp.label = "multiple-parameter";
  sp.markers = mp.markers = true;
  for (const auto& r : rows) {
    sp.x.push_back(r.effect);
    sp.y.push_back(r.sp.rate);
    mp.x.push_back(r.effect);
    mp.y.push_back(r.mp.rate);
  }
  panel.series.push_back(std::move(sp));
  panel.series.push_back(std::move(mp));
  return panel;
}

void emit_plot(const std::vector<PlotPanel>& panels,
               const std::filesystem::path& svg_path) {
  write_file_atomic(svg_path, render_svg(panels));
}

}  // namespace nnstat::io
