#include "nnstat/io/report.hpp"

#include <algorithm>
#include <cstdio>

#include "nnstat/error.hpp"
#include "nnstat/io/csv.hpp"

namespace nnstat::io {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string pad_left(const std::string& s, size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

// Estimate right-aligned, stars in a fixed three-character slot.
std::string weight_cell(const WeightTest& t) {
  const std::string stars = t.wald ? significance_code(t.wald->p_value) : "";
  return pad_left(format_estimate(t.estimate), 8) + pad_right(stars, 3);
}

std::string mp_cell(const CovariateTest& c) {
  return c.wald ? format_p_value(c.wald->p_value) : "NA";
}

Json wald_json(const std::optional<WaldResult>& w, const std::string& error) {
  Json j;
  if (w) {
    j["statistic"] = w->statistic;
    j["df"] = w->df;
    j["p_value"] = w->p_value;
    j["code"] = significance_code(w->p_value);
  } else {
    j["statistic"] = nullptr;
    j["df"] = nullptr;
    j["p_value"] = nullptr;
    j["code"] = "";
  }
  j["error"] = error;
  return j;
}

std::string g17_or_empty(const std::optional<double>& v) {
  return v ? format_g17(*v) : "";
}

std::string emit_text(const InferenceReport& r) {
  const Architecture& a = r.arch;
  std::string out;
  out += "Network: p = " + std::to_string(a.p) + ", q = " + std::to_string(a.q) +
         ", hidden = " + to_string(a.hidden) + ", output = " +
         to_string(a.output) + "\n";
  out += "lambda = " + fmt("%g", r.lambda) +
         ", penalized log-likelihood = " + fmt("%.3f", r.loglik);
  if (r.sigma_sq_hat) out += ", sigma^2 = " + fmt("%.4g", *r.sigma_sq_hat);
  out += "\n";
  out += std::string("Covariance: ") +
         (r.positive_definite ? "positive definite" : "NOT positive definite") +
         " (eigenvalues " + fmt("%.3g", r.min_eigenvalue) + " to " +
         fmt("%.3g", r.max_eigenvalue) + ")\n";
  for (const auto& w : r.warnings()) out += "Warning: " + w + "\n";
  out += "\n";

  out += "Output layer:";
  for (int k = 0; k <= a.q; ++k) {
    const WeightTest& t = r.gamma_test(k);
    std::string cell = weight_cell(t);
    cell.erase(0, cell.find_first_not_of(' '));
    while (!cell.empty() && cell.back() == ' ') cell.pop_back();
    out += "  " + t.label + " = " + cell;
  }
  out += "\n\n";

  size_t name_w = 9;
  for (const auto& c : r.covariates) name_w = std::max(name_w, c.name.size());
  name_w += 2;
  const size_t cell_w = 13;
  const size_t sp_w = cell_w * a.q;
  std::string l1 = pad_right("", name_w) + pad_right("SP", sp_w);
  l1 += pad_left("MP", 9);
  std::string l2 = pad_right("", name_w);
  for (int k = 1; k <= a.q; ++k) {
    l2 += pad_right(pad_left("omega[j," + std::to_string(k) + "]", 11), cell_w);
  }
  l2 += pad_left("p-value", 9);
  auto rstrip = [](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  out += rstrip(l1) + "\n" + rstrip(l2) + "\n";
  for (const auto& c : r.covariates) {
    std::string line = pad_right(c.name, name_w);
    for (int k = 1; k <= a.q; ++k) {
      line += pad_right(weight_cell(r.omega_test(c.j, k)), cell_w);
    }
    line += pad_left(mp_cell(c), 9);
    out += rstrip(line) + "\n";
  }
  out += std::string(kSignificanceLegend) + "\n";
  return out;
}

std::string emit_csv(const InferenceReport& r) {
  std::string out = csv_line({"parameter", "covariate", "j", "k", "estimate",
                              "sp_statistic", "sp_p_value", "sp_code",
                              "mp_statistic", "mp_df", "mp_p_value", "error"});
  for (const auto& w : r.weights) {
    std::string covariate, j, k, mp_stat, mp_df, mp_p;
    const int q = r.arch.q;
    if (w.index < (r.arch.p + 1) * q) {
      const int jj = w.index / q;
      j = std::to_string(jj);
      k = std::to_string(w.index % q + 1);
      if (jj >= 1) {
        const CovariateTest& c = r.covariates[jj - 1];
        covariate = c.name;
        if (c.wald) {
          mp_stat = format_g17(c.wald->statistic);
          mp_df = format_g17(c.wald->df);
          mp_p = format_g17(c.wald->p_value);
        }
      }
    } else {
      k = std::to_string(w.index - (r.arch.p + 1) * q);
    }
    out += csv_line({w.label, covariate, j, k, format_g17(w.estimate),
                     w.wald ? format_g17(w.wald->statistic) : "",
                     w.wald ? format_g17(w.wald->p_value) : "",
                     w.wald ? significance_code(w.wald->p_value) : "", mp_stat,
                     mp_df, mp_p, w.error});
  }
  return out;
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "text") return ReportFormat::kText;
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw InputError("unknown report format '" + s + "' (text, json or csv)");
}

std::string format_p_value(double p) {
  if (p < 0.001) return "<0.001";
  return fmt("%.3f", p);
}

std::string format_estimate(double v) {
  std::string s = fmt("%.2f", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

Json summary_to_json(const InferenceReport& r) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["p"] = r.arch.p;
  j["q"] = r.arch.q;
  j["hidden_activation"] = to_string(r.arch.hidden);
  j["output_activation"] = to_string(r.arch.output);
  j["lambda"] = r.lambda;
  j["loglik"] = r.loglik;
  j["sigma_sq_hat"] = r.sigma_sq_hat ? Json(*r.sigma_sq_hat) : Json(nullptr);
  j["converged"] = r.converged;
  j["positive_definite"] = r.positive_definite;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["max_eigenvalue"] = r.max_eigenvalue;
  Json warnings = Json::array();
  for (const auto& w : r.warnings()) warnings.push_back(w);
  j["warnings"] = warnings;
  Json weights = Json::array();
  for (const auto& w : r.weights) {
    Json e;
    e["index"] = w.index;
    e["label"] = w.label;
    e["estimate"] = w.estimate;
    e["sp"] = wald_json(w.wald, w.error);
    weights.push_back(e);
  }
  j["weights"] = weights;
  Json covs = Json::array();
  for (const auto& c : r.covariates) {
    Json e;
    e["j"] = c.j;
    e["name"] = c.name;
    e["mp"] = wald_json(c.wald, c.error);
    covs.push_back(e);
  }
  j["covariates"] = covs;
  j["significance_legend"] = kSignificanceLegend;
  return j;
}

std::string emit_summary(const InferenceReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText:
      return emit_text(report);
    case ReportFormat::kJson:
      return dump_json(summary_to_json(report));
    case ReportFormat::kCsv:
      return emit_csv(report);
  }
  return emit_text(report);
}

std::string pce_to_csv(const PceCurve& curve) {
  std::string out =
      csv_line({"x", "beta_hat", "se", "lo", "hi", "condition_label"});
  for (const auto& pt : curve.points) {
    out += csv_line({format_g17(pt.x), format_g17(pt.beta_hat),
                     format_g17(pt.se), format_g17(pt.lo), format_g17(pt.hi),
                     pt.label});
  }
  return out;
}

std::string sweep_to_csv(const SelectionSweep& sweep) {
  std::string out = csv_line({"q", "bic", "cv_rmse", "cv_se"});
  for (const auto& e : sweep.entries) {
    out += csv_line({std::to_string(e.q), g17_or_empty(e.bic),
                     g17_or_empty(e.cv_rmse), g17_or_empty(e.cv_se)});
  }
  return out;
}

std::string linear_to_csv(const LinearFit& fit) {
  std::string out = csv_line({"term", "beta", "se", "z", "p_value"});
  for (int i = 0; i < fit.beta.size(); ++i) {
    out += csv_line({fit.names[i], format_g17(fit.beta[i]),
                     format_g17(fit.se[i]), format_g17(fit.z[i]),
                     format_g17(fit.p_values[i])});
  }
  return out;
}

std::string sim_rates_to_csv(const SimReport& report) {
  std::string out = csv_line({"target", "kind", "test", "rate", "rejections",
                              "computable", "replicates"});
  for (const auto& r : report.rates) {
    out += csv_line({r.target, r.kind, r.test, format_g17(r.rate),
                     std::to_string(r.rejections), std::to_string(r.computable),
                     std::to_string(r.replicates)});
  }
  return out;
}

std::string sim_params_to_csv(const SimReport& report) {
  std::string out = csv_line({"parameter", "truth", "mean", "se", "see", "cp",
                              "fitted", "pd"});
  for (const auto& p : report.params) {
    out += csv_line({p.label, format_g17(p.truth), format_g17(p.mean),
                     format_g17(p.se), format_g17(p.see), format_g17(p.cp),
                     std::to_string(p.fitted), std::to_string(p.pd)});
  }
  return out;
}

std::string power_to_csv(const std::vector<PowerRow>& rows) {
  std::string out = csv_line({"effect", "sp_rate", "sp_computable", "mp_rate",
                              "mp_computable", "replicates"});
  for (const auto& r : rows) {
    out += csv_line({format_g17(r.effect), format_g17(r.sp.rate),
                     std::to_string(r.sp.computable), format_g17(r.mp.rate),
                     std::to_string(r.mp.computable),
                     std::to_string(r.mp.replicates)});
  }
  return out;
}

std::string pd_to_csv(const std::vector<PdCell>& cells) {
  std::string out = csv_line({"lambda", "q", "pattern", "n", "replicates",
                              "pd_count", "pd_percent"});
  for (const auto& c : cells) {
    out += csv_line({format_g17(c.lambda), std::to_string(c.q),
                     to_string(c.pattern), std::to_string(c.n),
                     std::to_string(c.replicates), std::to_string(c.pd_count),
                     fmt("%.1f", 100.0 * c.pd_rate)});
  }
  return out;
}

}  // namespace nnstat::io
