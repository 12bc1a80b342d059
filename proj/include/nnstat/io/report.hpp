#pragma once

// Renderers for inference reports and the tabular outputs of the effects,
// selection and simulation modules.

#include <string>
#include <vector>

#include "nnstat/effects.hpp"
#include "nnstat/inference.hpp"
#include "nnstat/io/json.hpp"
#include "nnstat/selection.hpp"
#include "nnstat/simgen.hpp"

namespace nnstat::io {

enum class ReportFormat { kText, kJson, kCsv };

ReportFormat parse_report_format(const std::string& s);

// "<0.001" below 0.001, otherwise three decimals.
std::string format_p_value(double p);
// Two decimals, as in the weight table.
std::string format_estimate(double v);

// Text: header lines, warnings, the output-layer weights, then one row per
// covariate with the SP-tested input weights (stars appended) and the MP
// p-value, closed by the significance legend. JSON carries full precision;
// CSV has one row per parameter.
std::string emit_summary(const InferenceReport& report, ReportFormat format);
Json summary_to_json(const InferenceReport& report);

// Columns: x, beta_hat, se, lo, hi, condition_label.
std::string pce_to_csv(const PceCurve& curve);
// Columns: q, bic, cv_rmse, cv_se (empty cells where a step failed).
std::string sweep_to_csv(const SelectionSweep& sweep);
// Columns: beta, se, z, p_value per coefficient.
std::string linear_to_csv(const LinearFit& fit);

// Simulation tables.
std::string sim_rates_to_csv(const SimReport& report);
std::string sim_params_to_csv(const SimReport& report);
std::string power_to_csv(const std::vector<PowerRow>& rows);
std::string pd_to_csv(const std::vector<PdCell>& cells);

}  // namespace nnstat::io
