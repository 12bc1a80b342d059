// Command-line front end: fit, summary, pce, select, linear, diagram and
// simulate. Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nnstat/effects.hpp"
#include "nnstat/error.hpp"
#include "nnstat/fit.hpp"
#include "nnstat/inference.hpp"
#include "nnstat/io/csv.hpp"
#include "nnstat/io/diagram.hpp"
#include "nnstat/io/files.hpp"
#include "nnstat/io/ingest.hpp"
#include "nnstat/io/model_io.hpp"
#include "nnstat/io/plot.hpp"
#include "nnstat/io/report.hpp"
#include "nnstat/io/scenario.hpp"
#include "nnstat/selection.hpp"
#include "nnstat/simgen.hpp"

namespace fs = std::filesystem;
using namespace nnstat;
using namespace nnstat::io;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  double lambda = 0.01;
  std::uint64_t seed = 1;
  int restarts = 10;
  std::string family = "gaussian";
  int threads = 1;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* restarts_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content << std::flush;
  } else {
    write_file_atomic(path, content);
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::vector<int> parse_q_list(const std::string& s) {
  std::vector<int> out;
  auto to_int = [&](const std::string& t) {
    try {
      size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw InputError("bad --q-range '" + s + "' (use a:b or a,b,c)");
    }
  };
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const int a = to_int(s.substr(0, colon));
    const int b = to_int(s.substr(colon + 1));
    if (b < a) throw InputError("bad --q-range '" + s + "': end before start");
    for (int q = a; q <= b; ++q) out.push_back(q);
    return out;
  }
  size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    out.push_back(to_int(s.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

IngestOptions ingest_options(const Globals& g, const std::string& response,
                             const std::string& schema_path) {
  IngestOptions o;
  o.response = response;
  o.family = parse_family(g.family);
  if (!schema_path.empty()) o.schema = load_schema(schema_path);
  if (o.response.empty() && !o.schema.response) {
    throw InputError("no response column: pass --response or set it in the schema");
  }
  return o;
}

struct Loaded {
  ModelFile model;
  Dataset data;
  LikelihoodSpec spec;
};

Loaded load_model_and_data(const std::string& model_path,
                           const std::string& data_path) {
  Loaded l;
  l.model = model_from_json(read_file(model_path));
  l.data = apply_metadata(read_csv(data_path), l.model.columns,
                          l.model.response);
  l.spec = LikelihoodSpec{l.model.family(), l.model.lambda};
  l.spec.validate(l.model.arch);
  return l;
}

// The fit record a summary is built from: stored diagnostics when the model
// file carries them, otherwise recomputed at theta.
FitResult fit_record(const Loaded& l) {
  const Architecture& a = l.model.arch;
  FitResult f;
  f.theta_hat = l.model.theta;
  f.lambda = l.model.lambda;
  f.loglik = reported_loglik(a, f.theta_hat, l.data, l.spec);
  if (l.spec.family == Family::kGaussian) {
    f.sigma_sq_hat = profile_sigma_sq(a, f.theta_hat, l.data).value();
  }
  const Eigen::VectorXd g =
      gradient(a, f.theta_hat, l.data, l.spec, fitting_sigma_sq(l.spec));
  f.grad_max = g.cwiseAbs().maxCoeff();
  f.converged = l.model.fit ? l.model.fit->converged
                            : f.grad_max <= FitConfig{}.grad_tol;
  return f;
}

CovarianceEstimate pd_covariance(const Loaded& l) {
  CovarianceEstimate cov =
      estimate_covariance(l.model.arch, l.model.theta, l.data, l.spec);
  if (!cov.positive_definite) throw NumericalError(kRidgeHint);
  return cov;
}

int column_index(const Dataset& data, const std::string& key) {
  for (int j = 0; j < data.p(); ++j) {
    if (data.columns[j].name == key) return j + 1;
  }
  try {
    size_t used = 0;
    const int j = std::stoi(key, &used);
    if (used == key.size() && j >= 1 && j <= data.p()) return j;
  } catch (const std::exception&) {
  }
  std::string names;
  for (const auto& c : data.columns) names += (names.empty() ? "" : ", ") + c.name;
  throw InputError("unknown covariate '" + key + "' (columns: " + names + ")");
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string data, response, schema, out, hidden = "logistic";
  int q = 2;
};

int run_fit(const Globals& g, const FitArgs& a) {
  const Ingested in = ingest_file(a.data, ingest_options(g, a.response, a.schema));
  const Family family = parse_family(g.family);
  Architecture arch{in.data.p(), a.q, parse_hidden_activation(a.hidden),
                    output_for(family)};
  arch.validate();
  const LikelihoodSpec spec{family, g.lambda};
  FitConfig cfg;
  cfg.n_restarts = g.restarts;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  const FitResult fit = nnstat::fit(arch, in.data, spec, cfg);

  ModelFile m;
  m.arch = arch;
  m.theta = fit.theta_hat;
  m.lambda = g.lambda;
  m.columns = in.data.columns;
  m.response = in.data.response;
  m.fit = FitInfo{fit.loglik,        fit.converged, fit.grad_max,
                  fit.iterations,    g.restarts,    fit.best_restart,
                  g.seed};
  emit(a.out, model_to_json(m));
  int ok = 0;
  for (double ll : fit.restart_logliks) ok += std::isfinite(ll) ? 1 : 0;
  std::cerr << "fitted p = " << arch.p << ", q = " << arch.q << " on n = "
            << in.data.n() << ": loglik = " << fmt("%.4f", fit.loglik)
            << ", " << (fit.converged ? "converged" : "NOT converged")
            << ", " << ok << "/" << g.restarts << " restarts succeeded\n";
  return 0;
}

// ---------------------------------------------------------------- summary

struct SummaryArgs {
  std::string model, data, format = "text", out;
};

int run_summary(const SummaryArgs& a) {
  const ReportFormat format = parse_report_format(a.format);
  const Loaded l = load_model_and_data(a.model, a.data);
  const CovarianceEstimate cov = pd_covariance(l);
  const InferenceReport report =
      summarize(fit_record(l), cov, l.model.arch, l.data);
  emit(a.out, emit_summary(report, format));
  return 0;
}

// ---------------------------------------------------------------- pce

struct PceArgs {
  std::string model, data, covariate, by, scale = "original", csv, svg;
  std::optional<double> d;
  int points = 101;
  double level = 0.95;
  bool linear_reference = false;
};

int run_pce(const PceArgs& a) {
  if (a.scale != "original" && a.scale != "standardized") {
    throw InputError("--scale must be 'original' or 'standardized'");
  }
  const bool original = a.scale == "original";
  const Loaded l = load_model_and_data(a.model, a.data);
  const Architecture& arch = l.model.arch;
  const CovarianceEstimate cov = pd_covariance(l);
  const int j = column_index(l.data, a.covariate);
  const ColumnMeta& meta = l.data.columns[j - 1];
  const double rsd = l.data.response.sd;

  PceCurve curve;
  if (meta.kind == ColumnKind::kDummy) {
    if (!a.by.empty()) {
      throw InputError("--by is only supported for continuous covariates");
    }
    PceEstimate e = pce_binary(arch, l.model.theta, cov, l.data, j, a.level);
    if (original) e = to_original_scale(e, l.data.response);
    curve.j = j;
    curve.level = a.level;
    curve.scale = original ? EffectScale::kOriginal : EffectScale::kStandardized;
    curve.points.push_back({0.0, e.beta_hat, e.se, e.lo, e.hi, ""});
  } else {
    PceConfig cfg;
    cfg.j = j;
    cfg.d = a.d;
    cfg.level = a.level;
    const double d = a.d ? *a.d : default_step(l.data, j);
    cfg.grid = default_grid(l.data, j, d, a.points);
    if (a.by.empty()) {
      curve = pce_curve(arch, l.model.theta, cov, l.data, cfg);
    } else {
      const int k = column_index(l.data, a.by);
      auto [lo, hi] =
          interaction_screen(arch, l.model.theta, cov, l.data, j, k, cfg);
      curve = lo;
      curve.points.insert(curve.points.end(), hi.points.begin(),
                          hi.points.end());
    }
    if (original) curve = to_original_scale(curve, l.data.columns, l.data.response);
  }

  std::optional<double> reference;
  if (a.linear_reference) {
    if (l.spec.family != Family::kGaussian) {
      throw InputError("--linear-reference needs a gaussian model");
    }
    const LinearFit lin = fit_linear(l.data);
    const double step =
        meta.kind == ColumnKind::kDummy ? 1.0
                                        : (a.d ? *a.d : default_step(l.data, j));
    reference = lin.beta[j] * step * (original ? rsd : 1.0);
  }

  const std::string csv = pce_to_csv(curve);
  if (!a.csv.empty() || a.svg.empty()) emit(a.csv, csv);
  if (!a.svg.empty()) {
    const std::string y_label = original ? "effect on " + l.data.response.name
                                         : "standardized effect";
    const std::string x_label =
        meta.kind == ColumnKind::kDummy
            ? meta.name + " (0 to 1)"
            : meta.name + (original ? "" : " (standardized)");
    emit_plot({pce_panel(curve, x_label, y_label, reference)}, a.svg);
  }
  return 0;
}

// ---------------------------------------------------------------- select

struct SelectArgs {
  std::string data, response, schema, q_range = "0:4", csv, svg;
  int folds = 5;
};

int run_select(const Globals& g, const SelectArgs& a) {
  const std::vector<int> qs = parse_q_list(a.q_range);
  const Ingested in = ingest_file(a.data, ingest_options(g, a.response, a.schema));
  const LikelihoodSpec spec{parse_family(g.family), g.lambda};
  CvConfig cfg;
  cfg.folds = a.folds;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.fit.n_restarts = g.restarts;
  cfg.fit.seed = g.seed;
  const SelectionSweep s = sweep(in.data, qs, spec, cfg);

  if (!a.csv.empty()) emit(a.csv, sweep_to_csv(s));
  if (!a.svg.empty()) emit_plot(sweep_panels(s), a.svg);
  std::string table = "    q           BIC       CV RMSE         CV SE\n";
  for (const auto& e : s.entries) {
    auto cell = [](const std::optional<double>& v, const char* f) {
      std::string c = v ? fmt(f, *v) : "NA";
      return std::string(c.size() < 14 ? 14 - c.size() : 0, ' ') + c;
    };
    std::string line = fmt("%5.0f", e.q) + cell(e.bic, "%.3f") +
                       cell(e.cv_rmse, "%.5f") + cell(e.cv_se, "%.5f");
    if (!e.error.empty()) line += "  (" + e.error + ")";
    table += line + "\n";
  }
  if (auto b = s.best_by_bic()) table += "best by BIC: q = " + std::to_string(*b) + "\n";
  if (auto b = s.best_by_cv()) table += "best by CV: q = " + std::to_string(*b) + "\n";
  std::cout << table << std::flush;
  return 0;
}

// ---------------------------------------------------------------- linear

struct LinearArgs {
  std::string data, response, schema, out;
};

int run_linear(const Globals& g, const LinearArgs& a) {
  Globals gauss = g;
  gauss.family = "gaussian";
  const Ingested in =
      ingest_file(a.data, ingest_options(gauss, a.response, a.schema));
  emit(a.out, linear_to_csv(fit_linear(in.data)));
  return 0;
}

// ---------------------------------------------------------------- diagram

struct DiagramArgs {
  std::string model, data, out;
  double alpha = 0.05;
};

int run_diagram(const DiagramArgs& a) {
  const Loaded l = load_model_and_data(a.model, a.data);
  const CovarianceEstimate cov = pd_covariance(l);
  const InferenceReport report =
      summarize(fit_record(l), cov, l.model.arch, l.data);
  emit(a.out, emit_diagram(report, l.data.response.name, a.alpha));
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string study, out_dir = ".";
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  StudyFile s = load_study(a.study);
  SimScenario& b = s.base;
  if (g.lambda_opt->count()) b.lambda = g.lambda;
  if (g.seed_opt->count()) b.seed = g.seed;
  if (g.restarts_opt->count()) b.restarts = g.restarts;
  if (g.threads_opt->count()) b.threads = g.threads;
  b.validate();
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());

  switch (s.kind) {
    case StudyKind::kScenario: {
      const SimReport r = run_scenario(b);
      write_file_atomic(dir / "rates.csv", sim_rates_to_csv(r));
      write_file_atomic(dir / "params.csv", sim_params_to_csv(r));
      std::cout << "replicates " << r.replicates << ", failures " << r.failures
                << ", positive definite " << r.pd_count << " ("
                << fmt("%.1f", 100.0 * r.pd_rate) << "%)\n";
      for (const auto& reason : r.failure_reasons) {
        std::cerr << "failed " << reason << "\n";
      }
      break;
    }
    case StudyKind::kPower: {
      const auto rows = power_sweep(b, s.effects);
      write_file_atomic(dir / "power.csv", power_to_csv(rows));
      write_file_atomic(dir / "power.svg", render_svg({power_panel(rows)}));
      std::cout << "power study: " << rows.size() << " effect sizes\n";
      break;
    }
    case StudyKind::kPd: {
      const auto cells = pd_study(b, s.lambdas, s.qs, s.patterns, s.ns);
      write_file_atomic(dir / "pd.csv", pd_to_csv(cells));
      std::cout << "positive-definiteness study: " << cells.size() << " cells\n";
      break;
    }
  }
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistically interpreted single-hidden-layer neural networks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.lambda_opt = app.add_option("--lambda", g.lambda, "Ridge penalty")
                     ->capture_default_str()
                     ->check(CLI::NonNegativeNumber);
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  g.restarts_opt = app.add_option("--restarts", g.restarts, "Random restarts per fit")
                       ->capture_default_str()
                       ->check(CLI::PositiveNumber);
  app.add_option("--family", g.family, "Response family")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "bernoulli"}));
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads")
                      ->capture_default_str()
                      ->check(CLI::PositiveNumber);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a network to a CSV file, writing model JSON");
  fit->add_option("data", fit_args.data, "Input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--response", fit_args.response, "Response column");
  fit->add_option("--schema", fit_args.schema, "Schema JSON")->check(CLI::ExistingFile);
  fit->add_option("-q,--hidden-nodes", fit_args.q, "Hidden nodes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fit->add_option("--hidden", fit_args.hidden, "Hidden activation")
      ->capture_default_str()
      ->check(CLI::IsMember({"logistic", "tanh"}));
  fit->add_option("-o,--out", fit_args.out, "Model JSON path (stdout if omitted)");

  SummaryArgs summary_args;
  auto* summary = app.add_subcommand("summary", "Wald test table for a fitted model");
  summary->add_option("model", summary_args.model, "Model JSON")->required()->check(CLI::ExistingFile);
  summary->add_option("data", summary_args.data, "CSV the model was fitted on")->required()->check(CLI::ExistingFile);
  summary->add_option("--format", summary_args.format, "text, json or csv")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json", "csv"}));
  summary->add_option("-o,--out", summary_args.out, "Output path (stdout if omitted)");

  PceArgs pce_args;
  auto* pce = app.add_subcommand("pce", "Partial covariate effect curve");
  pce->add_option("model", pce_args.model, "Model JSON")->required()->check(CLI::ExistingFile);
  pce->add_option("data", pce_args.data, "CSV the model was fitted on")->required()->check(CLI::ExistingFile);
  pce->add_option("--covariate", pce_args.covariate, "Model column name or 1-based index")->required();
  pce->add_option("--d", pce_args.d, "Step in standardized units (default: column sd)");
  pce->add_option("--by", pce_args.by, "Condition on this covariate at mean -/+ sd or 0/1");
  pce->add_option("--points", pce_args.points, "Grid points")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));
  pce->add_option("--level", pce_args.level, "Confidence level")
      ->capture_default_str()
      ->check(CLI::Range(0.5, 0.9999));
  pce->add_option("--scale", pce_args.scale, "original or standardized")
      ->capture_default_str()
      ->check(CLI::IsMember({"original", "standardized"}));
  pce->add_flag("--linear-reference", pce_args.linear_reference,
                "Overlay the linear-model effect on the plot");
  pce->add_option("--csv", pce_args.csv, "CSV output path");
  pce->add_option("--svg", pce_args.svg, "SVG output path");

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "BIC and cross-validation sweep over q");
  select->add_option("data", select_args.data, "Input CSV")->required()->check(CLI::ExistingFile);
  select->add_option("--response", select_args.response, "Response column");
  select->add_option("--schema", select_args.schema, "Schema JSON")->check(CLI::ExistingFile);
  select->add_option("--q-range", select_args.q_range, "a:b or a,b,c (0 is the linear model)")
      ->capture_default_str();
  select->add_option("--folds", select_args.folds, "Cross-validation folds")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000));
  select->add_option("--csv", select_args.csv, "Sweep CSV path");
  select->add_option("--svg", select_args.svg, "Sweep SVG path");

  LinearArgs linear_args;
  auto* linear = app.add_subcommand("linear", "Linear-regression baseline coefficients");
  linear->add_option("data", linear_args.data, "Input CSV")->required()->check(CLI::ExistingFile);
  linear->add_option("--response", linear_args.response, "Response column");
  linear->add_option("--schema", linear_args.schema, "Schema JSON")->check(CLI::ExistingFile);
  linear->add_option("-o,--out", linear_args.out, "CSV path (stdout if omitted)");

  DiagramArgs diagram_args;
  auto* diagram = app.add_subcommand("diagram", "Graphviz DOT network diagram");
  diagram->add_option("model", diagram_args.model, "Model JSON")->required()->check(CLI::ExistingFile);
  diagram->add_option("data", diagram_args.data, "CSV the model was fitted on")->required()->check(CLI::ExistingFile);
  diagram->add_option("--alpha", diagram_args.alpha, "Significance level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  diagram->add_option("-o,--out", diagram_args.out, "DOT path (stdout if omitted)");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation study file");
  simulate->add_option("study", simulate_args.study, "Study JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out-dir", simulate_args.out_dir, "Directory for the CSV outputs")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    std::cerr << target->help();
    return kExitInput;
  }

  if (fit->parsed()) return guarded([&] { return run_fit(g, fit_args); });
  if (summary->parsed()) return guarded([&] { return run_summary(summary_args); });
  if (pce->parsed()) return guarded([&] { return run_pce(pce_args); });
  if (select->parsed()) return guarded([&] { return run_select(g, select_args); });
  if (linear->parsed()) return guarded([&] { return run_linear(g, linear_args); });
  if (diagram->parsed()) return guarded([&] { return run_diagram(diagram_args); });
  if (simulate->parsed()) return guarded([&] { return run_simulate(g, simulate_args); });
  return kExitInput;
}
