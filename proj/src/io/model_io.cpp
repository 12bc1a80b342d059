#include "nnstat/io/model_io.hpp"

#include "nnstat/error.hpp"

namespace nnstat::io {

Json column_meta_to_json(const ColumnMeta& m) {
  Json j;
  j["name"] = m.name;
  j["kind"] = m.kind == ColumnKind::kDummy ? "dummy" : "continuous";
  j["mean"] = m.mean;
  j["sd"] = m.sd;
  j["scale"] = m.scale;
  j["source"] = m.source;
  j["level"] = m.level;
  j["reference"] = m.reference;
  return j;
}

ColumnMeta column_meta_from_json(const Json& j) {
  ColumnMeta m;
  m.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dummy") {
    m.kind = ColumnKind::kDummy;
  } else if (kind == "continuous") {
    m.kind = ColumnKind::kContinuous;
  } else {
    throw InputError("column_meta: unknown kind '" + kind + "'");
  }
  m.mean = j.at("mean").get<double>();
  m.sd = j.at("sd").get<double>();
  m.scale = j.value("scale", 1.0);
  m.source = j.value("source", m.name);
  m.level = j.value("level", std::string());
  m.reference = j.value("reference", std::string());
  if (!(m.sd > 0.0)) throw InputError("column_meta: sd must be positive");
  return m;
}

Json response_meta_to_json(const ResponseMeta& m) {
  Json j;
  j["name"] = m.name;
  j["mean"] = m.mean;
  j["sd"] = m.sd;
  j["scale"] = m.scale;
  j["standardized"] = m.standardized;
  j["positive_level"] = m.positive_level;
  j["negative_level"] = m.negative_level;
  return j;
}

ResponseMeta response_meta_from_json(const Json& j) {
  ResponseMeta m;
  m.name = j.at("name").get<std::string>();
  m.mean = j.at("mean").get<double>();
  m.sd = j.at("sd").get<double>();
  m.scale = j.value("scale", 1.0);
  m.standardized = j.at("standardized").get<bool>();
  m.positive_level = j.value("positive_level", std::string());
  m.negative_level = j.value("negative_level", std::string());
  if (!(m.sd > 0.0)) throw InputError("response_meta: sd must be positive");
  return m;
}

Json model_to_json_doc(const ModelFile& m) {
  check_compatible(m.arch, m.theta);
  Json j;
  j["format_version"] = kFormatVersion;
  j["p"] = m.arch.p;
  j["q"] = m.arch.q;
  j["hidden_activation"] = to_string(m.arch.hidden);
  j["output_activation"] = to_string(m.arch.output);
  Json theta = Json::array();
  for (int i = 0; i < m.theta.size(); ++i) theta.push_back(m.theta[i]);
  j["theta"] = theta;
  j["lambda"] = m.lambda;
  Json cols = Json::array();
  for (const auto& c : m.columns) cols.push_back(column_meta_to_json(c));
  j["column_meta"] = cols;
  j["response_meta"] = response_meta_to_json(m.response);
  if (m.fit) {
    Json f;
    f["loglik"] = m.fit->loglik;
    f["converged"] = m.fit->converged;
    f["grad_max"] = m.fit->grad_max;
    f["iterations"] = m.fit->iterations;
    f["restarts"] = m.fit->restarts;
    f["best_restart"] = m.fit->best_restart;
    f["seed"] = m.fit->seed;
    j["fit"] = f;
  }
  return j;
}

std::string model_to_json(const ModelFile& m) {
  return dump_json(model_to_json_doc(m));
}

ModelFile model_from_json(const std::string& text) {
  const Json j = parse_json(text, "model file");
  check_format_version(j, "model file");
  ModelFile m;
  try {
    m.arch.p = j.at("p").get<int>();
    m.arch.q = j.at("q").get<int>();
    m.arch.hidden = parse_hidden_activation(j.at("hidden_activation").get<std::string>());
    m.arch.output = parse_output_activation(j.at("output_activation").get<std::string>());
    m.arch.validate();
    const auto& theta = j.at("theta");
    if (!theta.is_array() ||
        static_cast<int>(theta.size()) != m.arch.num_params()) {
      throw InputError("model file: theta must hold " +
                       std::to_string(m.arch.num_params()) + " values");
    }
    Eigen::VectorXd v(m.arch.num_params());
    for (int i = 0; i < v.size(); ++i) {
      if (!theta[i].is_number()) {
        throw InputError("model file: theta[" + std::to_string(i) +
                         "] is not a finite number");
      }
      v[i] = theta[i].get<double>();
    }
    m.theta = ParamVector(m.arch, v);
    m.lambda = j.at("lambda").get<double>();
    if (!(m.lambda >= 0.0)) throw InputError("model file: lambda must be >= 0");
    for (const auto& c : j.at("column_meta")) {
      m.columns.push_back(column_meta_from_json(c));
    }
    if (static_cast<int>(m.columns.size()) != m.arch.p) {
      throw InputError("model file: column_meta has " +
                       std::to_string(m.columns.size()) + " entries, p = " +
                       std::to_string(m.arch.p));
    }
    m.response = response_meta_from_json(j.at("response_meta"));
    if (j.contains("fit")) {
      const Json& f = j.at("fit");
      FitInfo info;
      info.loglik = f.at("loglik").get<double>();
      info.converged = f.at("converged").get<bool>();
      info.grad_max = f.at("grad_max").get<double>();
      info.iterations = f.value("iterations", 0);
      info.restarts = f.value("restarts", 0);
      info.best_restart = f.value("best_restart", 0);
      info.seed = f.value("seed", std::uint64_t{0});
      m.fit = info;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
  return m;
}

}  // namespace nnstat::io
