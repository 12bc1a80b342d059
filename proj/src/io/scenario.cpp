#include "nnstat/io/scenario.hpp"

#include <set>

#include "nnstat/error.hpp"
#include "nnstat/io/files.hpp"

namespace nnstat::io {

namespace {

template <typename T>
std::vector<T> list_of(const Json& doc, const char* key) {
  std::vector<T> out;
  if (!doc.contains(key)) return out;
  const Json& a = doc.at(key);
  if (!a.is_array() || a.empty()) {
    throw InputError(std::string("study file: '") + key +
                     "' must be a non-empty array");
  }
  for (const auto& v : a) out.push_back(v.get<T>());
  return out;
}

}  // namespace

StudyFile parse_study(const Json& doc) {
  check_format_version(doc, "study file");
  static const std::set<std::string> kKeys = {
      "format_version", "study",    "p",       "q",          "pattern",
      "n",              "lambda",   "replicates", "restarts", "seed",
      "noise_sd",       "true_theta", "effects", "lambdas",   "qs",
      "patterns",       "ns",       "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key)) {
      throw InputError("study file: unknown key '" + key + "'");
    }
  }
  StudyFile s;
  SimScenario& b = s.base;
  try {
    const std::string study = doc.value("study", std::string("scenario"));
    if (study == "scenario") {
      s.kind = StudyKind::kScenario;
    } else if (study == "power") {
      s.kind = StudyKind::kPower;
    } else if (study == "pd") {
      s.kind = StudyKind::kPd;
    } else {
      throw InputError("study file: unknown study '" + study +
                       "' (scenario, power or pd)");
    }
    b.p = doc.value("p", b.p);
    b.q = doc.value("q", b.q);
    if (doc.contains("pattern")) {
      b.pattern = parse_nz_pattern(doc.at("pattern").get<std::string>());
    }
    b.n = doc.value("n", b.n);
    b.lambda = doc.value("lambda", b.lambda);
    b.replicates = doc.value("replicates", b.replicates);
    b.restarts = doc.value("restarts", b.restarts);
    b.seed = doc.value("seed", b.seed);
    b.noise_sd = doc.value("noise_sd", b.noise_sd);
    b.threads = doc.value("threads", b.threads);
    if (doc.contains("true_theta")) {
      const auto v = list_of<double>(doc, "true_theta");
      Eigen::VectorXd t(static_cast<int>(v.size()));
      for (size_t i = 0; i < v.size(); ++i) t[i] = v[i];
      b.true_theta = ParamVector(b.arch(), t);
    }
    s.effects = list_of<double>(doc, "effects");
    s.lambdas = list_of<double>(doc, "lambdas");
    s.qs = list_of<int>(doc, "qs");
    for (const auto& name : list_of<std::string>(doc, "patterns")) {
      s.patterns.push_back(parse_nz_pattern(name));
    }
    s.ns = list_of<int>(doc, "ns");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("study file: ") + e.what());
  }
  if (s.kind == StudyKind::kPower && s.effects.empty()) {
    throw InputError("study file: a power study needs 'effects'");
  }
  if (s.kind == StudyKind::kPd) {
    if (s.lambdas.empty()) s.lambdas = {b.lambda};
    if (s.qs.empty()) s.qs = {b.q};
    if (s.patterns.empty()) s.patterns = {b.pattern};
    if (s.ns.empty()) s.ns = {b.n};
  }
  b.validate();
  return s;
}

StudyFile load_study(const std::filesystem::path& path) {
  return parse_study(parse_json(read_file(path), path.string()));
}

}  // namespace nnstat::io
