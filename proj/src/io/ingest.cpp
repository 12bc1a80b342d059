#include "nnstat/io/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "nnstat/error.hpp"
#include "nnstat/io/files.hpp"

namespace nnstat::io {

namespace {

constexpr size_t kMaxReported = 10;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// "row" is the 1-based data row; the file line is one more for the header.
std::string location(int row, const std::string& col) {
  return "row " + std::to_string(row + 1) + " (line " + std::to_string(row + 2) +
         "), column '" + col + "'";
}

void check_missing(const CsvTable& t, const std::vector<int>& cols) {
  std::vector<std::string> hits;
  size_t total = 0;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    for (int c : cols) {
      if (is_missing(t.rows[r][c])) {
        ++total;
        if (hits.size() < kMaxReported) {
          hits.push_back(location(static_cast<int>(r), t.header[c]));
        }
      }
    }
  }
  if (total == 0) return;
  std::string msg = "missing values (" + std::to_string(total) + "): ";
  for (size_t i = 0; i < hits.size(); ++i) msg += (i ? "; " : "") + hits[i];
  if (total > hits.size()) msg += "; ...";
  throw InputError(msg);
}

std::vector<double> numeric_column(const CsvTable& t, int c, double scale) {
  std::vector<double> v(t.rows.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto x = parse_number(t.rows[r][c]);
    if (!x) {
      throw InputError("non-numeric value '" + t.rows[r][c] + "' at " +
                       location(static_cast<int>(r), t.header[c]));
    }
    v[r] = *x * scale;
  }
  return v;
}

bool all_numeric(const CsvTable& t, int c) {
  for (const auto& row : t.rows) {
    if (!parse_number(row[c])) return false;
  }
  return true;
}

std::vector<std::string> observed_levels(const CsvTable& t, int c) {
  std::vector<std::string> levels;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    const std::string v = trim(row[c]);
    if (seen.insert(v).second) levels.push_back(v);
  }
  return levels;
}

std::pair<double, double> sample_moments(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd =
      v.size() > 1 ? std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) : 0.0;
  return {mean, sd};
}

void require_variance(double sd, const std::string& name) {
  if (!(sd > 0.0)) {
    throw InputError("zero variance column '" + name +
                     "' cannot be standardized");
  }
}

const ColumnSchema& schema_for(const Schema& s, const std::string& name) {
  static const ColumnSchema kDefault;
  const auto it = s.columns.find(name);
  return it == s.columns.end() ? kDefault : it->second;
}

// Reference first, then the remaining levels in output order.
std::vector<std::string> ordered_levels(const CsvTable& t, int c,
                                        const ColumnSchema& cs) {
  const std::string& name = t.header[c];
  std::vector<std::string> observed = observed_levels(t, c);
  std::vector<std::string> levels;
  if (!cs.levels.empty()) {
    levels = cs.levels;
    for (const auto& v : observed) {
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) {
        throw InputError("column '" + name + "' has level '" + v +
                         "' not listed in the schema");
      }
    }
    std::vector<std::string> present;
    for (const auto& l : levels) {
      if (std::find(observed.begin(), observed.end(), l) != observed.end()) {
        present.push_back(l);
      }
    }
    levels = present;
  } else {
    levels = observed;
  }
  if (cs.reference) {
    auto it = std::find(levels.begin(), levels.end(), *cs.reference);
    if (it == levels.end()) {
      throw InputError("reference level '" + *cs.reference +
                       "' does not occur in column '" + name + "'");
    }
    std::rotate(levels.begin(), it, it + 1);
  }
  if (levels.size() < 2) {
    throw InputError("zero variance column '" + name +
                     "' (factor with a single level)");
  }
  return levels;
}

std::string label_for(const ColumnSchema& cs, const std::string& level) {
  const auto it = cs.labels.find(level);
  return it == cs.labels.end() ? level : it->second;
}

}  // namespace

bool is_missing(const std::string& field) {
  const std::string s = trim(field);
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" ||
         s == "null" || s == "NULL";
}

std::string to_string(PlanAction a) {
  switch (a) {
    case PlanAction::kStandardize:
      return "standardize";
    case PlanAction::kDummyEncode:
      return "dummy_encode";
    case PlanAction::kPassthrough:
      return "passthrough";
  }
  return "passthrough";
}

Schema parse_schema(const Json& doc) {
  check_format_version(doc, "schema");
  Schema s;
  try {
    if (doc.contains("response")) s.response = doc["response"].get<std::string>();
    if (doc.contains("drop")) s.drop = doc["drop"].get<std::vector<std::string>>();
    if (doc.contains("standardize_response")) {
      s.standardize_response = doc["standardize_response"].get<bool>();
    }
    if (doc.contains("positive_level")) {
      s.positive_level = doc["positive_level"].get<std::string>();
    }
    if (doc.contains("columns")) {
      for (const auto& [name, c] : doc["columns"].items()) {
        ColumnSchema cs;
        for (const auto& [key, v] : c.items()) {
          if (key == "type") {
            cs.type = v.get<std::string>();
            if (*cs.type != "numeric" && *cs.type != "factor") {
              throw InputError("schema column '" + name +
                               "': type must be numeric or factor");
            }
          } else if (key == "reference") {
            cs.reference = v.get<std::string>();
          } else if (key == "levels") {
            cs.levels = v.get<std::vector<std::string>>();
          } else if (key == "labels") {
            cs.labels = v.get<std::map<std::string, std::string>>();
          } else if (key == "name") {
            cs.name = v.get<std::string>();
          } else if (key == "scale") {
            cs.scale = v.get<double>();
            if (!(cs.scale > 0.0) || !std::isfinite(cs.scale)) {
              throw InputError("schema column '" + name +
                               "': scale must be positive");
            }
          } else if (key == "standardize") {
            cs.standardize = v.get<bool>();
          } else {
            throw InputError("schema column '" + name + "': unknown key '" +
                             key + "'");
          }
        }
        s.columns[name] = cs;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("schema: ") + e.what());
  }
  return s;
}

Schema load_schema(const std::filesystem::path& path) {
  return parse_schema(parse_json(read_file(path), path.string()));
}

Ingested ingest(const CsvTable& table, const IngestOptions& options) {
  const Schema& schema = options.schema;
  const std::string response =
      !options.response.empty() ? options.response
                                : schema.response.value_or(std::string());
  if (response.empty()) throw InputError("no response column given");
  const int rc = table.column(response);
  if (rc < 0) throw InputError("unknown response column '" + response + "'");
  if (table.rows.empty()) throw InputError("CSV has no data rows");
  for (const auto& [name, cs] : schema.columns) {
    if (table.column(name) < 0) {
      throw InputError("schema names unknown column '" + name + "'");
    }
  }
  for (const auto& d : schema.drop) {
    if (table.column(d) < 0) {
      throw InputError("schema drops unknown column '" + d + "'");
    }
    if (d == response) throw InputError("cannot drop the response column");
  }

  std::vector<int> inputs;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c == rc) continue;
    if (std::find(schema.drop.begin(), schema.drop.end(), table.header[c]) !=
        schema.drop.end()) {
      continue;
    }
    inputs.push_back(c);
  }
  if (inputs.empty()) throw InputError("no covariate columns");
  std::vector<int> used = inputs;
  used.push_back(rc);
  check_missing(table, used);

  const int n = static_cast<int>(table.rows.size());
  Ingested out;
  PreprocessPlan& plan = out.plan;
  std::vector<std::vector<double>> cols;
  std::vector<ColumnMeta> metas;
  for (int c : inputs) {
    const std::string& name = table.header[c];
    const ColumnSchema& cs = schema_for(schema, name);
    const bool numeric =
        cs.type ? *cs.type == "numeric" : all_numeric(table, c);
    PlanEntry e;
    e.source = name;
    if (numeric) {
      e.scale = cs.scale;
      std::vector<double> v = numeric_column(table, c, cs.scale);
      const auto [mean, sd] = sample_moments(v);
      require_variance(sd, name);
      ColumnMeta m;
      m.name = name;
      m.source = name;
      m.scale = cs.scale;
      if (cs.standardize) {
        e.action = PlanAction::kStandardize;
        m.mean = mean;
        m.sd = sd;
        for (double& x : v) x = (x - mean) / sd;
      } else {
        e.action = PlanAction::kPassthrough;
      }
      e.outputs.push_back(name);
      cols.push_back(std::move(v));
      metas.push_back(m);
    } else {
      e.action = PlanAction::kDummyEncode;
      const std::vector<std::string> levels = ordered_levels(table, c, cs);
      e.reference = levels.front();
      for (size_t l = 1; l < levels.size(); ++l) {
        const std::string& level = levels[l];
        ColumnMeta m;
        m.kind = ColumnKind::kDummy;
        m.name = (cs.name && levels.size() == 2)
                     ? *cs.name
                     : name + "." + label_for(cs, level);
        m.source = name;
        m.level = level;
        m.reference = e.reference;
        std::vector<double> v(n);
        for (int r = 0; r < n; ++r) v[r] = trim(table.rows[r][c]) == level;
        e.levels.push_back(level);
        e.outputs.push_back(m.name);
        cols.push_back(std::move(v));
        metas.push_back(m);
      }
    }
    plan.inputs.push_back(e);
  }
  std::set<std::string> names;
  for (const auto& m : metas) {
    if (!names.insert(m.name).second) {
      throw InputError("duplicate model column name '" + m.name + "'");
    }
  }

  Dataset& d = out.data;
  d.x.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    for (int r = 0; r < n; ++r) d.x(r, static_cast<Eigen::Index>(j)) = cols[j][r];
  }
  d.columns = metas;

  plan.response = response;
  ResponseMeta& rm = d.response;
  rm.name = response;
  d.y.resize(n);
  const ColumnSchema& rs = schema_for(schema, response);
  if (options.family == Family::kGaussian) {
    rm.scale = rs.scale;
    const std::vector<double> v = numeric_column(table, rc, rs.scale);
    plan.response_scale = rs.scale;
    const bool standardize = schema.standardize_response.value_or(true);
    const auto [mean, sd] = sample_moments(v);
    if (standardize) {
      require_variance(sd, response);
      rm.mean = mean;
      rm.sd = sd;
      rm.standardized = true;
      plan.response_action = PlanAction::kStandardize;
    } else {
      plan.response_action = PlanAction::kPassthrough;
    }
    for (int r = 0; r < n; ++r) d.y[r] = standardize ? (v[r] - mean) / sd : v[r];
  } else {
    plan.response_action = PlanAction::kPassthrough;
    if (!rs.type.has_value() && all_numeric(table, rc)) {
      for (int r = 0; r < n; ++r) {
        const double v = *parse_number(table.rows[r][rc]);
        if (v != 0.0 && v != 1.0) {
          throw InputError("bernoulli response must be 0/1 at " +
                           location(r, response));
        }
        d.y[r] = v;
      }
    } else {
      std::vector<std::string> levels = observed_levels(table, rc);
      if (levels.size() != 2) {
        throw InputError("bernoulli response '" + response +
                         "' must have exactly two levels");
      }
      std::string positive = schema.positive_level.value_or(levels[1]);
      if (std::find(levels.begin(), levels.end(), positive) == levels.end()) {
        throw InputError("positive level '" + positive +
                         "' does not occur in '" + response + "'");
      }
      rm.positive_level = positive;
      rm.negative_level = levels[0] == positive ? levels[1] : levels[0];
      for (int r = 0; r < n; ++r) d.y[r] = trim(table.rows[r][rc]) == positive;
    }
  }
  d.validate();
  return out;
}

Ingested ingest_file(const std::filesystem::path& path,
                     const IngestOptions& options) {
  return ingest(read_csv(path), options);
}

Dataset apply_metadata(const CsvTable& table,
                       const std::vector<ColumnMeta>& columns,
                       const ResponseMeta& response) {
  const int n = static_cast<int>(table.rows.size());
  if (n == 0) throw InputError("CSV has no data rows");
  std::vector<int> used;
  auto source_col = [&](const std::string& name) {
    const int c = table.column(name);
    if (c < 0) throw InputError("CSV lacks column '" + name + "'");
    return c;
  };
  for (const auto& m : columns) used.push_back(source_col(m.source));
  const int rc = source_col(response.name);
  used.push_back(rc);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  check_missing(table, used);

  // Known levels per factor source: the reference plus every dummy level.
  std::map<std::string, std::set<std::string>> known;
  for (const auto& m : columns) {
    if (m.kind == ColumnKind::kDummy) {
      known[m.source].insert(m.level);
      known[m.source].insert(m.reference);
    }
  }
  for (const auto& [src, levels] : known) {
    const int c = source_col(src);
    for (int r = 0; r < n; ++r) {
      const std::string v = trim(table.rows[r][c]);
      if (!levels.count(v)) {
        throw InputError("unseen level '" + v + "' at " + location(r, src));
      }
    }
  }

  Dataset d;
  d.columns = columns;
  d.response = response;
  d.x.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (size_t j = 0; j < columns.size(); ++j) {
    const ColumnMeta& m = columns[j];
    const int c = source_col(m.source);
    if (m.kind == ColumnKind::kDummy) {
      for (int r = 0; r < n; ++r) {
        d.x(r, static_cast<Eigen::Index>(j)) = trim(table.rows[r][c]) == m.level;
      }
    } else {
      const std::vector<double> v = numeric_column(table, c, m.scale);
      for (int r = 0; r < n; ++r) {
        d.x(r, static_cast<Eigen::Index>(j)) = (v[r] - m.mean) / m.sd;
      }
    }
  }
  d.y.resize(n);
  if (!response.positive_level.empty()) {
    for (int r = 0; r < n; ++r) {
      const std::string v = trim(table.rows[r][rc]);
      if (v != response.positive_level && v != response.negative_level) {
        throw InputError("unseen response level '" + v + "' at " +
                         location(r, response.name));
      }
      d.y[r] = v == response.positive_level;
    }
  } else {
    const std::vector<double> v = numeric_column(table, rc, response.scale);
    for (int r = 0; r < n; ++r) {
      d.y[r] = response.standardized ? (v[r] - response.mean) / response.sd
                                     : v[r];
    }
  }
  d.validate();
  return d;
}

}  // namespace nnstat::io
