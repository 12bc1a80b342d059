#pragma once

// CSV ingestion: numeric covariates are standardized with the sample sd,
// factors are dummy-coded against a reference level (first observed unless
// pinned by a schema) into columns named "variable.level". Missing values
// and zero-variance columns are errors.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnstat/io/csv.hpp"
#include "nnstat/io/json.hpp"
#include "nnstat/likelihood.hpp"
#include "nnstat/model.hpp"

namespace nnstat::io {

// Per-column overrides. Schema JSON:
//   {"format_version": 1, "response": "charges", "drop": ["id"],
//    "standardize_response": true, "positive_level": "yes",
//    "columns": {"charges": {"scale": 0.001},
//                "smoker": {"reference": "no", "name": "smoker"},
//                "region": {"levels": ["northeast", "northwest"],
//                           "labels": {"northwest": "nw"}}}}
struct ColumnSchema {
  std::optional<std::string> type;  // "numeric" or "factor"
  std::optional<std::string> reference;
  std::vector<std::string> levels;  // explicit level order
  std::map<std::string, std::string> labels;  // level -> name suffix
  std::optional<std::string> name;  // dummy name of a two-level factor
  double scale = 1.0;
  bool standardize = true;
};

struct Schema {
  std::optional<std::string> response;
  std::vector<std::string> drop;
  std::optional<bool> standardize_response;
  std::optional<std::string> positive_level;
  std::map<std::string, ColumnSchema> columns;
};

Schema parse_schema(const Json& doc);
Schema load_schema(const std::filesystem::path& path);

enum class PlanAction { kStandardize, kDummyEncode, kPassthrough };

std::string to_string(PlanAction a);

struct PlanEntry {
  std::string source;
  PlanAction action = PlanAction::kStandardize;
  double scale = 1.0;
  std::string reference;            // dummy-encoded factors only
  std::vector<std::string> levels;  // non-reference levels, output order
  std::vector<std::string> outputs;  // model column names
};

struct PreprocessPlan {
  std::vector<PlanEntry> inputs;
  std::string response;
  PlanAction response_action = PlanAction::kStandardize;
  double response_scale = 1.0;
};

struct IngestOptions {
  std::string response;  // overrides schema.response when non-empty
  Family family = Family::kGaussian;
  Schema schema;
};

struct Ingested {
  Dataset data;
  PreprocessPlan plan;
};

// Throws InputError for an unknown response, missing values (listing
// row/column), unparsable numerics, zero-variance columns, single-level
// factors and schema entries naming unknown columns or levels.
Ingested ingest(const CsvTable& table, const IngestOptions& options);
Ingested ingest_file(const std::filesystem::path& path,
                     const IngestOptions& options);

// Rebuilds a model matrix from raw CSV with stored metadata (the statistics
// recorded at fit time, not recomputed). Throws InputError for missing
// source columns, missing values and unseen factor levels.
Dataset apply_metadata(const CsvTable& table,
                       const std::vector<ColumnMeta>& columns,
                       const ResponseMeta& response);

bool is_missing(const std::string& field);

}  // namespace nnstat::io
