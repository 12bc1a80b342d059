#pragma once

// Model JSON:
//   {"format_version": 1, "p": 8, "q": 2, "hidden_activation": "logistic",
//    "output_activation": "identity", "theta": [r floats], "lambda": 0.01,
//    "column_meta": [...], "response_meta": {...},
//    "fit": {"loglik": ..., "converged": true, "grad_max": ...,
//            "iterations": ..., "restarts": 10, "best_restart": 3,
//            "seed": 1}}
// The "fit" block is optional.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnstat/io/json.hpp"
#include "nnstat/likelihood.hpp"
#include "nnstat/model.hpp"

namespace nnstat::io {

struct FitInfo {
  double loglik = 0.0;
  bool converged = false;
  double grad_max = 0.0;
  int iterations = 0;
  int restarts = 0;
  int best_restart = 0;
  std::uint64_t seed = 0;
};

struct ModelFile {
  Architecture arch;
  ParamVector theta;
  double lambda = 0.0;
  std::vector<ColumnMeta> columns;
  ResponseMeta response;
  std::optional<FitInfo> fit;

  Family family() const { return family_for(arch.output); }
};

Json model_to_json_doc(const ModelFile& m);
std::string model_to_json(const ModelFile& m);
// Throws InputError for a wrong format_version, missing fields or sizes
// that disagree with (p, q).
ModelFile model_from_json(const std::string& text);

Json column_meta_to_json(const ColumnMeta& m);
ColumnMeta column_meta_from_json(const Json& j);
Json response_meta_to_json(const ResponseMeta& m);
ResponseMeta response_meta_from_json(const Json& j);

}  // namespace nnstat::io
