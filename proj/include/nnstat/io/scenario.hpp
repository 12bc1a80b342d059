#pragma once

// Simulation study files:
//   {"format_version": 1, "study": "scenario", "p": 6, "q": 2,
//    "pattern": "5-1", "n": 1000, "lambda": 0.01, "replicates": 200,
//    "restarts": 10, "seed": 1, "noise_sd": 1.0, "true_theta": [...]}
// "study" is "scenario" (default), "power" (needs "effects") or "pd"
// (optional "lambdas", "qs", "patterns", "ns"; each defaults to the single
// base value). Omitted fields keep the SimScenario defaults.

#include <filesystem>
#include <vector>

#include "nnstat/io/json.hpp"
#include "nnstat/simgen.hpp"

namespace nnstat::io {

enum class StudyKind { kScenario, kPower, kPd };

struct StudyFile {
  StudyKind kind = StudyKind::kScenario;
  SimScenario base;
  std::vector<double> effects;
  std::vector<double> lambdas;
  std::vector<int> qs;
  std::vector<NzPattern> patterns;
  std::vector<int> ns;
};

// Throws InputError for unknown keys, wrong types or a missing effect list.
StudyFile parse_study(const Json& doc);
StudyFile load_study(const std::filesystem::path& path);

}  // namespace nnstat::io
