#pragma once

#include <json.hpp>
#include <string>

namespace propmap {

// Outcome of one job: exit code 0 (ok), 1 (computation error, structured
// error report), or 2 (schema error). The report is the full JSON document
// to emit; byte-identical across reruns with the same seed.
struct JobResult {
  int exit_code = 0;
  nlohmann::json report;
};

// Dispatch a validated job file. Commands: classify, normalize, invariant,
// pontryagin-extract, pontryagin-construct, pontryagin-realizable,
// counterexamples. Unknown fields are rejected.
JobResult run_job(const nlohmann::json& job);

// Tolerance/constant block embedded in every report.
nlohmann::json tolerances_json();

}  // namespace propmap
