#pragma once

#include "toeplab/io.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace toeplab {

inline const std::vector<std::string> kExperimentNames = {"theorem1", "theorem2", "inverse", "model", "distinguish"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunSettings {
  std::string out_prefix;  // overrides the manifest "output" when non-empty
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // overrides parameters.seed
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  Json summary;
};

/// Manifest: {"experiment": name, "parameters": {...}, "output": prefix}.
/// Every parameter is optional; missing ones take the experiment defaults,
/// unknown ones are schema errors. Returns the manifest with all defaults
/// filled in. Throws ValidationError listing every violation.
Json resolve_manifest(const Json& manifest, const RunSettings& settings = {});

/// Validates, runs and writes <prefix>.csv, <prefix>.json and
/// <prefix>.manifest.json. Exit code 3 when a verification check fails.
RunResult run_experiment(const Json& manifest, const RunSettings& settings);

/// 2 for ValidationError, 3 for every other failure.
int exit_code_for(const std::exception& e);

}  // namespace toeplab
