#include "toeplab/errors.hpp"
#include "toeplab/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"toeplab: Toeplitz spectral asymptotics on the sphere"};
  std::string experiment;
  std::string manifest_path;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* experiment_opt = app.add_option("--experiment", experiment, "theorem1 | theorem2 | inverse | model | distinguish");
  app.add_option("--manifest", manifest_path, "JSON manifest {experiment, parameters, output}")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output path prefix (<prefix>.csv, <prefix>.json, <prefix>.manifest.json)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides parameters.seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : toeplab::kExitValidation;
  }

  try {
    toeplab::Json manifest = toeplab::Json::object();
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      try {
        manifest = toeplab::Json::parse(in);
      } catch (const toeplab::Json::parse_error& e) {
        throw toeplab::ValidationError(std::string("cli::run: manifest is not valid JSON: ") + e.what());
      }
      if (!manifest.is_object()) throw toeplab::ValidationError("cli::run: manifest must be a JSON object");
    }
    if (*experiment_opt) {
      if (manifest.contains("experiment") && manifest["experiment"] != experiment)
        throw toeplab::ValidationError("cli::run: --experiment " + experiment + " conflicts with the manifest");
      manifest["experiment"] = experiment;
    }
    if (!manifest.contains("experiment"))
      throw toeplab::ValidationError("cli::run: give --experiment or a manifest naming one");

    toeplab::RunSettings settings;
    settings.out_prefix = out;
    settings.threads = threads;
    if (*seed_opt) settings.seed = seed;
    const auto result = toeplab::run_experiment(manifest, settings);
    for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    if (result.exit_code != toeplab::kExitOk) std::cerr << "verification failed; see the JSON report\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return toeplab::exit_code_for(e);
  }
}
