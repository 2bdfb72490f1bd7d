// cdu: co-design under uncertainty, task-driven UAV benchmark runner.
//
// Flags mirror RunConfig fields; --config loads a key/value file first and
// explicit flags override it. Exit codes: 0 ok, 2 config error, 3 numerical
// failure.

#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdu/cli.hpp"
#include "cdu/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"monotone co-design with uncertainty: UAV benchmark experiments"};
  app.footer("Config keys are documented in docs/config.md; flags override the file.");

  std::optional<std::string> experiment;
  std::optional<std::string> config_path;
  std::optional<std::string> catalog_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<unsigned> workers;

  app.add_option("--experiment", experiment,
                 "deterministic|interval|distributional|adaptive|selftest");
  app.add_option("--config", config_path, "path to a key/value config file");
  app.add_option("--catalog", catalog_path, "path to a catalog file (default: built-in)");
  app.add_option("--seed", seed, "64-bit unsigned RNG seed");
  app.add_option("--n", n, "Monte Carlo sample count (>= 1)");
  app.add_option("--out", out_dir, "output directory (default: $CDU_OUT_DIR or ./out)");
  app.add_option("--format", format, "comma-separated subset of csv,json,svg");
  app.add_option("--workers", workers, "worker thread count (>= 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cdu::kExitOk : cdu::kExitConfig;
  }

  cdu::RunConfig cfg;
  try {
    if (config_path) cfg = cdu::load_config(*config_path);
    if (experiment) cfg.experiment = cdu::parse_experiment(*experiment);
    if (catalog_path) cfg.catalog_path = *catalog_path;
    if (seed) cfg.seed = *seed;
    if (n) cfg.n = *n;
    if (out_dir) cfg.out_dir = *out_dir;
    if (format) cdu::apply_config_entry(cfg, "format", *format);
    if (workers) cfg.workers = *workers;
  } catch (const cdu::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return cdu::kExitConfig;
  }

  return cdu::guarded_run(cfg);
}
