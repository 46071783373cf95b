#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "qfhc/errors.hpp"

int main(int argc, char** argv) {
  using namespace qfhc::cli;
  CLI::App app{"q-frequent hypercyclicity experiments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<qfhc::Index> horizon;
  std::optional<double> tol;

  for (const char* name : {"density", "jsets", "criterion", "construct", "orbit", "weakstar", "sweep"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--horizon", horizon, "time horizon");
    sub->add_option("--tol", tol, "convergence tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    cfg.scenario = app.get_subcommands().front()->get_name();
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out) cfg.out = *out;
    if (horizon) cfg.horizon = *horizon;
    if (tol) cfg.tol = *tol;
    return run(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qfhc::ResourceLimit& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
