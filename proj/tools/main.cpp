#include <geoscat/commands.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"spectral scattering workbench for closed manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;

  CLI::App* sub_spectrum =
      app.add_subcommand("spectrum", "build or load the eigenbasis and print a summary");
  CLI::App* sub_moments =
      app.add_subcommand("moments", "compute scattering moment tables for a signal");
  CLI::App* sub_verify =
      app.add_subcommand("verify", "run the invariant suites and emit a report");
  for (CLI::App* sub : {sub_spectrum, sub_moments, sub_verify}) {
    sub->add_option("--config", config_path, "run configuration file");
    sub->add_option("--seed", seed, "seed override; wins over the config file");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--threads", threads, "worker thread override")->check(CLI::Range(1, 256));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    geoscat::RunConfig cfg =
        config_path.empty() ? geoscat::RunConfig{} : geoscat::load_config(config_path);
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (sub->count("--threads")) cfg.threads = threads;
    if (sub->get_name() == "spectrum") return geoscat::cmd_spectrum(cfg);
    if (sub->get_name() == "moments") return geoscat::cmd_moments(cfg);
    return geoscat::cmd_verify(cfg);
  } catch (const geoscat::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
