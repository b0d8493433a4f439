#include <CLI11.hpp>

#include "qnr/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quiver machines: algorithm trees, moduli metrics, automata, training"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "path to the experiment JSON")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  CLI11_PARSE(app, argc, argv);

  return qnr::cli::run(config_path,
                       out_dir.empty() ? std::nullopt : std::make_optional(out_dir),
                       seed_set ? std::make_optional(seed) : std::nullopt);
}
