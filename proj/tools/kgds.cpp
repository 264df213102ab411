// kgds: command-line driver for the de Sitter Klein-Gordon solver.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag> kValueFlags{
    {"--n", "n", "spatial dimension"},
    {"--mass", "mass", "physical mass m (default: the knot mass sqrt(n^2-1)/2)"},
    {"--masses", "masses", "comma-separated mass list for huygens"},
    {"--profile", "profile", "bump | gaussian_trunc | zero"},
    {"--radius", "radius", "support radius of the data, below 1"},
    {"--power", "power", "bump exponent p"},
    {"--alpha", "alpha", "gaussian_trunc exponent"},
    {"--tmax", "tmax", "final time"},
    {"--tsteps", "tsteps", "number of time intervals"},
    {"--rmax", "rmax", "largest sample radius"},
    {"--rsteps", "rsteps", "number of sample radii"},
    {"--x", "x", "sample point for asympt, comma-separated"},
    {"--dr", "dr", "FD grid spacing for compare"},
    {"--out", "out", "output path, - for stdout"},
    {"--format", "format", "csv | json"},
    {"--margin", "margin", "exit-time margin for huygens"},
    {"--order", "order", "expansion order N for asympt"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon equation in de Sitter spacetime: solver and experiments"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_path;
  std::map<std::string, bool> first_only;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  std::map<std::string, CLI::Option*> first_only_opt;

  const std::vector<std::pair<const char*, const char*>> commands{
      {"solve", "sample the solution on an (r, t) grid"},
      {"kernel", "tabulate K0 and K1 inside the light cone"},
      {"huygens", "measure tails at the origin across masses"},
      {"asympt", "fit the decay rate of the large-time expansion residual"},
      {"compare", "representation solver against the finite-difference oracle"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    subs.push_back(sub);
    sub->add_option("--config", config_path[name], "key=value config file; flags take precedence");
    for (const auto& f : kValueFlags) options[name].push_back({f.key, sub->add_option(f.name, values[name][f.key], f.help)});
    first_only_opt[name] = sub->add_flag("--first-datum-only", first_only[name], "set the second datum to zero");
  }

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    kgds::cli::RunConfig cfg;
    try {
      if (!config_path[name].empty()) {
        std::ifstream is(config_path[name]);
        if (!is) throw kgds::cli::ConfigError("cannot read config file '" + config_path[name] + "'");
        cfg = kgds::cli::parse_config(is);
      }
      cfg.subcommand = name;
      for (const auto& [key, opt] : options[name])
        if (opt->count() > 0) kgds::cli::set_key(cfg, key, values[name][key]);
      if (first_only_opt[name]->count() > 0) cfg.first_datum_only = true;
    } catch (const kgds::cli::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kgds::cli::kExitConfig;
    }
    return kgds::cli::run(cfg);
  }
  return kgds::cli::kExitConfig;
}
