// formcalc: reproducible experiment driver for the form-fitting library.
//
//   formcalc <subcommand> --config path [--seed u64] [--out path]
//
// Subcommands: whitney-check, lebesgue, opnorm, thm1, thm2, perturb,
// map-bound. Results are printed as JSON; --out additionally writes
// <out>.json and a flattened <out>.csv. Exit codes: 0 success, 2 config
// error, 3 numerical failure. FORMCALC_THREADS caps the worker pool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "formcalc/experiment.hpp"

namespace {

using formcalc::json;

void flatten_csv(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      flatten_csv(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i)
      flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << "," << j.dump() << "\n";
  }
}

/// Writes the record atomically: a failed run never leaves partial files.
void write_outputs(const json& record, const std::string& out_path) {
  namespace fs = std::filesystem;
  const fs::path base(out_path);
  const fs::path json_path = base.extension() == ".json" ? base : fs::path(out_path + ".json");
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");

  const fs::path json_tmp = json_path.string() + ".tmp";
  const fs::path csv_tmp = csv_path.string() + ".tmp";
  {
    std::ofstream f(json_tmp);
    if (!f) throw formcalc::ConfigError("cannot write output file " + json_path.string());
    f << record.dump(2) << "\n";
  }
  {
    std::ofstream f(csv_tmp);
    f << "key,value\n";
    flatten_csv(record["results"], "", f);
  }
  fs::rename(json_tmp, json_path);
  fs::rename(csv_tmp, csv_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniform approximation of differential forms from weak data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const std::vector<std::string> commands = {"whitney-check", "lebesgue", "opnorm",
                                             "thm1",          "thm2",     "perturb",
                                             "map-bound"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_path, "output path (writes .json and .csv)");
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file '" << config_path << "'\n";
      return 2;
    }
    json raw;
    try {
      in >> raw;
    } catch (const json::parse_error& e) {
      std::cerr << "error: invalid JSON in '" << config_path << "': " << e.what() << "\n";
      return 2;
    }

    formcalc::ExperimentConfig ec = formcalc::parse_experiment(raw);
    if (seed_given) ec.options.seed = seed;

    const json record = formcalc::run_command(command, ec);
    std::cout << record.dump(2) << std::endl;
    if (!out_path.empty()) write_outputs(record, out_path);
    return 0;
  } catch (const formcalc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const formcalc::NotDeterminingError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const formcalc::NotUnisolventError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const formcalc::DegeneracyError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const formcalc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
