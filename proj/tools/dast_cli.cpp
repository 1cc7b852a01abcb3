// dast: run identification experiments and write result records.
//
//   dast --experiment identify --config run.cfg --out rec.csv
//   dast --experiment fig2 --threads 4 --format json --out fig2.json
//
// Exit codes: 0 success, 2 invalid config, 3 some solve did not converge
// (records are still written), 1 any other failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dast/errors.hpp"
#include "dast/experiment.hpp"

namespace {

std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized atomic soft thresholding experiments"};
  std::string config_path, out_path, experiment = "identify", format = "csv";
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "base seed (overrides the config)");
  app.add_option("--out", out_path, "record file; stdout when omitted");
  app.add_option("--experiment", experiment, "identify | fig2 | fig3")
      ->check(CLI::IsMember({"identify", "fig2", "fig3"}));
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  dast::SweepResult res;
  try {
    dast::Config cfg = config_path.empty() ? dast::Config{} : dast::Config::load(config_path);
    if (app.count("--seed")) cfg.set("seed", std::to_string(seed));
    if (app.count("--threads")) cfg.set("threads", std::to_string(threads));
    cfg.set("experiment", experiment);
    if (experiment == "identify") {
      res.records.push_back(dast::run_identify(cfg));
    } else if (experiment == "fig2") {
      res = dast::run_error_vs_n(cfg);
    } else {
      res = dast::run_dast_vs_subspace(cfg);
    }
  } catch (const dast::InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    if (format == "csv") {
      dast::write_records_csv(os, res.records);
    } else {
      os << dast::records_to_json(res.records).dump(2) << '\n';
    }
    if (!res.plot.empty()) {
      if (out_path.empty()) {
        std::cerr << "plot data:\n";
        dast::write_plot_csv(std::cerr, res.plot);
      } else {
        std::ofstream pf(sibling(out_path, "_plot.csv"));
        dast::write_plot_csv(pf, res.plot);
      }
    }
    for (const auto& [name, ok] : res.flags) std::cerr << name << ": " << (ok ? "pass" : "fail") << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return dast::any_not_converged(res.records) ? 3 : 0;
}
