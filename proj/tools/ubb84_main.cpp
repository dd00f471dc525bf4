#include <cstdio>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>

#include "ubb84/scan.hpp"
#include "ubb84/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Certified key-rate lower bounds for the unbalanced phase-encoded BB84 protocol"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int parallelism = 0;
  auto* scan = app.add_subcommand("scan", "run the parameter scan from a config file");
  scan->add_option("-c,--config", config_path, "config file (flat key = value)")->required();
  scan->add_option("-o,--output-dir", output_dir, "override the configured output directory");
  scan->add_option("-j,--parallelism", parallelism, "override the configured worker count");

  unsigned long long seed = 1;
  bool corrupt = false;
  auto* verify = app.add_subcommand("verify", "run the invariant property suite");
  verify->add_option("-c,--config", config_path, "config file (only the seed is used)");
  verify->add_option("--seed", seed, "random seed for the property suite");
  verify->add_flag("--corrupt-povm", corrupt, "negative control: corrupt one POVM element");

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed()) {
      ubb84::cli::RunConfig cfg = ubb84::cli::parse_config_file(config_path);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (parallelism > 0) cfg.parallelism = parallelism;
      ubb84::cli::ScanResult res = ubb84::cli::run_scan(cfg);
      for (const auto& pt : res.points) {
        if (pt.ok()) {
          std::printf("point %d: kappa %.4g eta %.4g eta_det %.4g p_d %.4g -> rate %.6e "
                      "bits/cycle at |alpha|^2 %.4g\n",
                      pt.index, pt.kappa, pt.eta, pt.eta_det, pt.p_d, pt.report.rate,
                      pt.report.alpha_sq);
        } else {
          std::printf("point %d: kappa %.4g eta %.4g eta_det %.4g p_d %.4g -> ERROR %s\n",
                      pt.index, pt.kappa, pt.eta, pt.eta_det, pt.p_d, pt.error.c_str());
        }
      }
      std::printf("outputs in %s\n", cfg.output_dir.c_str());
      return res.all_ok() ? 0 : 1;
    }

    ubb84::cli::VerifyOptions opt;
    opt.seed = seed;
    opt.corrupt_povm = corrupt;
    if (!config_path.empty()) opt.seed = ubb84::cli::parse_config_file(config_path).seed;
    auto results = ubb84::cli::verify(opt);
    bool all = true;
    for (const auto& r : results) {
      std::printf("%-38s %s  (%s)\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                  r.detail.c_str());
      all = all && r.pass;
    }
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
