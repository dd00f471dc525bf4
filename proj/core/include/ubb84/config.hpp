#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ubb84/keyrate.hpp"

namespace ubb84::cli {

/// Batch-scan configuration, parsed from a flat key = value file. List
/// values are comma separated; the scan runs the cartesian product of the
/// kappa, eta, eta_det and p_d lists under fixed trust flags.
struct RunConfig {
  std::vector<double> kappa{1.0};
  std::vector<double> eta{1.0};
  std::vector<double> eta_det{1.0};
  std::vector<double> p_d{8.5e-7};
  bool trusted_dark = true;
  bool trusted_det = false;
  int n_a = 3;
  int n_b = 4;
  double f_ec = 1.22;
  bool gz_use_postprocessed = true;
  keyrate::IntensityGrid alpha_grid;
  double fw_gap_tol = 1e-6;
  int fw_max_iters = 300;
  double fw_line_search_tol = 1e-8;
  std::string output_dir = "out";
  int parallelism = 1;
  unsigned long long seed = 1;

  void validate() const;
  keyrate::ProtocolConfig protocol_at(double kappa_v, double eta_v, double eta_det_v,
                                      double p_d_v) const;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

}  // namespace ubb84::cli
