#pragma once

#include "ubb84/config.hpp"

namespace ubb84::cli {

struct ScanPoint {
  int index = 0;
  double kappa = 0.0;
  double eta = 0.0;
  double eta_det = 0.0;
  double p_d = 0.0;
  keyrate::KeyRateReport report;
  std::vector<optimize::SolveLog> logs;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct ScanResult {
  std::vector<ScanPoint> points;
  bool all_ok() const;
};

/// Run the full parameter scan and write scan.csv, per-kappa plot files and
/// solves.jsonl into the output directory. Points are dispatched to a
/// bounded worker pool and merged by index, so the outputs are byte-stable
/// for a fixed config.
ScanResult run_scan(const RunConfig& cfg);

}  // namespace ubb84::cli
