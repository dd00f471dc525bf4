#pragma once

#include "ubb84/optimize.hpp"

namespace ubb84::keyrate {

struct ProtocolConfig {
  double kappa = 1.0;
  double alpha_sq = 0.3;
  simulate::ChannelModel channel;
  int n_a = 3;
  int n_b = 4;
  double f_ec = 1.22;
  /// Build the G map from the post-processed POVM family (the one used in
  /// the constraints) or from the raw dark-count-free family.
  bool gz_use_postprocessed = true;
  bool auto_relax = true;
  optimize::FwConfig fw;

  void validate() const;
};

/// Everything assembled for one (kappa, channel, trust) configuration:
/// the physical measurement model driving the simulation and the analysis
/// model entering the optimization.
struct Instance {
  ProtocolConfig cfg;
  source::SignalSettings settings;
  povm::PovmSet physical;         // dark-count processed (+ efficiency if trusted)
  povm::PovmSet analysis_full;    // constraint POVM before squashing
  squash::SquashedPovm analysis;  // squashed constraint POVM
  fock::SectorOperator analysis_cc;  // cross-click element of the analysis POVM
  optimize::GZMaps gz;
  simulate::ObservedStats stats;  // at cfg.alpha_sq

  std::array<squash::SubspaceBound, 4> weight_bounds(int n_tilde) const;
  optimize::ConstraintSet constraints(int n_tilde) const;
  /// The squashed simulated conditional state (feasible in trusted modes).
  optimize::ReducedState simulated_state(int n_tilde) const;
};

Instance prepare_instance(const ProtocolConfig& cfg);

struct PaTerm {
  int n_tilde = 0;
  optimize::BoundPair bounds;
  optimize::SolveLog log;
};

/// Certified PA bounds for n~ = 1..N_A. Infeasible instances fall back to
/// the smallest relaxation radius when cfg.auto_relax is set, and throw
/// otherwise. Independent of the signal intensity, so reusable across the
/// whole alpha scan.
std::vector<PaTerm> pa_terms(const Instance& inst);

struct KeyRateReport {
  ProtocolConfig cfg;
  double alpha_sq = 0.0;
  std::vector<PaTerm> pa;          // n~ = 1..N_A
  std::vector<double> p_n;         // Poisson weights for n~ = 1..N_A
  double p_pass_vacuum = 0.0;
  double p_pass = 0.0;
  double delta_ec_bits = 0.0;      // f_EC H(R|B-bar)
  double rate_raw = 0.0;           // before clamping
  double rate = 0.0;               // max(raw, 0)
  double r21 = std::numeric_limits<double>::quiet_NaN();
  double r21_upper = std::numeric_limits<double>::quiet_NaN();

  /// The defining identity, recomputable from the stored fields.
  double reconstruct() const;
};

/// Key-rate lower bound at one intensity from cached PA terms.
KeyRateReport key_rate(double alpha_sq, const std::vector<PaTerm>& pa, const Instance& inst);

struct IntensityGrid {
  double lo = 0.01;
  double hi = 2.0;
  int points = 60;
  bool log_spaced = true;
  std::vector<double> values() const;
};

/// Scan |alpha|^2 over the grid, golden-refine around the best point.
KeyRateReport optimize_intensity(const std::vector<PaTerm>& pa, const Instance& inst,
                                 const IntensityGrid& grid);

/// Ratio of the certified 2-photon to 1-photon PA minima (lower/lower).
/// Throws when the 1-photon lower bound is zero.
double r21_ratio(const std::vector<PaTerm>& pa, double* upper_ratio = nullptr);

std::string report_csv_header(int n_a);
std::string report_csv_row(const KeyRateReport& r);
std::string report_text(const KeyRateReport& r);

}  // namespace ubb84::keyrate
