#pragma once

#include <iosfwd>

#include "ubb84/squash.hpp"

namespace ubb84::simulate {

using fock::FockBasis;
using fock::Mat;

/// Key map of the direct-reconciliation protocol: z = 0 for phases {0, pi/2},
/// z = 1 for {pi, 3pi/2}.
inline int key_bit(int x) { return x / 2; }
/// Announced basis of signal x: even (0) for phases {0, pi}, odd (1) otherwise.
inline int basis_of_signal(int x) { return x % 2; }

struct ChannelModel {
  double eta = 1.0;      // total transmissivity, source to detection
  double eta_det = 1.0;  // detector transmissivity
  bool trusted_det = false;
  double p_d = 0.0;
  bool trusted_dark = true;

  /// Transmissivity attributed to the channel proper. When the detector
  /// efficiency is trusted it stays inside Bob's POVM and the channel only
  /// carries eta / eta_det.
  double channel_transmissivity() const { return trusted_det ? eta / eta_det : eta; }
  void validate() const;
};

/// Everything the security analysis consumes in place of experimental data.
struct ObservedStats {
  int n_a = 0;
  std::vector<Eigen::MatrixXd> cond;               // cond[n](x,k) = p(x,k|n)
  std::vector<std::array<double, 4>> p_cc_cond;    // p(cc|x,n)
  std::array<double, 4> p_cc_total{};              // intensity-averaged p(cc|x)
  Eigen::MatrixXd totals;                          // totals(x,k) at |alpha|^2
  double p_pass = 0.0;
  double p_pass_vacuum = 0.0;  // p_0 * Pr(pass | n~ = 0)
  double ec_entropy_bits = 0.0;
  double alpha_sq = 0.0;
};

/// rho_AB^n~ on Alice (4) tensor the cutoff Fock space of `basis`:
/// sum_{x,y} sqrt(p_x p_y) |x><y| ox Phi(|s^x_n~><s^y_n~|).
Mat conditional_state(int n_tilde, const ChannelModel& ch, const source::SignalSettings& s,
                      const FockBasis& basis);

/// Joint conditional probabilities p(x,k|n~) = p_x Tr(P_k Phi(|s^x><s^x|)).
/// The supplied POVM must already carry the trusted transforms; its cutoff
/// must reach n_tilde.
Eigen::MatrixXd conditional_probs(int n_tilde, const povm::PovmSet& p, const ChannelModel& ch,
                                  const source::SignalSettings& s);

struct Totals {
  Eigen::MatrixXd table;  // (x,k) joint probabilities, one column per outcome
  double p_pass = 0.0;
  std::array<double, 4> p_cc{};  // per-signal cross-click probability
};

/// Closed-form outcome statistics at signal intensity |alpha|^2: independent
/// Poissonian click bins fed by the interferometer amplitudes, dark-count
/// flips applied per bin. Cross-checked against the Poisson-weighted Fock
/// conditionals (mandatory oracle, see tests).
Totals total_statistics(const source::SignalSettings& s, const ChannelModel& ch,
                        const std::vector<povm::ClickPattern>& labels);

struct EcCost {
  double h_bits = 0.0;     // H(R | B-bar) over the post-selected rounds
  double delta_ec = 0.0;   // f_EC * H
  double weighted = 0.0;   // p_pass * delta_EC, the key-rate term
};

/// Error-correction cost from a joint (x,k) table. Throws if nothing passes
/// post-selection.
EcCost ec_cost(const Eigen::MatrixXd& table, const std::vector<povm::ClickPattern>& labels,
               double f_ec);

/// Full statistics bundle for n~ = 0..n_a with the physical POVM supplied.
ObservedStats simulate_stats(const source::SignalSettings& s, const ChannelModel& ch,
                             const povm::PovmSet& physical_povm, int n_a, double f_ec);

/// CSV export of the conditional table: one row per (x, k, n~).
void export_stats_csv(const ObservedStats& st, const std::vector<povm::ClickPattern>& labels,
                      std::ostream& os);

}  // namespace ubb84::simulate
