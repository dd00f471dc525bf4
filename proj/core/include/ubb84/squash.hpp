#pragma once

#include "ubb84/povm.hpp"

namespace ubb84::squash {

using fock::Mat;
using fock::SectorOperator;

/// Flag-state squashed POVM: each element keeps its exact restriction to the
/// (n <= N_B)-photon space and gains a classical flag |k><k| on a 28-dim flag
/// register. Bob's squashed dimension is low_dim() + 28.
struct SquashedPovm {
  int n_b = 0;
  std::vector<povm::ClickPattern> labels;
  std::vector<Mat> low_blocks;  // dense on the cutoff-N_B Fock basis
  double xi = 0.5;
  std::array<double, 2> p_basis{0.5, 0.5};
  double p_d = 0.0;
  double eta_det = 1.0;

  int low_dim() const { return (n_b + 1) * (n_b + 2) / 2; }
  int total_dim() const { return low_dim() + povm::kNumOutcomes; }
  int index_of(int basis, unsigned mask) const;
  std::vector<int> kept_indices(int basis) const;
  std::vector<int> cross_click_indices() const;
  /// max |sum_k low_k - identity| (the flag parts are complete by construction).
  double completeness_defect() const;
};

SquashedPovm squash_povm(const povm::PovmSet& p, int n_b);

/// Vacuum cross-click probability p(cc|0), Eq.-level closed form.
double p_cc_vacuum(double p_d);

/// Minimum cross-click probability over n-photon inputs (n >= 1),
/// 1 - (1-p_d)^2 xi^n - (1-p_d)^4 (1-xi)^n.
double p_min_cc(int n, double xi, double p_d);

enum class BoundMode { trusted_analytic, dark_count_free, numeric };

struct SubspaceBound {
  double value = 1.0;  // lower bound on the (n <= N_B)-subspace weight
  double p_cc = 0.0;
  double p_d = 0.0;
  double xi = 0.5;
  int n_b = 0;
  BoundMode mode = BoundMode::trusted_analytic;
};

/// Lower bound on the weight of the (n <= N_B)-photon subspace from an
/// observed cross-click probability. `numeric` mode takes the actual
/// (Fock-diagonal) cross-click element and uses its vacuum entry and
/// per-sector minima; it requires cc_element->n_cut >= N_B+1 and verifies
/// the monotonicity the analytic derivation relies on.
SubspaceBound weight_lower_bound(double p_cc_x, int n_b, double xi, double p_d, BoundMode mode,
                                 const SectorOperator* cc_element = nullptr);

}  // namespace ubb84::squash
