#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "ubb84/fock.hpp"
#include "ubb84/source.hpp"

namespace ubb84::povm {

using fock::Complex;
using fock::Mat;
using fock::SectorOperator;

/// One of Bob's coarse-grained detection outcomes. The four effective bins
/// are bit-packed as t1 = 1, D2 = 2, D5 = 4, t3 = 8. Outcomes whose pattern
/// touches no middle bin do not depend on the basis choice and are merged
/// across the two bases (basis = -1).
struct ClickPattern {
  int basis;      // -1 merged, 0 for phi_B = 0, 1 for phi_B = pi/2
  unsigned mask;  // subset of the four effective bins

  bool has_middle() const { return (mask & 0b0110u) != 0; }
  bool has_outside() const { return (mask & 0b1001u) != 0; }
  bool is_cross_click() const { return has_middle() && has_outside(); }
  bool operator==(const ClickPattern&) const = default;
};

constexpr int kNumOutcomes = 28;

/// Bob's labeled POVM, elements stored per total-photon sector.
struct PovmSet {
  std::vector<ClickPattern> labels;
  std::vector<SectorOperator> elements;
  double xi = 0.5;
  std::array<double, 2> p_basis{0.5, 0.5};
  double p_d = 0.0;      // dark-count probability folded into the elements
  double eta_det = 1.0;  // detector transmissivity folded into the elements
  int n_cut = 0;

  int index_of(int basis, unsigned mask) const;
  SectorOperator sum() const;
  /// max over sectors of |sum of elements - identity| entrywise.
  double completeness_defect() const;
  double min_eigenvalue() const;
  /// Outcome indices kept after post-selection (middle click) in one basis.
  std::vector<int> kept_indices(int basis) const;
  std::vector<int> cross_click_indices() const;
};

/// Classical dark-count post-processing acting on the 28 outcomes. Column
/// i holds the distribution of observed outcomes given ideal outcome i.
struct PostProcessMap {
  double p_d = 0.0;
  std::array<double, 4> flip{};  // per effective bin {t1, D2, D5, t3}
  Eigen::MatrixXd matrix;        // 28 x 28, columns sum to 1

  static PostProcessMap build(double p_d, const std::array<double, 2>& p_basis);
};

/// The 16 per-basis click-pattern elements for a fixed phi_B, labels
/// carrying that basis. Intermediate representation, exposed for tests and
/// for the Appendix-style formula checks.
std::vector<std::pair<ClickPattern, SectorOperator>> build_per_basis_povm(
    const source::SignalSettings& s, int basis, int n_cut);

/// Ideal (dark-count free) coarse-grained 28-outcome POVM.
PovmSet build_ideal_povm(const source::SignalSettings& s, int n_cut);

/// Apply the dark-count map: P_k = sum_i map_{k,i} F_i.
PovmSet dark_count_postprocess(const PovmSet& povm, double p_d);

/// Pull an equal trusted detector efficiency through the interferometer:
/// every element is replaced by the two-mode loss adjoint at eta_det.
PovmSet trusted_efficiency_transform(const PovmSet& povm, double eta_det);

struct CoarseElements {
  SectorOperator outside_only;
  SectorOperator inside_only;
  SectorOperator cross_click;
  SectorOperator no_click;
};

CoarseElements coarse_elements(const PovmSet& povm);

/// Plain-text dump of all element blocks (row-major "re im" pairs), for
/// cross-implementation diffing.
void dump_blocks(const PovmSet& povm, std::ostream& os);

}  // namespace ubb84::povm
