#pragma once

#include "ubb84/sdp.hpp"
#include "ubb84/simulate.hpp"

namespace ubb84::optimize {

using fock::Mat;

/// The optimization variable in reduced form: the exact (n <= N_B) joint
/// block plus one Hermitian 4x4 Alice matrix per flag outcome. Real
/// parameter count is (4T)^2 + 16*28 with T = (N_B+1)(N_B+2)/2.
struct ReducedState {
  int n_b = 0;
  Mat rho_low;                 // 4T x 4T, Alice-major ordering
  std::vector<Eigen::Matrix4cd> flags;  // one per outcome

  static ReducedState zero(int n_b);
  /// Embed a state supported on the low space (e.g. a simulated conditional
  /// state on the cutoff-N_B Fock basis).
  static ReducedState from_low(const Mat& rho, int n_b);

  int t_dim() const { return (n_b + 1) * (n_b + 2) / 2; }
  int low_dim() const { return 4 * t_dim(); }
  int real_parameter_count() const;
  double trace() const;
  double min_eigenvalue() const;
  void hermitianize();

  /// The assembled squashed-space matrix M(rho) of dimension 4(T+28),
  /// flag-diagonal on the flag register. For oracles and diagnostics.
  Mat assemble() const;

  sdp::BlockMat to_blocks() const;
  static ReducedState from_blocks(const sdp::BlockMat& b, int n_b);
  std::vector<int> block_dims() const;

  ReducedState& axpy(double a, const ReducedState& o);
  ReducedState& scale(double a);
  double inner(const ReducedState& o) const;  // Re tr(A B) over both parts
};

/// Sifting/announcement (G) and key-map pinching (Z) data, built from the
/// squashed POVM family used in the constraints. The low part of each
/// basis operator is sqrt(sum of kept elements); the flag part is the
/// projector onto that basis' kept flags.
struct GZMaps {
  int n_b = 0;
  std::array<Mat, 2> f_low;             // T x T PSD square roots
  std::array<std::vector<int>, 2> kept; // kept outcome indices per basis
  bool from_postprocessed = true;

  int t_dim() const { return (n_b + 1) * (n_b + 2) / 2; }
  /// Ambient dimension of the G-map output space R ox A ox B ox B~,
  /// the d' of the depolarizing perturbation.
  int ambient_dim() const { return 16 * (t_dim() + povm::kNumOutcomes); }
  /// Dense Kraus operator K_j from A ox B_squashed to R ox A ox B ox B~.
  Mat kraus_operator(int j) const;
};

GZMaps build_gz_maps(const squash::SquashedPovm& povm);

/// Smallest epsilon in {0, 1e-12, ..., 1e-6} for which every spectral block
/// of the perturbed G(rho) stays above 1e-14.
double choose_epsilon(const ReducedState& rho, const GZMaps& gz);

/// D( G_eps(rho) || Z(G_eps(rho)) ) in bits, evaluated blockwise on Im(G).
double objective_bits(const ReducedState& rho, const GZMaps& gz, double epsilon);

/// Gradient of objective_bits at fixed epsilon, in reduced coordinates.
ReducedState gradient_bits(const ReducedState& rho, const GZMaps& gz, double epsilon);

}  // namespace ubb84::optimize
