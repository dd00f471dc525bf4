#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to check.

#include <random>
#include <vector>

#include "ubb84/fock.hpp"
#include "ubb84/keyrate.hpp"
#include "ubb84/squash.hpp"

namespace oracles {

using ubb84::fock::Complex;
using ubb84::fock::FockBasis;
using ubb84::fock::Mat;
using ubb84::fock::Vec;

// Dense matrix of the creation operator a_mode^dag (mode = 0 or 1) on the
// truncated basis. Entries above the cutoff sector are dropped.
Mat creation_matrix(const FockBasis& basis, int mode);

// (c1 a1^dag + c2 a2^dag)^n |0,0> / sqrt(n!), built by repeated application
// of explicit creation matrices on a cutoff-(n+1) space to avoid edge loss.
Vec monomial_by_matrices(Complex c1, Complex c2, int n, const FockBasis& basis);

// Superoperator of the equal two-mode pure-loss channel at transmissivity t,
// acting on column-major vectorized matrices: vec(E(rho)) = S vec(rho).
Eigen::MatrixXcd loss_superoperator(const FockBasis& basis, double t);

// Adjoint map applied through the superoperator: vec(E^dag(O)) from S.
Mat loss_adjoint_via_superop(const Mat& op, const FockBasis& basis, double t);

// Random density matrix (Hermitian, PSD, unit trace) of dimension d.
Mat random_density(int d, std::mt19937_64& rng);

// Random Hermitian matrix with entries O(1).
Mat random_hermitian(int d, std::mt19937_64& rng);

// Shannon entropy (bits) of a nonnegative vector normalized in place.
double shannon_bits(const std::vector<double>& p);

// Monolithic full-space route through the sifting/key-map objective: dense
// Kraus operators built directly from the squashed POVM (own square root),
// explicit pinching over the key register, eigendecomposition of the full
// output matrices. Entirely independent of the blockwise library path.
struct MonolithicGZ {
  Eigen::MatrixXcd k0, k1;  // (16 db) x (4 db)
  int db = 0;               // T + 28
  double dprime = 0.0;      // 16 db
};

MonolithicGZ build_monolithic_gz(const ubb84::squash::SquashedPovm& povm);

// D(G_eps(rho) || Z(G_eps(rho))) in bits on the full output space;
// rho_assembled is the 4(T+28)-dim squashed joint state.
double monolithic_objective_bits(const Eigen::MatrixXcd& rho_assembled, const MonolithicGZ& gz,
                                 double epsilon);

// tr A log A - tr A log B on matching supports, in bits.
double rel_entropy_bits(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Random feasible states of one per-photon-number instance: an interior
// point plus nullspace moves of the equality rows, backtracked into the
// cone.
class FeasibleSampler {
 public:
  FeasibleSampler(const ubb84::keyrate::Instance& inst, int n_tilde);
  ubb84::optimize::ReducedState draw(std::mt19937_64& rng, double spread = 0.2);

 private:
  ubb84::optimize::ConstraintSet cs_;
  ubb84::optimize::ReducedState center_;
  Eigen::MatrixXd kernel_;
  int n_b_;
};

}  // namespace oracles
