#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ubb84::sdp {

using Cplx = std::complex<double>;
using Mtx = Eigen::MatrixXcd;

/// Hermitian matrix on a product of PSD blocks.
struct BlockMat {
  std::vector<Mtx> blocks;

  static BlockMat zero(const std::vector<int>& dims);
  static BlockMat identity(const std::vector<int>& dims, double scale = 1.0);

  int total_dim() const;
  double inner(const BlockMat& o) const;  // Re sum_b tr(A_b B_b)
  double trace() const;
  double min_eigenvalue() const;
  double max_abs() const;
  BlockMat& axpy(double a, const BlockMat& o);
  void hermitianize();
};

/// Linear functional X -> Re tr(A X) with only a few nonzero blocks.
struct ConstraintMat {
  std::vector<std::pair<int, Mtx>> terms;  // (block index, Hermitian block)

  double inner(const BlockMat& x) const;
  void add_scaled_to(BlockMat& dst, double w) const;
  double frobenius() const;
  ConstraintMat scaled(double s) const;
};

enum class Sense { eq, ge };

struct Constraint {
  ConstraintMat a;
  double b = 0.0;
  Sense sense = Sense::eq;
};

struct Options {
  int max_iters = 100;
  double tol = 1e-9;
  double step_frac = 0.98;
  bool verbose = false;
};

struct Result {
  bool converged = false;
  BlockMat x;             // primal solution on the original blocks
  std::vector<double> y;  // one multiplier per input constraint; >= 0 for ge rows
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double mu = 0.0;
  int iterations = 0;
};

/// A linear SDP over a fixed constraint set:
///   minimize <C, X>  s.t.  <A_i, X> = b_i (eq) / >= b_i (ge),  X >= 0.
/// Inequalities get slack blocks; linearly dependent equalities are pruned
/// once at construction (with a consistency check on their targets). The
/// same problem object solves many objectives, which is how the conditional
/// gradient loop uses it.
class Problem {
 public:
  Problem(std::vector<int> dims, std::vector<Constraint> constraints);

  /// True if a pruned (dependent) equality had an inconsistent target; the
  /// affine system then has no solution at all.
  bool inconsistent() const { return inconsistent_; }
  double inconsistency() const { return inconsistency_; }

  Result minimize(const ConstraintMat& objective, const Options& opt = {}) const;

  int num_original_blocks() const { return int(orig_dims_.size()); }

 private:
  std::vector<int> orig_dims_;
  std::vector<int> dims_;  // with slack blocks appended
  std::vector<Constraint> original_;
  std::vector<int> kept_;              // indices of retained constraints
  std::vector<ConstraintMat> a_ext_;   // retained, slack-extended, scaled
  std::vector<double> b_ext_;
  std::vector<double> scale_;          // per retained constraint
  std::vector<int> slack_of_;          // original index -> slack block or -1
  bool inconsistent_ = false;
  double inconsistency_ = 0.0;
};

}  // namespace ubb84::sdp
