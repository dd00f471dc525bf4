#pragma once

#include <memory>
#include <string>

#include "ubb84/gz.hpp"

namespace ubb84::optimize {

enum class ConstraintKind { povm_joint, subspace_weight, alice_marginal, normalization };

/// The affine side of the per-photon-number problem, over the reduced-state
/// blocks {4T low, 28 Alice flag blocks}.
struct ConstraintSet {
  int n_b = 0;
  int n_tilde = 0;
  std::vector<sdp::Constraint> rows;
  std::vector<ConstraintKind> kinds;
  std::vector<bool> relaxable;
  std::vector<bool> psd_operator;  // row matrix is PSD; zero targets then fix a face
  std::array<bool, 4> weight_saturated{};
  double radius = 0.0;

  std::vector<int> dims() const;
  int size() const { return int(rows.size()); }
};

/// The 133 rows of the per-n~ problem: 112 joint-probability equalities,
/// 4 subspace-weight inequalities, 16 Alice-marginal equalities, 1 trace.
ConstraintSet build_constraints(int n_tilde, const simulate::ObservedStats& stats,
                                const squash::SquashedPovm& povm,
                                const std::array<squash::SubspaceBound, 4>& bounds,
                                const source::SignalSettings& s);

/// Relaxed copy: every relaxable equality becomes the pair of inequalities
/// gamma - r <= <A,X> <= gamma + r. The trace row stays exact.
ConstraintSet relax_constraints(const ConstraintSet& cs, double radius);

Eigen::VectorXd vectorize_state(const ReducedState& r);
ReducedState unvectorize_state(const Eigen::VectorXd& v, int n_b);
/// Rows act on vectorized states: row . vec(X) = <A_row, X>.
Eigen::MatrixXd constraint_matrix(const ConstraintSet& cs);
Eigen::VectorXd constraint_targets(const ConstraintSet& cs);
/// Worst violation of the set at rho (equalities two-sided, radius-aware).
double constraint_violation(const ConstraintSet& cs, const ReducedState& rho);

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Facial-reduced linear minimization oracle over a fixed constraint set.
/// Zero-probability PSD equalities (and saturated weight bounds) pin a face
/// of the cone; the interior-point subproblem runs on that face. Skipped in
/// relaxed mode, where the interior is restored by the radius.
class LinearOracle {
 public:
  explicit LinearOracle(const ConstraintSet& cs);
  ~LinearOracle();
  LinearOracle(LinearOracle&&) noexcept;

  bool inconsistent() const;
  double inconsistency() const;

  struct Sol {
    ReducedState minimizer;
    double value = 0.0;          // <C, minimizer>
    double certified_min = 0.0;  // y.b + min(0, lambda_min(residual)); always valid
    bool converged = false;
  };
  Sol minimize(const ReducedState& objective, const sdp::Options& opt) const;

  /// Interior feasible point (zero-objective solve). Throws InfeasibleError.
  ReducedState feasible_point(const sdp::Options& opt) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Smallest infeasibility s over states satisfying the radius-r relaxation;
/// the set is feasible iff this is ~0.
double min_infeasibility(const ConstraintSet& cs, double radius, const sdp::Options& opt);

/// Doubling search from 1e-10 for the smallest radius restoring feasibility.
double find_relaxation_radius(const ConstraintSet& cs, const sdp::Options& opt);

struct FwConfig {
  double gap_tol_bits = 1e-6;
  int max_iters = 300;
  double line_search_tol = 1e-8;
  sdp::Options sdp;
  bool collect_log = false;
};

struct BoundPair {
  double upper = 0.0;      // bits
  double lower = 0.0;      // certified, clamped at 0 (Klein)
  double lower_raw = 0.0;  // before the clamp
  double gap = 0.0;        // certified conditional-gradient gap at exit
  double max_violation = 0.0;
  double radius = 0.0;
  double epsilon = 0.0;
  bool relaxed = false;
  bool dual_converged = false;
  int iterations = 0;
};

struct IterRecord {
  int iter = 0;
  double objective_bits = 0.0;
  double gap_bits = 0.0;
  double step = 0.0;
};

struct SolveLog {
  int n_tilde = 0;
  std::vector<IterRecord> iters;
  double epsilon = 0.0;
  double radius = 0.0;
  bool gz_from_postprocessed = true;
  std::string status;
  BoundPair final;
  std::string to_json() const;
};

struct PaSolution {
  BoundPair bounds;
  ReducedState rho_star;
  SolveLog log;
};

/// Frank-Wolfe primal descent plus the certified dual lower bound for one
/// constraint set. `start` must be feasible when given; otherwise an
/// interior point is computed (throws InfeasibleError if there is none).
PaSolution solve_pa_term(const ConstraintSet& cs, const GZMaps& gz, const FwConfig& cfg,
                         const ReducedState* start = nullptr);

}  // namespace ubb84::optimize
