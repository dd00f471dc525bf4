#include "ubb84/optimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace ubb84::optimize {

namespace {

using sdp::Constraint;
using sdp::ConstraintMat;
using sdp::Mtx;
using sdp::Sense;

Mtx alice_op(int x, int y) {
  Mtx m = Mtx::Zero(4, 4);
  m(x, y) = 1.0;
  return m;
}

// |x><x| ox M on the Alice-major low space
Mtx low_block_op(int x, const Mat& m, int t) {
  Mtx full = Mtx::Zero(4 * t, 4 * t);
  full.block(x * t, x * t, t, t) = m;
  return full;
}

}  // namespace

std::vector<int> ConstraintSet::dims() const {
  int t = (n_b + 1) * (n_b + 2) / 2;
  std::vector<int> d{4 * t};
  d.insert(d.end(), povm::kNumOutcomes, 4);
  return d;
}

ConstraintSet build_constraints(int n_tilde, const simulate::ObservedStats& stats,
                                const squash::SquashedPovm& povm,
                                const std::array<squash::SubspaceBound, 4>& bounds,
                                const source::SignalSettings& s) {
  if (n_tilde > povm.n_b)
    throw std::invalid_argument("n~ beyond N_B: squashing would distort the equality constraints");
  if (n_tilde >= int(stats.cond.size()))
    throw std::invalid_argument("statistics missing for requested n~");
  int t = povm.low_dim();

  ConstraintSet cs;
  cs.n_b = povm.n_b;
  cs.n_tilde = n_tilde;
  auto push = [&](Constraint c, ConstraintKind kind, bool relax, bool psd) {
    cs.rows.push_back(std::move(c));
    cs.kinds.push_back(kind);
    cs.relaxable.push_back(relax);
    cs.psd_operator.push_back(psd);
  };

  // 112 joint-probability equalities Tr[(|x><x| ox P~_k) rho] = p(x,k|n~)
  for (int x = 0; x < 4; ++x) {
    for (int k = 0; k < povm::kNumOutcomes; ++k) {
      ConstraintMat a;
      a.terms.push_back({0, low_block_op(x, povm.low_blocks[k], t)});
      a.terms.push_back({1 + k, alice_op(x, x)});
      push({std::move(a), stats.cond[n_tilde](x, k), Sense::eq}, ConstraintKind::povm_joint, true,
           true);
    }
  }

  // 4 subspace-weight inequalities Tr[(|x><x| ox Pi_low) rho] >= p(x) bound_x
  for (int x = 0; x < 4; ++x) {
    cs.weight_saturated[x] = bounds[x].value >= 1.0 - 1e-12;
    ConstraintMat a;
    a.terms.push_back({0, low_block_op(x, Mat::Identity(t, t), t)});
    push({std::move(a), s.p_x[x] * bounds[x].value, Sense::ge}, ConstraintKind::subspace_weight,
         false, false);
  }

  // 16 real Alice-marginal equalities Tr_B(rho) = reduced source matrix
  Mat marg = source::alice_reduced_matrix(n_tilde, s);
  for (int x = 0; x < 4; ++x) {
    for (int y = x; y < 4; ++y) {
      if (x == y) {
        ConstraintMat a;
        a.terms.push_back({0, low_block_op(x, Mat::Identity(t, t), t)});
        for (int k = 0; k < povm::kNumOutcomes; ++k) a.terms.push_back({1 + k, alice_op(x, x)});
        push({std::move(a), marg(x, x).real(), Sense::eq}, ConstraintKind::alice_marginal, true,
             false);
      } else {
        Mtx re_a = alice_op(x, y) + alice_op(y, x);
        Mtx im_a = sdp::Cplx(0, 1) * alice_op(x, y) - sdp::Cplx(0, 1) * alice_op(y, x);
        for (int part = 0; part < 2; ++part) {
          const Mtx& onA = part == 0 ? re_a : im_a;
          ConstraintMat a;
          Mtx low = Mtx::Zero(4 * t, 4 * t);
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              if (onA(i, j) != sdp::Cplx(0, 0))
                low.block(i * t, j * t, t, t) = onA(i, j) * Mat::Identity(t, t);
          a.terms.push_back({0, std::move(low)});
          for (int k = 0; k < povm::kNumOutcomes; ++k) a.terms.push_back({1 + k, onA});
          double target = part == 0 ? 2.0 * marg(x, y).real() : 2.0 * marg(x, y).imag();
          push({std::move(a), target, Sense::eq}, ConstraintKind::alice_marginal, true, false);
        }
      }
    }
  }

  // normalization
  {
    ConstraintMat a;
    a.terms.push_back({0, Mtx::Identity(4 * t, 4 * t)});
    for (int k = 0; k < povm::kNumOutcomes; ++k) a.terms.push_back({1 + k, Mtx::Identity(4, 4)});
    push({std::move(a), 1.0, Sense::eq}, ConstraintKind::normalization, false, false);
  }
  return cs;
}

ConstraintSet relax_constraints(const ConstraintSet& cs, double radius) {
  if (radius < 0.0) throw std::domain_error("negative relaxation radius");
  if (radius == 0.0) return cs;
  ConstraintSet out;
  out.n_b = cs.n_b;
  out.n_tilde = cs.n_tilde;
  out.weight_saturated = {};  // faces are no longer exact under relaxation
  out.radius = radius;
  for (int i = 0; i < cs.size(); ++i) {
    const auto& row = cs.rows[i];
    if (row.sense == Sense::eq && cs.relaxable[i]) {
      ConstraintMat neg;
      for (const auto& [bi, m] : row.a.terms) neg.terms.push_back({bi, -m});
      out.rows.push_back({row.a, row.b - radius, Sense::ge});
      out.kinds.push_back(cs.kinds[i]);
      out.relaxable.push_back(true);
      out.psd_operator.push_back(false);
      out.rows.push_back({std::move(neg), -(row.b + radius), Sense::ge});
      out.kinds.push_back(cs.kinds[i]);
      out.relaxable.push_back(true);
      out.psd_operator.push_back(false);
    } else {
      out.rows.push_back(row);
      out.kinds.push_back(cs.kinds[i]);
      out.relaxable.push_back(cs.relaxable[i]);
      out.psd_operator.push_back(false);
    }
  }
  return out;
}

Eigen::VectorXd vectorize_state(const ReducedState& r) {
  auto blocks = r.to_blocks();
  int total = 0;
  for (const auto& b : blocks.blocks) total += int(b.rows() * b.rows());
  Eigen::VectorXd v(total);
  int pos = 0;
  const double s2 = std::numbers::sqrt2;
  for (const auto& b : blocks.blocks) {
    int d = int(b.rows());
    for (int i = 0; i < d; ++i) v(pos++) = b(i, i).real();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        v(pos++) = s2 * b(i, j).real();
        v(pos++) = s2 * b(i, j).imag();
      }
  }
  return v;
}

ReducedState unvectorize_state(const Eigen::VectorXd& v, int n_b) {
  ReducedState r = ReducedState::zero(n_b);
  auto blocks = r.to_blocks();
  int pos = 0;
  for (auto& b : blocks.blocks) {
    int d = int(b.rows());
    for (int i = 0; i < d; ++i) b(i, i) = v(pos++);
    const double s2 = std::numbers::sqrt2;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        double re = v(pos++) / s2;
        double im = v(pos++) / s2;
        b(i, j) = sdp::Cplx(re, im);
        b(j, i) = sdp::Cplx(re, -im);
      }
  }
  return ReducedState::from_blocks(blocks, n_b);
}

Eigen::MatrixXd constraint_matrix(const ConstraintSet& cs) {
  ReducedState probe = ReducedState::zero(cs.n_b);
  int total = int(vectorize_state(probe).size());
  Eigen::MatrixXd m(cs.size(), total);
  for (int i = 0; i < cs.size(); ++i) {
    ReducedState a = ReducedState::zero(cs.n_b);
    auto blocks = a.to_blocks();
    for (const auto& [bi, mat] : cs.rows[i].a.terms) blocks.blocks[bi] += mat;
    m.row(i) = vectorize_state(ReducedState::from_blocks(blocks, cs.n_b)).transpose();
  }
  return m;
}

Eigen::VectorXd constraint_targets(const ConstraintSet& cs) {
  Eigen::VectorXd b(cs.size());
  for (int i = 0; i < cs.size(); ++i) b(i) = cs.rows[i].b;
  return b;
}

double constraint_violation(const ConstraintSet& cs, const ReducedState& rho) {
  auto blocks = rho.to_blocks();
  double worst = 0.0;
  for (int i = 0; i < cs.size(); ++i) {
    double v = cs.rows[i].a.inner(blocks);
    double slack = cs.rows[i].sense == Sense::eq
                       ? std::max(0.0, std::abs(v - cs.rows[i].b) -
                                           (cs.relaxable[i] ? cs.radius : 0.0))
                       : std::max(0.0, cs.rows[i].b - v);
    worst = std::max(worst, slack);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Facial reduction + subproblem oracle

struct LinearOracle::Impl {
  int n_b = 0;
  std::vector<int> full_dims;
  // per original block: isometry onto the retained face (empty = dropped)
  std::vector<Mtx> face;
  std::vector<int> red_block_of;  // original block -> reduced block index or -1
  std::vector<int> red_dims;
  std::vector<Constraint> red_rows;
  std::vector<double> red_targets;
  bool inconsistent = false;
  double inconsistency = 0.0;
  std::unique_ptr<sdp::Problem> problem;
  // min-norm equality restoration: vectorized eq rows and their targets
  Eigen::MatrixXd eq_mat;
  Eigen::VectorXd eq_b;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> eq_cod;

  Eigen::VectorXd vectorize_red(const sdp::BlockMat& x) const {
    int total = 0;
    for (int d : red_dims) total += d * d;
    Eigen::VectorXd v(total);
    int pos = 0;
    const double s2 = std::numbers::sqrt2;
    for (size_t bi = 0; bi < red_dims.size(); ++bi) {
      const Mtx& m = x.blocks[bi];
      int d = red_dims[bi];
      for (int i = 0; i < d; ++i) v(pos++) = m(i, i).real();
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          v(pos++) = s2 * m(i, j).real();
          v(pos++) = s2 * m(i, j).imag();
        }
    }
    return v;
  }

  sdp::BlockMat unvectorize_red(const Eigen::VectorXd& v) const {
    sdp::BlockMat x = sdp::BlockMat::zero(red_dims);
    int pos = 0;
    const double s2 = std::numbers::sqrt2;
    for (size_t bi = 0; bi < red_dims.size(); ++bi) {
      Mtx& m = x.blocks[bi];
      int d = red_dims[bi];
      for (int i = 0; i < d; ++i) m(i, i) = v(pos++);
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          double re = v(pos++) / s2;
          double im = v(pos++) / s2;
          m(i, j) = sdp::Cplx(re, im);
          m(j, i) = sdp::Cplx(re, -im);
        }
    }
    return x;
  }

  // project x back onto the equality-constraint affine space (min-norm)
  sdp::BlockMat restore(const sdp::BlockMat& x) const {
    if (eq_mat.rows() == 0) return x;
    Eigen::VectorXd v = vectorize_red(x);
    Eigen::VectorXd resid = eq_b - eq_mat * v;
    Eigen::VectorXd corr = eq_cod.solve(resid);
    return unvectorize_red(v + corr);
  }

  ConstraintMat reduce_objective(const ReducedState& c) const {
    auto blocks = c.to_blocks();
    ConstraintMat out;
    for (size_t bi = 0; bi < blocks.blocks.size(); ++bi) {
      if (red_block_of[bi] < 0) continue;
      Mtx m = face[bi].adjoint() * blocks.blocks[bi] * face[bi];
      out.terms.push_back({red_block_of[bi], std::move(m)});
    }
    return out;
  }

  ReducedState embed(const sdp::BlockMat& x) const {
    ReducedState r = ReducedState::zero(n_b);
    auto blocks = r.to_blocks();
    for (size_t bi = 0; bi < blocks.blocks.size(); ++bi) {
      if (red_block_of[bi] < 0) continue;
      blocks.blocks[bi] = face[bi] * x.blocks[red_block_of[bi]] * face[bi].adjoint();
    }
    return ReducedState::from_blocks(blocks, n_b);
  }
};

LinearOracle::LinearOracle(const ConstraintSet& cs) : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.n_b = cs.n_b;
  im.full_dims = cs.dims();
  int nblocks = int(im.full_dims.size());

  // accumulate PSD operators whose expectation is pinned to zero
  std::vector<Mtx> forced(nblocks);
  for (int b = 0; b < nblocks; ++b) forced[b] = Mtx::Zero(im.full_dims[b], im.full_dims[b]);
  std::vector<char> drop_row(cs.size(), 0);
  bool any_face = false;
  if (cs.radius == 0.0) {
    for (int i = 0; i < cs.size(); ++i) {
      if (!cs.psd_operator[i] || cs.rows[i].sense != Sense::eq) continue;
      if (std::abs(cs.rows[i].b) > 1e-15) continue;
      for (const auto& [bi, m] : cs.rows[i].a.terms) forced[bi] += m;
      drop_row[i] = 1;
      any_face = true;
    }
    for (int x = 0; x < 4; ++x) {
      if (!cs.weight_saturated[x]) continue;
      for (int k = 0; k < povm::kNumOutcomes; ++k) forced[1 + k] += alice_op(x, x);
      for (int i = 0; i < cs.size(); ++i)
        if (cs.kinds[i] == ConstraintKind::subspace_weight && cs.rows[i].sense == Sense::ge) {
          // identify the row for this x through its low-block support
          const auto& terms = cs.rows[i].a.terms;
          if (!terms.empty() && terms[0].first == 0) {
            int t = im.full_dims[0] / 4;
            if (std::abs(terms[0].second(x * t, x * t)) > 0.5) drop_row[i] = 1;
          }
        }
      any_face = true;
    }
  }

  im.face.resize(nblocks);
  im.red_block_of.assign(nblocks, -1);
  for (int b = 0; b < nblocks; ++b) {
    if (!any_face || forced[b].cwiseAbs().maxCoeff() == 0.0) {
      im.face[b] = Mtx::Identity(im.full_dims[b], im.full_dims[b]);
    } else {
      Eigen::SelfAdjointEigenSolver<Mtx> es(forced[b]);
      double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
      std::vector<int> keep;
      for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= 1e-11 * lmax) keep.push_back(i);
      Mtx v(im.full_dims[b], int(keep.size()));
      for (size_t c = 0; c < keep.size(); ++c) v.col(int(c)) = es.eigenvectors().col(keep[c]);
      im.face[b] = std::move(v);
    }
    if (im.face[b].cols() > 0) {
      im.red_block_of[b] = int(im.red_dims.size());
      im.red_dims.push_back(int(im.face[b].cols()));
    }
  }

  for (int i = 0; i < cs.size(); ++i) {
    if (drop_row[i]) continue;
    ConstraintMat a;
    double norm = 0.0;
    for (const auto& [bi, m] : cs.rows[i].a.terms) {
      if (im.red_block_of[bi] < 0) continue;
      Mtx red = im.face[bi].adjoint() * m * im.face[bi];
      norm += red.squaredNorm();
      a.terms.push_back({im.red_block_of[bi], std::move(red)});
    }
    if (std::sqrt(norm) < 1e-13) {
      double resid = std::abs(cs.rows[i].b);
      if (resid > 1e-9) {
        im.inconsistent = true;
        im.inconsistency = std::max(im.inconsistency, resid);
      }
      continue;
    }
    im.red_rows.push_back({std::move(a), cs.rows[i].b, cs.rows[i].sense});
    im.red_targets.push_back(cs.rows[i].b);
  }

  im.problem = std::make_unique<sdp::Problem>(im.red_dims, im.red_rows);
  if (im.problem->inconsistent()) {
    im.inconsistent = true;
    im.inconsistency = std::max(im.inconsistency, im.problem->inconsistency());
  }

  // factor the equality rows once for min-norm restoration of subproblem
  // minimizers (interior-point endgames on degenerate faces leave
  // violations that would otherwise leak into the primal iterates)
  {
    std::vector<int> eq_rows;
    for (size_t i = 0; i < im.red_rows.size(); ++i)
      if (im.red_rows[i].sense == Sense::eq) eq_rows.push_back(int(i));
    int total = 0;
    for (int d : im.red_dims) total += d * d;
    im.eq_mat.resize(int(eq_rows.size()), total);
    im.eq_b.resize(int(eq_rows.size()));
    for (size_t r = 0; r < eq_rows.size(); ++r) {
      sdp::BlockMat a = sdp::BlockMat::zero(im.red_dims);
      im.red_rows[eq_rows[r]].a.add_scaled_to(a, 1.0);
      im.eq_mat.row(int(r)) = im.vectorize_red(a).transpose();
      im.eq_b(int(r)) = im.red_rows[eq_rows[r]].b;
    }
    im.eq_cod.setThreshold(1e-10);
    im.eq_cod.compute(im.eq_mat);
  }
}

LinearOracle::~LinearOracle() = default;
LinearOracle::LinearOracle(LinearOracle&&) noexcept = default;

bool LinearOracle::inconsistent() const { return impl_->inconsistent; }
double LinearOracle::inconsistency() const { return impl_->inconsistency; }

LinearOracle::Sol LinearOracle::minimize(const ReducedState& objective,
                                         const sdp::Options& opt) const {
  const Impl& im = *impl_;
  if (im.inconsistent)
    throw InfeasibleError("constraint targets are mutually inconsistent", im.inconsistency);
  ConstraintMat c = im.reduce_objective(objective);
  sdp::Result r = im.problem->minimize(c, opt);

  Sol s;
  // equality restoration is only safe while it does not push the minimizer
  // visibly outside the cone
  sdp::BlockMat restored = im.restore(r.x);
  s.minimizer = im.embed(restored.min_eigenvalue() > -1e-11 ? restored : r.x);
  s.converged = r.converged;
  s.value = objective.inner(s.minimizer);

  // safe dual certificate: y.b + min(0, lambda_min(C - sum y_i A_i)) over
  // the face, valid because every feasible state lives in the face and has
  // unit trace
  sdp::BlockMat resid = sdp::BlockMat::zero(im.red_dims);
  c.add_scaled_to(resid, 1.0);
  double yb = 0.0;
  for (size_t i = 0; i < im.red_rows.size(); ++i) {
    double yi = r.y[i];
    if (im.red_rows[i].sense == Sense::ge) yi = std::max(yi, 0.0);
    im.red_rows[i].a.add_scaled_to(resid, -yi);
    yb += yi * im.red_targets[i];
  }
  s.certified_min = yb + std::min(0.0, resid.min_eigenvalue());
  return s;
}

ReducedState LinearOracle::feasible_point(const sdp::Options& opt) const {
  const Impl& im = *impl_;
  if (im.inconsistent)
    throw InfeasibleError("constraint targets are mutually inconsistent", im.inconsistency);
  // minimize the worst violation s; the slack keeps a strict interior, so
  // the solve never stalls against the cone boundary
  std::vector<int> dims = im.red_dims;
  int s_block = int(dims.size());
  dims.push_back(1);
  std::vector<Constraint> rows;
  for (const auto& row : im.red_rows) {
    if (row.sense == Sense::eq) {
      Constraint up{row.a, row.b, Sense::ge};
      up.a.terms.push_back({s_block, Mtx::Identity(1, 1)});
      rows.push_back(std::move(up));
      ConstraintMat neg;
      for (const auto& [bi, m] : row.a.terms) neg.terms.push_back({bi, -m});
      neg.terms.push_back({s_block, Mtx::Identity(1, 1)});
      rows.push_back({std::move(neg), -row.b, Sense::ge});
    } else {
      Constraint c = row;
      c.a.terms.push_back({s_block, Mtx::Identity(1, 1)});
      rows.push_back(std::move(c));
    }
  }
  sdp::Problem prob(dims, rows);
  ConstraintMat obj;
  obj.terms.push_back({s_block, Mtx::Identity(1, 1)});
  sdp::Result r = prob.minimize(obj, opt);
  double s_star = std::max(r.x.blocks[s_block](0, 0).real(), 0.0);
  if (s_star > 1e-7) throw InfeasibleError("no interior feasible point found", s_star);
  sdp::BlockMat x = sdp::BlockMat::zero(im.red_dims);
  for (size_t bi = 0; bi < im.red_dims.size(); ++bi) x.blocks[bi] = r.x.blocks[bi];
  // no equality restoration here: it could trade an s*-sized violation for
  // a negative eigenvalue, and a start point only needs to be near-feasible
  return im.embed(x);
}

double min_infeasibility(const ConstraintSet& cs, double radius, const sdp::Options& opt) {
  ConstraintSet relaxed = relax_constraints(cs, radius);
  std::vector<int> dims = relaxed.dims();
  int s_block = int(dims.size());
  dims.push_back(1);
  std::vector<Constraint> rows;
  for (int i = 0; i < relaxed.size(); ++i) {
    Constraint c = relaxed.rows[i];
    if (c.sense == Sense::ge) {
      c.a.terms.push_back({s_block, Mtx::Identity(1, 1)});
    }
    rows.push_back(std::move(c));
  }
  sdp::Problem prob(dims, rows);
  if (prob.inconsistent()) return std::numeric_limits<double>::infinity();
  ConstraintMat obj;
  obj.terms.push_back({s_block, Mtx::Identity(1, 1)});
  sdp::Result r = prob.minimize(obj, opt);
  return std::max(r.x.blocks[s_block](0, 0).real(), 0.0);
}

double find_relaxation_radius(const ConstraintSet& cs, const sdp::Options& opt) {
  double r = 1e-10;
  for (int k = 0; k < 40; ++k) {
    if (min_infeasibility(cs, r, opt) <= 1e-8) return r;
    r *= 2.0;
    if (r > 1.0) break;
  }
  throw InfeasibleError("no relaxation radius below 1 restores feasibility", r);
}

namespace {

double golden_section(const std::function<double(double)>& f, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

PaSolution solve_pa_term(const ConstraintSet& cs, const GZMaps& gz, const FwConfig& cfg,
                         const ReducedState* start) {
  LinearOracle oracle(cs);

  ReducedState rho = start != nullptr ? *start : oracle.feasible_point(cfg.sdp);

  PaSolution out;
  out.log.n_tilde = cs.n_tilde;
  out.log.radius = cs.radius;
  out.log.gz_from_postprocessed = gz.from_postprocessed;

  double best_f = std::numeric_limits<double>::infinity();
  ReducedState best_rho = rho;
  double best_eps = 0.0;
  double last_gap = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    double eps = choose_epsilon(rho, gz);
    double f = objective_bits(rho, gz, eps);
    ReducedState g = gradient_bits(rho, gz, eps);
    if (f < best_f) {
      best_f = f;
      best_rho = rho;
      best_eps = eps;
    }
    LinearOracle::Sol sol = oracle.minimize(g, cfg.sdp);
    double gap = g.inner(rho) - sol.certified_min;
    last_gap = gap;
    double step = 0.0;
    if (gap >= cfg.gap_tol_bits) {
      ReducedState dir = sol.minimizer;
      dir.axpy(-1.0, rho);
      // subproblem minimizers can carry slightly negative eigenvalues; cap
      // the segment where the iterate stays essentially PSD
      double gamma_max = 1.0;
      {
        ReducedState probe = rho;
        probe.axpy(gamma_max, dir);
        int shrink = 0;
        while (shrink++ < 60 && probe.min_eigenvalue() < -1e-13) {
          gamma_max *= 0.5;
          probe = rho;
          probe.axpy(gamma_max, dir);
        }
        if (probe.min_eigenvalue() < -1e-13) gamma_max = 0.0;
      }
      if (gamma_max > 0.0) {
        auto phi = [&](double gamma) {
          ReducedState tryp = rho;
          tryp.axpy(gamma * gamma_max, dir);
          return objective_bits(tryp, gz, eps);
        };
        step = gamma_max * golden_section(phi, cfg.line_search_tol);
        ReducedState next = rho;
        next.axpy(step, dir);
        if (objective_bits(next, gz, eps) > f) step = 0.0;
        rho.axpy(step, dir);
        rho.hermitianize();
      }
    }
    if (cfg.collect_log) out.log.iters.push_back({it, f, gap, step});
    if (gap < cfg.gap_tol_bits || step == 0.0) {
      ++it;
      break;
    }
  }

  // certified lower bound at the best iterate
  ReducedState g_star = gradient_bits(best_rho, gz, best_eps);
  LinearOracle::Sol dual = oracle.minimize(g_star, cfg.sdp);
  double lower_raw = best_f - g_star.inner(best_rho) + dual.certified_min;

  BoundPair b;
  b.upper = best_f;
  b.lower_raw = lower_raw;
  // Klein's inequality keeps the PA term non-negative, so clamping at zero
  // is sound. Clamping from above at the iterate value keeps the pair
  // ordered when a degenerate subproblem leaves the iterate marginally
  // infeasible; weakening a valid lower bound is always sound.
  b.lower = std::max(std::min(lower_raw, best_f), 0.0);
  b.gap = std::max(last_gap, 0.0);
  b.max_violation = constraint_violation(cs, best_rho);
  b.radius = cs.radius;
  b.epsilon = best_eps;
  b.relaxed = cs.radius > 0.0;
  b.dual_converged = dual.converged;
  b.iterations = it;
  out.bounds = b;
  out.rho_star = best_rho;
  out.log.epsilon = best_eps;
  out.log.final = b;
  out.log.status = dual.converged ? "ok" : "dual-unconverged";
  return out;
}

std::string SolveLog::to_json() const {
  nlohmann::json j;
  j["n_tilde"] = n_tilde;
  j["epsilon"] = epsilon;
  j["radius"] = radius;
  j["gz_from_postprocessed"] = gz_from_postprocessed;
  j["status"] = status;
  j["final"] = {{"upper_bits", final.upper},
                {"lower_bits", final.lower},
                {"lower_raw_bits", final.lower_raw},
                {"gap_bits", final.gap},
                {"max_violation", final.max_violation},
                {"radius", final.radius},
                {"epsilon", final.epsilon},
                {"relaxed", final.relaxed},
                {"dual_converged", final.dual_converged},
                {"iterations", final.iterations}};
  j["iterations"] = nlohmann::json::array();
  for (const auto& r : iters)
    j["iterations"].push_back(
        {{"iter", r.iter}, {"objective_bits", r.objective_bits}, {"gap_bits", r.gap_bits},
         {"step", r.step}});
  return j.dump();
}

}  // namespace ubb84::optimize
