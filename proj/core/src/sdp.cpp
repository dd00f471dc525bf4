#include "ubb84/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <cstdio>

namespace ubb84::sdp {

namespace {

// Real coordinates of the functional X -> Re tr(A X) over Hermitian X,
// used only for rank detection and consistency checks.
Eigen::VectorXd vectorize(const ConstraintMat& a, const std::vector<int>& dims,
                          const std::vector<int>& offsets, int total) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(total);
  for (const auto& [bi, m] : a.terms) {
    int off = offsets[bi];
    int d = dims[bi];
    int pos = off;
    for (int i = 0; i < d; ++i) v(pos++) = m(i, i).real();
    const double s2 = std::numbers::sqrt2;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        v(pos++) = s2 * m(i, j).real();
        v(pos++) = s2 * m(i, j).imag();
      }
  }
  return v;
}

double max_step_to_boundary(const Mtx& x, const Mtx& dx) {
  // largest alpha with x + alpha dx >= 0
  Eigen::LLT<Mtx> llt(x);
  Mtx l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    Mtx xj = x + 1e-13 * std::max(1.0, x.trace().real()) * Mtx::Identity(x.rows(), x.cols());
    Eigen::LLT<Mtx> llt2(xj);
    if (llt2.info() != Eigen::Success) return 0.0;
    l = llt2.matrixL();
  }
  Mtx t1 = l.triangularView<Eigen::Lower>().solve(dx);
  Mtx w = l.triangularView<Eigen::Lower>().solve(t1.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Mtx> es(0.5 * (w + w.adjoint()), Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace

BlockMat BlockMat::zero(const std::vector<int>& dims) {
  BlockMat b;
  b.blocks.reserve(dims.size());
  for (int d : dims) b.blocks.push_back(Mtx::Zero(d, d));
  return b;
}

BlockMat BlockMat::identity(const std::vector<int>& dims, double scale) {
  BlockMat b;
  b.blocks.reserve(dims.size());
  for (int d : dims) b.blocks.push_back(scale * Mtx::Identity(d, d));
  return b;
}

int BlockMat::total_dim() const {
  int n = 0;
  for (const auto& m : blocks) n += int(m.rows());
  return n;
}

double BlockMat::inner(const BlockMat& o) const {
  double s = 0.0;
  for (size_t i = 0; i < blocks.size(); ++i)
    s += blocks[i].cwiseProduct(o.blocks[i].conjugate()).sum().real();
  return s;
}

double BlockMat::trace() const {
  double s = 0.0;
  for (const auto& m : blocks) s += m.trace().real();
  return s;
}

double BlockMat::min_eigenvalue() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& m : blocks) {
    Eigen::SelfAdjointEigenSolver<Mtx> es(m, Eigen::EigenvaluesOnly);
    v = std::min(v, es.eigenvalues().minCoeff());
  }
  return v;
}

double BlockMat::max_abs() const {
  double v = 0.0;
  for (const auto& m : blocks)
    if (m.size() > 0) v = std::max(v, m.cwiseAbs().maxCoeff());
  return v;
}

BlockMat& BlockMat::axpy(double a, const BlockMat& o) {
  for (size_t i = 0; i < blocks.size(); ++i) blocks[i] += a * o.blocks[i];
  return *this;
}

void BlockMat::hermitianize() {
  for (auto& m : blocks) m = 0.5 * (m + m.adjoint()).eval();
}

double ConstraintMat::inner(const BlockMat& x) const {
  double s = 0.0;
  for (const auto& [bi, m] : terms) s += m.cwiseProduct(x.blocks[bi].conjugate()).sum().real();
  return s;
}

void ConstraintMat::add_scaled_to(BlockMat& dst, double w) const {
  for (const auto& [bi, m] : terms) dst.blocks[bi] += w * m;
}

double ConstraintMat::frobenius() const {
  double s = 0.0;
  for (const auto& [bi, m] : terms) s += m.squaredNorm();
  return std::sqrt(s);
}

ConstraintMat ConstraintMat::scaled(double s) const {
  ConstraintMat out;
  out.terms.reserve(terms.size());
  for (const auto& [bi, m] : terms) out.terms.push_back({bi, s * m});
  return out;
}

Problem::Problem(std::vector<int> dims, std::vector<Constraint> constraints)
    : orig_dims_(dims), dims_(std::move(dims)), original_(std::move(constraints)) {
  slack_of_.assign(original_.size(), -1);
  // slack blocks for inequalities: <A,X> - s = b with s >= 0
  for (size_t i = 0; i < original_.size(); ++i) {
    if (original_[i].sense == Sense::ge) {
      slack_of_[i] = int(dims_.size());
      dims_.push_back(1);
    }
  }

  std::vector<int> offsets(dims_.size());
  int total = 0;
  for (size_t b = 0; b < dims_.size(); ++b) {
    offsets[b] = total;
    total += dims_[b] * dims_[b];  // upper bound on real coordinate count
  }

  // rank-revealing pass over the equality rows only; slack rows are always
  // independent through their private coordinate
  std::vector<Eigen::VectorXd> vecs(original_.size());
  for (size_t i = 0; i < original_.size(); ++i) {
    ConstraintMat ext = original_[i].a;
    if (slack_of_[i] >= 0) ext.terms.push_back({slack_of_[i], -Mtx::Identity(1, 1)});
    vecs[i] = vectorize(ext, dims_, offsets, total);
  }

  std::vector<int> eq_rows;
  for (size_t i = 0; i < original_.size(); ++i)
    if (original_[i].sense == Sense::eq) eq_rows.push_back(int(i));

  std::vector<char> keep(original_.size(), 1);
  if (!eq_rows.empty()) {
    Eigen::MatrixXd a(total, eq_rows.size());
    for (size_t c = 0; c < eq_rows.size(); ++c) a.col(c) = vecs[eq_rows[c]];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-11);
    int rank = int(qr.rank());
    std::vector<char> in_basis(eq_rows.size(), 0);
    for (int r = 0; r < rank; ++r) in_basis[qr.colsPermutation().indices()(r)] = 1;
    // consistency of the dropped rows with the kept ones
    std::vector<int> basis_cols;
    for (size_t c = 0; c < eq_rows.size(); ++c)
      if (in_basis[c]) basis_cols.push_back(int(c));
    Eigen::MatrixXd ab(total, basis_cols.size());
    Eigen::VectorXd bb(basis_cols.size());
    for (size_t c = 0; c < basis_cols.size(); ++c) {
      ab.col(c) = a.col(basis_cols[c]);
      bb(c) = original_[eq_rows[basis_cols[c]]].b;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_b(ab);
    for (size_t c = 0; c < eq_rows.size(); ++c) {
      if (in_basis[c]) continue;
      keep[eq_rows[c]] = 0;
      Eigen::VectorXd coef = qr_b.solve(a.col(c));
      double combo = coef.dot(bb);
      double resid = std::abs(combo - original_[eq_rows[c]].b);
      double row_scale = 1.0 + std::abs(original_[eq_rows[c]].b);
      if (resid > 1e-9 * row_scale) {
        inconsistent_ = true;
        inconsistency_ = std::max(inconsistency_, resid);
      }
    }
  }

  for (size_t i = 0; i < original_.size(); ++i) {
    if (!keep[i]) continue;
    ConstraintMat ext = original_[i].a;
    if (slack_of_[i] >= 0) ext.terms.push_back({slack_of_[i], -Mtx::Identity(1, 1)});
    double s = std::max(ext.frobenius(), 1e-12);
    kept_.push_back(int(i));
    a_ext_.push_back(ext.scaled(1.0 / s));
    b_ext_.push_back(original_[i].b / s);
    scale_.push_back(s);
  }
}

Result Problem::minimize(const ConstraintMat& objective, const Options& opt) const {
  const int m = int(a_ext_.size());
  const int n_tot = [&] {
    int n = 0;
    for (int d : dims_) n += d;
    return n;
  }();

  BlockMat c = BlockMat::zero(dims_);
  objective.add_scaled_to(c, 1.0);

  if (m == 0) throw std::logic_error("sdp problem without constraints");
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = b_ext_[i];

  double beta_p = 1.0 + b.cwiseAbs().maxCoeff();
  double beta_d = 1.0 + c.max_abs();
  BlockMat x = BlockMat::identity(dims_, beta_p);
  BlockMat z = BlockMat::identity(dims_, beta_d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  Result best;
  best.x = BlockMat::zero(dims_);
  double best_score = std::numeric_limits<double>::infinity();

  auto record = [&](int it, double pinf, double dinf, double gap, double mu) {
    double score = std::max({pinf, dinf, gap});
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.y.assign(original_.size(), 0.0);
      for (int i = 0; i < m; ++i) best.y[kept_[i]] = y(i) / scale_[i];
      best.primal_infeas = pinf;
      best.dual_infeas = dinf;
      best.mu = mu;
      best.iterations = it;
    }
  };

  int it = 0;
  for (; it < opt.max_iters; ++it) {
    // residuals
    Eigen::VectorXd rp(m);
    for (int i = 0; i < m; ++i) rp(i) = b(i) - a_ext_[i].inner(x);
    BlockMat rd = c;
    rd.axpy(-1.0, z);
    for (int i = 0; i < m; ++i) a_ext_[i].add_scaled_to(rd, -y(i));

    double mu = x.inner(z) / n_tot;
    double pobj = c.inner(x);
    double dobj = b.dot(y);
    double pinf = rp.cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
    double dinf = rd.max_abs() / (1.0 + c.max_abs());
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    record(it, pinf, dinf, gap, mu);
    if (opt.verbose)
      std::printf("it %d pinf %.2e dinf %.2e gap %.2e mu %.2e\n", it, pinf, dinf, gap, mu);
    // the objective-gap metric floors near machine precision once the
    // primal residual dominates; the complementarity gap is the reliable one
    double comp_gap = x.inner(z) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (pinf < opt.tol && dinf < opt.tol && (gap < opt.tol || comp_gap < opt.tol)) {
      best.converged = true;
      break;
    }
    if (it - best.iterations > 15) break;  // stagnated

    // per-block inverses of Z
    std::vector<Mtx> zinv(dims_.size());
    for (size_t bi = 0; bi < dims_.size(); ++bi) {
      Eigen::LLT<Mtx> llt(z.blocks[bi]);
      if (llt.info() != Eigen::Success) {
        zinv[bi] = z.blocks[bi]
                       .selfadjointView<Eigen::Lower>()
                       .ldlt()
                       .solve(Mtx::Identity(dims_[bi], dims_[bi]));
      } else {
        zinv[bi] = llt.solve(Mtx::Identity(dims_[bi], dims_[bi]));
      }
    }

    // E_j = X A_j Z^{-1} on the support of A_j
    std::vector<std::vector<std::pair<int, Mtx>>> e(m);
    for (int j = 0; j < m; ++j) {
      e[j].reserve(a_ext_[j].terms.size());
      for (const auto& [bi, mat] : a_ext_[j].terms)
        e[j].push_back({bi, x.blocks[bi] * mat * zinv[bi]});
    }

    Eigen::MatrixXd schur(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (const auto& [bi, mi] : a_ext_[i].terms)
          for (const auto& [bj, ej] : e[j])
            if (bi == bj) s += mi.cwiseProduct(ej.transpose()).sum().real();
        schur(i, j) = s;
      }
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    double ridge = 1e-14 * schur.diagonal().maxCoeff();
    Eigen::LDLT<Eigen::MatrixXd> schur_f(schur + ridge * Eigen::MatrixXd::Identity(m, m));
    auto schur_solve = [&](const Eigen::VectorXd& rhs) {
      Eigen::VectorXd sol = schur_f.solve(rhs);
      sol += schur_f.solve(rhs - schur * sol);  // one refinement pass
      return sol;
    };

    auto apply_x_w_zinv = [&](const BlockMat& w) {
      BlockMat out = BlockMat::zero(dims_);
      for (size_t bi = 0; bi < dims_.size(); ++bi)
        out.blocks[bi] = x.blocks[bi] * w.blocks[bi] * zinv[bi];
      return out;
    };

    Eigen::VectorXd a_zinv(m), a_x(m), g(m);
    {
      BlockMat x_rd_zinv = apply_x_w_zinv(rd);
      for (int i = 0; i < m; ++i) {
        double az = 0.0;
        for (const auto& [bi, mat] : a_ext_[i].terms)
          az += mat.cwiseProduct(zinv[bi].conjugate()).sum().real();
        a_zinv(i) = az;
        a_x(i) = a_ext_[i].inner(x);
        g(i) = a_ext_[i].inner(x_rd_zinv);
      }
    }

    auto direction = [&](double sigma_mu, const BlockMat* corr, Eigen::VectorXd& dy,
                         BlockMat& dx, BlockMat& dz) {
      Eigen::VectorXd rhs = rp + a_x - sigma_mu * a_zinv + g;
      if (corr) {
        BlockMat xc = BlockMat::zero(dims_);
        for (size_t bi = 0; bi < dims_.size(); ++bi)
          xc.blocks[bi] = corr->blocks[bi] * zinv[bi];
        for (int i = 0; i < m; ++i) rhs(i) += a_ext_[i].inner(xc);
      }
      dy = schur_solve(rhs);
      dz = rd;
      for (int i = 0; i < m; ++i) a_ext_[i].add_scaled_to(dz, -dy(i));
      dx = BlockMat::zero(dims_);
      for (size_t bi = 0; bi < dims_.size(); ++bi) {
        Mtx t = x.blocks[bi] * dz.blocks[bi] * zinv[bi];
        if (corr) t += corr->blocks[bi] * zinv[bi];
        dx.blocks[bi] = sigma_mu * zinv[bi] - x.blocks[bi] - t;
      }
      dx.hermitianize();
      dz.hermitianize();
    };

    // predictor
    Eigen::VectorXd dy_a;
    BlockMat dx_a = BlockMat::zero(dims_), dz_a = BlockMat::zero(dims_);
    direction(0.0, nullptr, dy_a, dx_a, dz_a);
    double ap = 1.0, ad = 1.0;
    for (size_t bi = 0; bi < dims_.size(); ++bi) {
      ap = std::min(ap, opt.step_frac * max_step_to_boundary(x.blocks[bi], dx_a.blocks[bi]));
      ad = std::min(ad, opt.step_frac * max_step_to_boundary(z.blocks[bi], dz_a.blocks[bi]));
    }
    BlockMat x_aff = x;
    x_aff.axpy(ap, dx_a);
    BlockMat z_aff = z;
    z_aff.axpy(ad, dz_a);
    double mu_aff = x_aff.inner(z_aff) / n_tot;
    double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // corrector
    BlockMat corr = BlockMat::zero(dims_);
    for (size_t bi = 0; bi < dims_.size(); ++bi)
      corr.blocks[bi] = dx_a.blocks[bi] * dz_a.blocks[bi];
    Eigen::VectorXd dy;
    BlockMat dx = BlockMat::zero(dims_), dz = BlockMat::zero(dims_);
    direction(sigma * mu, &corr, dy, dx, dz);

    // push harder once complementarity is essentially resolved
    double frac = mu < 1e-8 * (1.0 + std::abs(pobj)) ? 0.999 : opt.step_frac;
    ap = 1.0;
    ad = 1.0;
    for (size_t bi = 0; bi < dims_.size(); ++bi) {
      ap = std::min(ap, frac * max_step_to_boundary(x.blocks[bi], dx.blocks[bi]));
      ad = std::min(ad, frac * max_step_to_boundary(z.blocks[bi], dz.blocks[bi]));
    }
    if (!(ap > 1e-14) || !(ad > 1e-14)) break;
    x.axpy(ap, dx);
    z.axpy(ad, dz);
    y += ad * dy;
    x.hermitianize();
    z.hermitianize();
  }

  // strip slacks, clamp inequality multipliers
  Result out = best;
  out.converged = best.converged;
  BlockMat xo = BlockMat::zero(orig_dims_);
  for (size_t bi = 0; bi < orig_dims_.size(); ++bi) xo.blocks[bi] = out.x.blocks[bi];
  out.x = std::move(xo);
  for (size_t i = 0; i < original_.size(); ++i)
    if (original_[i].sense == Sense::ge) out.y[i] = std::max(out.y[i], 0.0);
  out.primal_obj = objective.inner(out.x);
  double dobj = 0.0;
  for (size_t i = 0; i < original_.size(); ++i) dobj += out.y[i] * original_[i].b;
  out.dual_obj = dobj;
  return out;
}

}  // namespace ubb84::sdp
