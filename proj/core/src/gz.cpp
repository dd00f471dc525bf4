#include "ubb84/gz.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ubb84::optimize {

namespace {

constexpr double kEigFloor = 1e-14;

// x log x with the 0 log 0 = 0 convention; negative dirt below tol throws.
double xlogx(double x) {
  if (x <= 0.0) {
    if (x < -1e-12) throw std::runtime_error("negative eigenvalue beyond tolerance in objective");
    return 0.0;
  }
  return x * std::log(x);
}

struct BasisBlocks {
  Mat tau;                                  // 2T x 2T
  std::vector<Eigen::Matrix2cd> flag_tau;   // one per kept outcome
};

// Unperturbed spectral blocks of G(rho) for one basis.
BasisBlocks basis_blocks(const ReducedState& rho, const GZMaps& gz, int j) {
  int t = gz.t_dim();
  const Mat& l = gz.f_low[j];
  int a0 = j, a1 = j + 2;
  BasisBlocks b;
  b.tau = Mat::Zero(2 * t, 2 * t);
  auto blk = [&](int a, int bcol) { return rho.rho_low.block(a * t, bcol * t, t, t); };
  b.tau.block(0, 0, t, t) = l * blk(a0, a0) * l;
  b.tau.block(0, t, t, t) = l * blk(a0, a1) * l;
  b.tau.block(t, 0, t, t) = l * blk(a1, a0) * l;
  b.tau.block(t, t, t, t) = l * blk(a1, a1) * l;
  b.flag_tau.reserve(gz.kept[j].size());
  for (int k : gz.kept[j]) {
    Eigen::Matrix2cd m;
    m << rho.flags[k](a0, a0), rho.flags[k](a0, a1), rho.flags[k](a1, a0), rho.flags[k](a1, a1);
    b.flag_tau.push_back(m);
  }
  return b;
}

Mat pinch_half(const Mat& m) {
  int h = int(m.rows()) / 2;
  Mat p = Mat::Zero(m.rows(), m.cols());
  p.block(0, 0, h, h) = m.block(0, 0, h, h);
  p.block(h, h, h, h) = m.block(h, h, h, h);
  return p;
}

// log of a Hermitian PSD matrix on its support.
Mat support_log(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXd lg(lam.size());
  for (int i = 0; i < lam.size(); ++i) lg(i) = lam(i) > 1e-300 ? std::log(lam(i)) : 0.0;
  return es.eigenvectors() * lg.asDiagonal() * es.eigenvectors().adjoint();
}

double entropy_sum(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) s += xlogx(es.eigenvalues()(i));
  return s;
}

// D(tau || pinch(tau)) in nats, via the pinching entropy difference.
double pinched_rel_entropy(const Mat& tau) {
  int h = int(tau.rows()) / 2;
  double d = entropy_sum(tau);
  d -= entropy_sum(tau.block(0, 0, h, h));
  d -= entropy_sum(tau.block(h, h, h, h));
  return d;
}

// Xi = log tau - log pinch(tau) on the support, in nats.
Mat pinched_log_difference(const Mat& tau) {
  int h = int(tau.rows()) / 2;
  Mat xi = support_log(tau);
  xi.block(0, 0, h, h) -= support_log(tau.block(0, 0, h, h));
  xi.block(h, h, h, h) -= support_log(tau.block(h, h, h, h));
  return xi;
}

Mat perturb(const Mat& tau, double eps, double dprime) {
  if (eps == 0.0) return tau;
  return (1.0 - eps) * tau + eps / dprime * Mat::Identity(tau.rows(), tau.cols());
}

}  // namespace

ReducedState ReducedState::zero(int n_b) {
  ReducedState r;
  r.n_b = n_b;
  r.rho_low = Mat::Zero(r.low_dim(), r.low_dim());
  r.flags.assign(povm::kNumOutcomes, Eigen::Matrix4cd::Zero());
  return r;
}

ReducedState ReducedState::from_low(const Mat& rho, int n_b) {
  ReducedState r = zero(n_b);
  if (rho.rows() != r.low_dim()) throw std::invalid_argument("low-state dimension mismatch");
  r.rho_low = rho;
  return r;
}

int ReducedState::real_parameter_count() const {
  return low_dim() * low_dim() + 16 * povm::kNumOutcomes;
}

double ReducedState::trace() const {
  double s = rho_low.trace().real();
  for (const auto& f : flags) s += f.trace().real();
  return s;
}

double ReducedState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho_low, Eigen::EigenvaluesOnly);
  double m = es.eigenvalues().minCoeff();
  for (const auto& f : flags) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> ef(f, Eigen::EigenvaluesOnly);
    m = std::min(m, ef.eigenvalues().minCoeff());
  }
  return m;
}

void ReducedState::hermitianize() {
  rho_low = 0.5 * (rho_low + rho_low.adjoint()).eval();
  for (auto& f : flags) f = 0.5 * (f + f.adjoint()).eval();
}

Mat ReducedState::assemble() const {
  int t = t_dim();
  int db = t + povm::kNumOutcomes;
  Mat m = Mat::Zero(4 * db, 4 * db);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      m.block(a * db, b * db, t, t) = rho_low.block(a * t, b * t, t, t);
      for (int k = 0; k < povm::kNumOutcomes; ++k)
        m(a * db + t + k, b * db + t + k) = flags[k](a, b);
    }
  return m;
}

sdp::BlockMat ReducedState::to_blocks() const {
  sdp::BlockMat b;
  b.blocks.reserve(1 + povm::kNumOutcomes);
  b.blocks.push_back(rho_low);
  for (const auto& f : flags) b.blocks.push_back(f);
  return b;
}

ReducedState ReducedState::from_blocks(const sdp::BlockMat& b, int n_b) {
  ReducedState r = zero(n_b);
  r.rho_low = b.blocks[0];
  for (int k = 0; k < povm::kNumOutcomes; ++k) r.flags[k] = b.blocks[k + 1];
  return r;
}

std::vector<int> ReducedState::block_dims() const {
  std::vector<int> d{low_dim()};
  d.insert(d.end(), povm::kNumOutcomes, 4);
  return d;
}

ReducedState& ReducedState::axpy(double a, const ReducedState& o) {
  rho_low += a * o.rho_low;
  for (int k = 0; k < povm::kNumOutcomes; ++k) flags[k] += a * o.flags[k];
  return *this;
}

ReducedState& ReducedState::scale(double a) {
  rho_low *= a;
  for (auto& f : flags) f *= a;
  return *this;
}

double ReducedState::inner(const ReducedState& o) const {
  double s = rho_low.cwiseProduct(o.rho_low.conjugate()).sum().real();
  for (int k = 0; k < povm::kNumOutcomes; ++k)
    s += flags[k].cwiseProduct(o.flags[k].conjugate()).sum().real();
  return s;
}

GZMaps build_gz_maps(const squash::SquashedPovm& povm) {
  GZMaps gz;
  gz.n_b = povm.n_b;
  gz.from_postprocessed = povm.p_d > 0.0;
  int t = gz.t_dim();
  for (int j = 0; j < 2; ++j) {
    gz.kept[j] = povm.kept_indices(j);
    Mat sum = Mat::Zero(t, t);
    for (int k : gz.kept[j]) sum += povm.low_blocks[k];
    Eigen::SelfAdjointEigenSolver<Mat> es(sum);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    gz.f_low[j] = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  }
  return gz;
}

Mat GZMaps::kraus_operator(int j) const {
  int t = t_dim();
  int db = t + povm::kNumOutcomes;
  Mat f = Mat::Zero(db, db);
  f.block(0, 0, t, t) = f_low[j];
  for (int k : kept[j]) f(t + k, t + k) = 1.0;
  Mat out = Mat::Zero(16 * db, 4 * db);
  // output index ((r*4 + a)*db + b)*2 + btilde
  for (int r = 0; r < 2; ++r) {
    int a = j + 2 * r;
    for (int row = 0; row < db; ++row)
      for (int col = 0; col < db; ++col) {
        if (f(row, col) == sdp::Cplx(0, 0)) continue;
        out((((r * 4 + a) * db + row) * 2) + j, a * db + col) = f(row, col);
      }
  }
  return out;
}

double choose_epsilon(const ReducedState& rho, const GZMaps& gz) {
  std::array<BasisBlocks, 2> bb{basis_blocks(rho, gz, 0), basis_blocks(rho, gz, 1)};
  double dprime = gz.ambient_dim();
  for (double eps : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& b : bb) {
      Eigen::SelfAdjointEigenSolver<Mat> es(perturb(b.tau, eps, dprime), Eigen::EigenvaluesOnly);
      lmin = std::min(lmin, es.eigenvalues().minCoeff());
      for (const auto& m : b.flag_tau) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> e2(perturb(m, eps, dprime),
                                                           Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, e2.eigenvalues().minCoeff());
      }
    }
    if (lmin >= kEigFloor) return eps;
  }
  return 1e-6;
}

double objective_bits(const ReducedState& rho, const GZMaps& gz, double epsilon) {
  double dprime = gz.ambient_dim();
  double nats = 0.0;
  for (int j = 0; j < 2; ++j) {
    BasisBlocks b = basis_blocks(rho, gz, j);
    nats += pinched_rel_entropy(perturb(b.tau, epsilon, dprime));
    for (const auto& m : b.flag_tau) nats += pinched_rel_entropy(perturb(m, epsilon, dprime));
  }
  return nats / std::numbers::ln2;
}

ReducedState gradient_bits(const ReducedState& rho, const GZMaps& gz, double epsilon) {
  int t = gz.t_dim();
  double dprime = gz.ambient_dim();
  double w = (1.0 - epsilon) / std::numbers::ln2;
  ReducedState g = ReducedState::zero(rho.n_b);
  for (int j = 0; j < 2; ++j) {
    BasisBlocks b = basis_blocks(rho, gz, j);
    const Mat& l = gz.f_low[j];
    Mat xi = pinched_log_difference(perturb(b.tau, epsilon, dprime));
    int a0 = j, a1 = j + 2;
    auto add = [&](int ar, int ac, int r, int c) {
      g.rho_low.block(ar * t, ac * t, t, t) += w * l * xi.block(r * t, c * t, t, t) * l;
    };
    add(a0, a0, 0, 0);
    add(a0, a1, 0, 1);
    add(a1, a0, 1, 0);
    add(a1, a1, 1, 1);
    for (size_t i = 0; i < gz.kept[j].size(); ++i) {
      int k = gz.kept[j][i];
      Eigen::Matrix2cd xf = pinched_log_difference(perturb(b.flag_tau[i], epsilon, dprime));
      g.flags[k](a0, a0) += w * xf(0, 0);
      g.flags[k](a0, a1) += w * xf(0, 1);
      g.flags[k](a1, a0) += w * xf(1, 0);
      g.flags[k](a1, a1) += w * xf(1, 1);
    }
  }
  g.hermitianize();
  return g;
}

}  // namespace ubb84::optimize
