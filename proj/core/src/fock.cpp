#include "ubb84/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ubb84::fock {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

// Per-mode loss Kraus coefficient: <n-l| K_l |n> = sqrt(C(n,l) t^(n-l) (1-t)^l).
double loss_kraus_coeff(int n, int l, double t) {
  return std::sqrt(binomial(n, l) * std::pow(t, n - l) * std::pow(1.0 - t, l));
}

void check_transmissivity(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("transmissivity must be in [0,1]");
}

}  // namespace

FockBasis::FockBasis(int n_cut) : n_cut_(n_cut) {
  if (n_cut < 0) throw std::invalid_argument("negative Fock cutoff");
  dim_ = (n_cut + 1) * (n_cut + 2) / 2;
}

int FockBasis::index(int n1, int n2) const {
  if (n1 < 0 || n2 < 0 || n1 + n2 > n_cut_) throw std::out_of_range("occupation outside cutoff");
  return sector_offset(n1 + n2) + n2;
}

std::pair<int, int> FockBasis::occupation(int idx) const {
  if (idx < 0 || idx >= dim_) throw std::out_of_range("flat index outside basis");
  int n = 0;
  while (sector_offset(n + 1) <= idx) ++n;
  int n2 = idx - sector_offset(n);
  return {n - n2, n2};
}

Operator Operator::identity(const FockBasis& b) {
  return Operator{b, Mat::Identity(b.dim(), b.dim()), true};
}

Operator Operator::zero(const FockBasis& b) {
  return Operator{b, Mat::Zero(b.dim(), b.dim()), true};
}

bool Operator::is_hermitian(double tol) const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::check_block_diagonal(double tol) const {
  for (int i = 0; i < basis.dim(); ++i) {
    auto [a1, a2] = basis.occupation(i);
    for (int j = 0; j < basis.dim(); ++j) {
      auto [b1, b2] = basis.occupation(j);
      if (a1 + a2 != b1 + b2 && std::abs(entries(i, j)) > tol) return false;
    }
  }
  return true;
}

double Operator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SectorOperator SectorOperator::zeros(int n_cut) {
  SectorOperator s;
  s.n_cut = n_cut;
  s.blocks.reserve(n_cut + 1);
  for (int n = 0; n <= n_cut; ++n) s.blocks.push_back(Mat::Zero(n + 1, n + 1));
  return s;
}

SectorOperator SectorOperator::identity(int n_cut) {
  SectorOperator s = zeros(n_cut);
  for (int n = 0; n <= n_cut; ++n) s.blocks[n] = Mat::Identity(n + 1, n + 1);
  return s;
}

Operator SectorOperator::to_operator() const {
  FockBasis b(n_cut);
  Mat m = Mat::Zero(b.dim(), b.dim());
  for (int n = 0; n <= n_cut; ++n) {
    int off = b.sector_offset(n);
    m.block(off, off, n + 1, n + 1) = blocks[n];
  }
  return Operator{b, std::move(m), true};
}

SectorOperator SectorOperator::from_operator(const Operator& op, double tol) {
  if (!op.check_block_diagonal(tol)) throw std::invalid_argument("operator not block-diagonal");
  SectorOperator s = zeros(op.basis.cutoff());
  for (int n = 0; n <= s.n_cut; ++n) {
    int off = op.basis.sector_offset(n);
    s.blocks[n] = op.entries.block(off, off, n + 1, n + 1);
  }
  return s;
}

SectorOperator& SectorOperator::operator+=(const SectorOperator& o) {
  if (o.n_cut != n_cut) throw std::invalid_argument("sector cutoff mismatch");
  for (int n = 0; n <= n_cut; ++n) blocks[n] += o.blocks[n];
  return *this;
}

SectorOperator& SectorOperator::operator*=(double s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

SectorOperator SectorOperator::truncated(int n_max) const {
  if (n_max > n_cut) throw std::invalid_argument("truncation beyond stored cutoff");
  SectorOperator s;
  s.n_cut = n_max;
  s.blocks.assign(blocks.begin(), blocks.begin() + n_max + 1);
  return s;
}

double SectorOperator::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Mat> es(b, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

double SectorOperator::max_abs_diff(const SectorOperator& o) const {
  if (o.n_cut != n_cut) throw std::invalid_argument("sector cutoff mismatch");
  double m = 0.0;
  for (int n = 0; n <= n_cut; ++n) m = std::max(m, (blocks[n] - o.blocks[n]).cwiseAbs().maxCoeff());
  return m;
}

Vec mode_monomial_state(Complex c1, Complex c2, int n, const FockBasis& basis) {
  if (n > basis.cutoff()) throw std::out_of_range("monomial degree exceeds Fock cutoff");
  if (n < 0) throw std::invalid_argument("negative photon number");
  if (c1 == Complex(0, 0) && c2 == Complex(0, 0))
    throw std::invalid_argument("null mode coefficients");
  Vec v = Vec::Zero(basis.dim());
  for (int k = 0; k <= n; ++k) {
    v(basis.index(n - k, k)) =
        std::sqrt(binomial(n, k)) * std::pow(c1, n - k) * std::pow(c2, k);
  }
  return v;
}

Vec multimode_monomial_state(const std::vector<std::pair<Complex, Complex>>& modes,
                             const std::vector<int>& powers, const FockBasis& basis) {
  if (modes.size() != powers.size()) throw std::invalid_argument("modes/powers size mismatch");
  int n = 0;
  double norm_fact = 1.0;
  // Coefficients of the polynomial in (a1^dag, a2^dag): coeff[k] multiplies
  // (a1^dag)^(deg-k) (a2^dag)^k. Built by convolving per-mode binomials.
  std::vector<Complex> coeff{Complex(1.0, 0.0)};
  for (size_t m = 0; m < modes.size(); ++m) {
    int p = powers[m];
    if (p < 0) throw std::invalid_argument("negative mode power");
    for (int i = 1; i <= p; ++i) norm_fact *= i;
    std::vector<Complex> mono(p + 1);
    for (int k = 0; k <= p; ++k)
      mono[k] = binomial(p, k) * std::pow(modes[m].first, p - k) * std::pow(modes[m].second, k);
    std::vector<Complex> next(coeff.size() + p, Complex(0, 0));
    for (size_t a = 0; a < coeff.size(); ++a)
      for (int b = 0; b <= p; ++b) next[a + b] += coeff[a] * mono[b];
    coeff = std::move(next);
    n += p;
  }
  if (n > basis.cutoff()) throw std::out_of_range("total monomial degree exceeds Fock cutoff");
  Vec v = Vec::Zero(basis.dim());
  for (int k = 0; k <= n; ++k) {
    double f1 = 1.0, f2 = 1.0;
    for (int i = 1; i <= n - k; ++i) f1 *= i;
    for (int i = 1; i <= k; ++i) f2 *= i;
    v(basis.index(n - k, k)) = coeff[k] * std::sqrt(f1 * f2 / norm_fact);
  }
  return v;
}

SectorOperator loss_adjoint(const SectorOperator& op, double t) {
  check_transmissivity(t);
  SectorOperator out = SectorOperator::zeros(op.n_cut);
  // <n1,n2| E^dag(O) |m1,m2> = sum over losses (l1,l2) of
  //   K(n1,l1) K(n2,l2) K(m1,l1) K(m2,l2) <n1-l1,n2-l2| O |m1-l1,m2-l2>,
  // nonzero only for n1+n2 = m1+m2 when O is block-diagonal.
  for (int n = 0; n <= op.n_cut; ++n) {
    Mat& dst = out.blocks[n];
    for (int i = 0; i <= n; ++i) {      // ket |n-i, i>
      for (int j = 0; j <= n; ++j) {    // bra <n-j, j|
        Complex acc(0, 0);
        for (int l1 = 0; l1 <= std::min(n - i, n - j); ++l1) {
          for (int l2 = 0; l2 <= std::min(i, j); ++l2) {
            int m = n - l1 - l2;
            int bi = i - l2, bj = j - l2;
            // both source occupations must live in the same sector m
            if (bi > m || bj > m || bi < 0 || bj < 0) continue;
            double w = loss_kraus_coeff(n - j, l1, t) * loss_kraus_coeff(j, l2, t) *
                       loss_kraus_coeff(n - i, l1, t) * loss_kraus_coeff(i, l2, t);
            if (w == 0.0) continue;
            acc += w * op.blocks[m](bj, bi);
          }
        }
        dst(j, i) = acc;
      }
    }
  }
  return out;
}

Operator loss_adjoint(const Operator& op, double t) {
  check_transmissivity(t);
  const FockBasis& b = op.basis;
  Mat out = Mat::Zero(b.dim(), b.dim());
  for (int r = 0; r < b.dim(); ++r) {
    auto [r1, r2] = b.occupation(r);
    for (int c = 0; c < b.dim(); ++c) {
      auto [c1, c2] = b.occupation(c);
      Complex acc(0, 0);
      for (int l1 = 0; l1 <= std::min(r1, c1); ++l1) {
        for (int l2 = 0; l2 <= std::min(r2, c2); ++l2) {
          double w = loss_kraus_coeff(r1, l1, t) * loss_kraus_coeff(r2, l2, t) *
                     loss_kraus_coeff(c1, l1, t) * loss_kraus_coeff(c2, l2, t);
          if (w == 0.0) continue;
          acc += w * op.entries(b.index(r1 - l1, r2 - l2), b.index(c1 - l1, c2 - l2));
        }
      }
      out(r, c) = acc;
    }
  }
  return Operator{b, std::move(out), op.block_diagonal};
}

Mat loss_channel_apply(const Mat& rho, double t, const FockBasis& basis) {
  check_transmissivity(t);
  Mat out = Mat::Zero(basis.dim(), basis.dim());
  for (int r = 0; r < basis.dim(); ++r) {
    auto [r1, r2] = basis.occupation(r);
    for (int c = 0; c < basis.dim(); ++c) {
      auto [c1, c2] = basis.occupation(c);
      if (std::abs(rho(r, c)) == 0.0) continue;
      Complex x = rho(r, c);
      for (int l1 = 0; l1 <= std::min(r1, c1); ++l1) {
        for (int l2 = 0; l2 <= std::min(r2, c2); ++l2) {
          double w = loss_kraus_coeff(r1, l1, t) * loss_kraus_coeff(r2, l2, t) *
                     loss_kraus_coeff(c1, l1, t) * loss_kraus_coeff(c2, l2, t);
          if (w == 0.0) continue;
          out(basis.index(r1 - l1, r2 - l2), basis.index(c1 - l1, c2 - l2)) += w * x;
        }
      }
    }
  }
  return out;
}

Operator project_block(const Operator& op, int n) {
  if (n > op.basis.cutoff()) throw std::out_of_range("sector beyond cutoff");
  Mat out = Mat::Zero(op.basis.dim(), op.basis.dim());
  int off = op.basis.sector_offset(n);
  out.block(off, off, n + 1, n + 1) = op.entries.block(off, off, n + 1, n + 1);
  return Operator{op.basis, std::move(out), op.block_diagonal};
}

}  // namespace ubb84::fock
