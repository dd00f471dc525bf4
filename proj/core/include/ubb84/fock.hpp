#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ubb84::fock {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Truncated two-mode Fock space: all |n1,n2> with n1+n2 <= n_cut.
/// Flat ordering: sectors by ascending total photon number n, within a
/// sector ascending n2, so every sector is a contiguous index range.
class FockBasis {
 public:
  explicit FockBasis(int n_cut);

  int cutoff() const { return n_cut_; }
  int dim() const { return dim_; }

  /// First flat index of the n-photon sector.
  int sector_offset(int n) const { return n * (n + 1) / 2; }
  int sector_dim(int n) const { return n + 1; }

  int index(int n1, int n2) const;
  std::pair<int, int> occupation(int idx) const;

 private:
  int n_cut_;
  int dim_;
};

struct Operator {
  FockBasis basis;
  Mat entries;
  bool block_diagonal = false;

  static Operator identity(const FockBasis& b);
  static Operator zero(const FockBasis& b);

  bool is_hermitian(double tol = 1e-12) const;
  /// True if no entry couples different total-photon sectors (tolerance on |entry|).
  bool check_block_diagonal(double tol = 0.0) const;
  double min_eigenvalue() const;
};

/// Block-diagonal operator stored one dense block per total-photon sector.
/// The preferred representation for POVM elements.
struct SectorOperator {
  int n_cut = 0;
  std::vector<Mat> blocks;  // blocks[n] is (n+1) x (n+1)

  static SectorOperator zeros(int n_cut);
  static SectorOperator identity(int n_cut);

  Operator to_operator() const;
  static SectorOperator from_operator(const Operator& op, double tol = 1e-13);

  SectorOperator& operator+=(const SectorOperator& o);
  SectorOperator& operator*=(double s);
  friend SectorOperator operator*(double s, SectorOperator o) { return o *= s; }

  /// Restriction to sectors n <= n_max, repackaged on the smaller basis.
  SectorOperator truncated(int n_max) const;
  double min_eigenvalue() const;
  double max_abs_diff(const SectorOperator& o) const;
};

/// (c1 a1^dag + c2 a2^dag)^n |0,0> / sqrt(n!) as a vector on the basis.
/// Norm is (|c1|^2+|c2|^2)^(n/2); unit norm for unit-norm coefficient pairs.
Vec mode_monomial_state(Complex c1, Complex c2, int n, const FockBasis& basis);

/// Product of creation-monomials over several modes:
///   prod_mu (c_mu1 a1^dag + c_mu2 a2^dag)^(n_mu) |0,0> / sqrt(prod n_mu!).
Vec multimode_monomial_state(const std::vector<std::pair<Complex, Complex>>& modes,
                             const std::vector<int>& powers, const FockBasis& basis);

/// Adjoint of the equal two-mode pure-loss channel at transmissivity t:
/// E_t^dag(O) with Tr(E_t^dag(O) rho) = Tr(O E_t(rho)) on the truncated space.
Operator loss_adjoint(const Operator& op, double t);
SectorOperator loss_adjoint(const SectorOperator& op, double t);

/// The channel itself, E_t(rho); exact on the truncated space since loss
/// never raises photon number.
Mat loss_channel_apply(const Mat& rho, double t, const FockBasis& basis);

/// Copy of the n-photon sector of O, zero elsewhere.
Operator project_block(const Operator& op, int n);

}  // namespace ubb84::fock
