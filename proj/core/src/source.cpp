#include "ubb84/source.hpp"

#include <cmath>
#include <numbers>

namespace ubb84::source {

double SignalSettings::phase(int x) const {
  if (x < 0 || x > 3) throw std::out_of_range("signal index outside {0..3}");
  return std::numbers::pi / 2.0 * x;
}

void SignalSettings::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::domain_error("kappa must be in (0,1]");
  double sx = 0.0;
  for (double p : p_x) {
    if (p < 0.0) throw std::domain_error("negative signal prior");
    sx += p;
  }
  if (std::abs(sx - 1.0) > 1e-12) throw std::domain_error("signal priors must sum to 1");
  double sb = p_basis[0] + p_basis[1];
  if (p_basis[0] < 0.0 || p_basis[1] < 0.0 || std::abs(sb - 1.0) > 1e-12)
    throw std::domain_error("basis probabilities must be nonnegative and sum to 1");
}

Vec signal_ket(int x, int n, const SignalSettings& s, const FockBasis& basis) {
  double xi = s.xi();
  Complex c2 = std::sqrt(1.0 - xi) * std::exp(Complex(0.0, -s.phase(x)));
  return fock::mode_monomial_state(std::sqrt(xi), c2, n, basis);
}

Complex signal_overlap(int x, int y, int n, const SignalSettings& s) {
  double xi = s.xi();
  Complex base = xi + (1.0 - xi) * std::exp(Complex(0.0, s.phase(y) - s.phase(x)));
  return std::pow(base, n);
}

double poisson_weight(int n_tilde, const SignalSettings& s) {
  if (n_tilde < 0) throw std::invalid_argument("negative photon number");
  double mu = s.mean_photon_number();
  double log_p = -mu + n_tilde * std::log(mu > 0 ? mu : 1.0);
  for (int i = 2; i <= n_tilde; ++i) log_p -= std::log(double(i));
  if (mu == 0.0) return n_tilde == 0 ? 1.0 : 0.0;
  return std::exp(log_p);
}

int poisson_truncation(const SignalSettings& s, double tail) {
  double cum = 0.0;
  for (int n = 0; n < 512; ++n) {
    cum += poisson_weight(n, s);
    if (1.0 - cum < tail) return n;
  }
  throw std::runtime_error("Poisson truncation search exceeded 512 photons");
}

Mat alice_reduced_matrix(int n_tilde, const SignalSettings& s) {
  Mat m(4, 4);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      m(x, y) = std::sqrt(s.p_x[x] * s.p_x[y]) * signal_overlap(x, y, n_tilde, s);
  return m;
}

}  // namespace ubb84::source
