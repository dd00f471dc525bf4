#pragma once

#include <array>

#include "ubb84/fock.hpp"

namespace ubb84::source {

using fock::Complex;
using fock::FockBasis;
using fock::Mat;
using fock::Vec;

/// Source-side parameters of the unbalanced phase-encoded protocol.
/// kappa is the phase-modulator transmissivity; xi = 1/(1+kappa) is the
/// splitting ratio between the reference and the encoded pulse.
struct SignalSettings {
  Complex alpha{0.0, 0.0};
  double kappa = 1.0;
  std::array<double, 4> p_x{0.25, 0.25, 0.25, 0.25};
  std::array<double, 2> p_basis{0.5, 0.5};  // p(phi_B = 0), p(phi_B = pi/2)

  double xi() const { return 1.0 / (1.0 + kappa); }
  double phase(int x) const;  // phi_x = (pi/2) x
  /// Rescaled mean photon number |alpha~|^2 = |alpha|^2 / xi.
  double mean_photon_number() const { return std::norm(alpha) / xi(); }

  void validate() const;
};

/// |s^x_n(xi)>: the n-photon signal ket, unit norm.
Vec signal_ket(int x, int n, const SignalSettings& s, const FockBasis& basis);

/// <s^y_n | s^x_n> in closed form: (xi + (1-xi) e^{i(phi_y - phi_x)})^n.
Complex signal_overlap(int x, int y, int n, const SignalSettings& s);

/// Poisson weight p_n(alpha~) of Alice emitting n photons.
double poisson_weight(int n_tilde, const SignalSettings& s);

/// Smallest cutoff m with total Poisson tail mass beyond m below `tail`.
int poisson_truncation(const SignalSettings& s, double tail);

/// Alice's reduced density matrix conditioned on sending n~ photons:
/// M_{x,y} = sqrt(p_x p_y) <s^y_n~ | s^x_n~>. PSD with unit trace.
Mat alice_reduced_matrix(int n_tilde, const SignalSettings& s);

}  // namespace ubb84::source
