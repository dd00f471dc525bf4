#include "ubb84/squash.hpp"

#include <algorithm>
#include <cmath>

namespace ubb84::squash {

int SquashedPovm::index_of(int basis, unsigned mask) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].basis == basis && labels[i].mask == mask) return int(i);
  throw std::out_of_range("no such outcome label");
}

std::vector<int> SquashedPovm::kept_indices(int basis) const {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].basis == basis && labels[i].has_middle()) out.push_back(int(i));
  return out;
}

std::vector<int> SquashedPovm::cross_click_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].is_cross_click()) out.push_back(int(i));
  return out;
}

double SquashedPovm::completeness_defect() const {
  Mat s = Mat::Zero(low_dim(), low_dim());
  for (const auto& b : low_blocks) s += b;
  return (s - Mat::Identity(low_dim(), low_dim())).cwiseAbs().maxCoeff();
}

SquashedPovm squash_povm(const povm::PovmSet& p, int n_b) {
  if (p.n_cut < n_b) throw std::invalid_argument("POVM cutoff below flag cutoff N_B");
  SquashedPovm s;
  s.n_b = n_b;
  s.labels = p.labels;
  s.xi = p.xi;
  s.p_basis = p.p_basis;
  s.p_d = p.p_d;
  s.eta_det = p.eta_det;
  s.low_blocks.reserve(p.elements.size());
  for (const auto& e : p.elements)
    s.low_blocks.push_back(e.truncated(n_b).to_operator().entries);
  return s;
}

double p_cc_vacuum(double p_d) {
  if (!(p_d >= 0.0 && p_d < 1.0)) throw std::domain_error("dark-count probability must be in [0,1)");
  double k2 = (1.0 - p_d) * (1.0 - p_d);
  return 1.0 - k2 * (1.0 + p_d * k2 * (2.0 - p_d));
}

double p_min_cc(int n, double xi, double p_d) {
  if (n < 1) throw std::domain_error("p_min_cc is defined for n >= 1; use p_cc_vacuum for n = 0");
  if (!(xi >= 0.5 && xi < 1.0)) throw std::domain_error("xi must lie in [1/2, 1)");
  if (!(p_d >= 0.0 && p_d < 1.0)) throw std::domain_error("dark-count probability must be in [0,1)");
  double k2 = (1.0 - p_d) * (1.0 - p_d);
  return 1.0 - k2 * std::pow(xi, n) - k2 * k2 * std::pow(1.0 - xi, n);
}

SubspaceBound weight_lower_bound(double p_cc_x, int n_b, double xi, double p_d, BoundMode mode,
                                 const SectorOperator* cc_element) {
  SubspaceBound b;
  b.p_cc = p_cc_x;
  b.p_d = p_d;
  b.xi = xi;
  b.n_b = n_b;
  b.mode = mode;

  double raw;
  switch (mode) {
    case BoundMode::trusted_analytic: {
      double p0 = p_cc_vacuum(p_d);
      raw = 1.0 - (p_cc_x - p0) / (p_min_cc(n_b + 1, xi, p_d) - p0);
      break;
    }
    case BoundMode::dark_count_free: {
      double denom = 1.0 - std::pow(xi, n_b + 1) - std::pow(1.0 - xi, n_b + 1);
      raw = 1.0 - p_cc_x / denom;
      break;
    }
    case BoundMode::numeric: {
      if (cc_element == nullptr || cc_element->n_cut < n_b + 1)
        throw std::invalid_argument("numeric mode needs the cross-click element to sector N_B+1");
      double p0 = cc_element->blocks[0](0, 0).real();
      std::vector<double> mins;
      for (int n = 1; n <= cc_element->n_cut; ++n)
        mins.push_back(cc_element->blocks[n].diagonal().real().minCoeff());
      double prev = p0;
      for (double v : mins) {
        if (v < prev - 1e-12)
          throw std::runtime_error("numeric cross-click minima not monotone; bound unavailable");
        prev = v;
      }
      raw = 1.0 - (p_cc_x - p0) / (mins[n_b] - p0);
      break;
    }
    default:
      throw std::logic_error("unknown bound mode");
  }
  b.value = std::clamp(raw, 0.0, 1.0);
  return b;
}

}  // namespace ubb84::squash
