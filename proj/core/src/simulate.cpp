#include "ubb84/simulate.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace ubb84::simulate {

void ChannelModel::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("eta must be in (0,1]");
  if (!(eta_det > 0.0 && eta_det <= 1.0)) throw std::domain_error("eta_det must be in (0,1]");
  if (!(p_d >= 0.0 && p_d < 1.0)) throw std::domain_error("p_d must be in [0,1)");
  if (trusted_det && eta > eta_det + 1e-15)
    throw std::domain_error("trusted eta_det below total eta leaves channel transmissivity > 1");
}

Mat conditional_state(int n_tilde, const ChannelModel& ch, const source::SignalSettings& s,
                      const FockBasis& basis) {
  if (n_tilde > basis.cutoff()) throw std::out_of_range("photon number beyond Fock cutoff");
  double t = ch.channel_transmissivity();
  int d = basis.dim();
  Mat rho = Mat::Zero(4 * d, 4 * d);
  std::array<fock::Vec, 4> kets;
  for (int x = 0; x < 4; ++x) kets[x] = source::signal_ket(x, n_tilde, s, basis);
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      Mat block = kets[x] * kets[y].adjoint();
      rho.block(x * d, y * d, d, d) =
          std::sqrt(s.p_x[x] * s.p_x[y]) * fock::loss_channel_apply(block, t, basis);
    }
  }
  return rho;
}

Eigen::MatrixXd conditional_probs(int n_tilde, const povm::PovmSet& p, const ChannelModel& ch,
                                  const source::SignalSettings& s) {
  if (n_tilde > p.n_cut) throw std::out_of_range("photon number beyond POVM cutoff");
  double t = ch.channel_transmissivity();
  FockBasis basis(n_tilde);
  Eigen::MatrixXd out(4, povm::kNumOutcomes);
  for (int x = 0; x < 4; ++x) {
    fock::Vec ket = source::signal_ket(x, n_tilde, s, basis);
    Mat rho = fock::loss_channel_apply(ket * ket.adjoint(), t, basis);
    for (int k = 0; k < povm::kNumOutcomes; ++k) {
      double v = 0.0;
      for (int n = 0; n <= n_tilde; ++n) {
        int off = basis.sector_offset(n);
        v += (p.elements[k].blocks[n] * rho.block(off, off, n + 1, n + 1)).trace().real();
      }
      out(x, k) = s.p_x[x] * v;
    }
  }
  return out;
}

Totals total_statistics(const source::SignalSettings& s, const ChannelModel& ch,
                        const std::vector<povm::ClickPattern>& labels) {
  double xi = s.xi();
  double asq = std::norm(s.alpha);
  double q_out = 1.0 - (1.0 - ch.p_d) * (1.0 - ch.p_d);
  std::array<double, 4> flip{q_out, ch.p_d, ch.p_d, q_out};

  Totals tot;
  tot.table = Eigen::MatrixXd::Zero(4, povm::kNumOutcomes);
  tot.p_cc = {0, 0, 0, 0};

  for (int x = 0; x < 4; ++x) {
    double phi_x = s.phase(x);
    for (int fb = 0; fb < 2; ++fb) {
      double phi_b = fb * std::numbers::pi / 2.0;
      double delta = phi_b - phi_x;
      // mean photon number arriving at each effective bin
      std::array<double, 4> mu;
      mu[0] = ch.eta * xi * asq;
      mu[1] = 2.0 * ch.eta * (1.0 - xi) * asq * std::sin(delta / 2.0) * std::sin(delta / 2.0);
      mu[2] = 2.0 * ch.eta * (1.0 - xi) * asq * std::cos(delta / 2.0) * std::cos(delta / 2.0);
      mu[3] = ch.eta * (1.0 - xi) * (1.0 - xi) / xi * asq;
      std::array<double, 4> p_silent;
      for (int b = 0; b < 4; ++b) p_silent[b] = std::exp(-mu[b]) * (1.0 - flip[b]);
      for (unsigned mask = 0; mask < 16; ++mask) {
        double p = s.p_x[x] * s.p_basis[fb];
        for (int b = 0; b < 4; ++b)
          p *= (mask & (1u << b)) ? 1.0 - p_silent[b] : p_silent[b];
        bool merged = (mask & 0b0110u) == 0;
        int idx = -1;
        for (size_t i = 0; i < labels.size(); ++i)
          if (labels[i].mask == mask && labels[i].basis == (merged ? -1 : fb)) {
            idx = int(i);
            break;
          }
        tot.table(x, idx) += p;
        if (labels[idx].is_cross_click()) tot.p_cc[x] += p / s.p_x[x];
      }
    }
  }
  for (int x = 0; x < 4; ++x)
    for (size_t k = 0; k < labels.size(); ++k)
      if (labels[k].has_middle() && labels[k].basis == basis_of_signal(x))
        tot.p_pass += tot.table(x, int(k));
  return tot;
}

EcCost ec_cost(const Eigen::MatrixXd& table, const std::vector<povm::ClickPattern>& labels,
               double f_ec) {
  double p_pass = 0.0;
  double h = 0.0;
  for (size_t k = 0; k < labels.size(); ++k) {
    if (!labels[k].has_middle()) continue;
    int fb = labels[k].basis;
    double pz[2] = {0.0, 0.0};
    for (int x = 0; x < 4; ++x)
      if (basis_of_signal(x) == fb) pz[key_bit(x)] += table(x, int(k));
    double pk = pz[0] + pz[1];
    if (pk <= 0.0) continue;
    p_pass += pk;
    for (double v : pz)
      if (v > 0.0) h -= v * std::log2(v / pk);
  }
  if (p_pass <= 0.0) throw std::runtime_error("post-selection passes with probability zero");
  EcCost c;
  c.h_bits = h / p_pass;
  c.delta_ec = f_ec * c.h_bits;
  c.weighted = p_pass * c.delta_ec;
  return c;
}

ObservedStats simulate_stats(const source::SignalSettings& s, const ChannelModel& ch,
                             const povm::PovmSet& physical_povm, int n_a, double f_ec) {
  ObservedStats st;
  st.n_a = n_a;
  st.alpha_sq = std::norm(s.alpha);
  auto cross = physical_povm.cross_click_indices();
  for (int n = 0; n <= n_a; ++n) {
    st.cond.push_back(conditional_probs(n, physical_povm, ch, s));
    std::array<double, 4> pc{};
    for (int x = 0; x < 4; ++x) {
      for (int k : cross) pc[x] += st.cond[n](x, k);
      pc[x] /= s.p_x[x];
    }
    st.p_cc_cond.push_back(pc);
  }
  Totals tot = total_statistics(s, ch, physical_povm.labels);
  st.totals = tot.table;
  st.p_pass = tot.p_pass;
  st.p_cc_total = tot.p_cc;
  double pass0 = 0.0;
  for (int x = 0; x < 4; ++x)
    for (size_t k = 0; k < physical_povm.labels.size(); ++k)
      if (physical_povm.labels[k].has_middle() &&
          physical_povm.labels[k].basis == basis_of_signal(x))
        pass0 += st.cond[0](x, int(k));
  st.p_pass_vacuum = source::poisson_weight(0, s) * pass0;
  st.ec_entropy_bits = ec_cost(st.totals, physical_povm.labels, f_ec).h_bits;
  return st;
}

void export_stats_csv(const ObservedStats& st, const std::vector<povm::ClickPattern>& labels,
                      std::ostream& os) {
  os << "x,outcome,basis,mask,n_tilde,probability\n";
  os.precision(12);
  for (size_t n = 0; n < st.cond.size(); ++n)
    for (int x = 0; x < 4; ++x)
      for (size_t k = 0; k < labels.size(); ++k)
        os << x << "," << k << "," << labels[k].basis << "," << labels[k].mask << "," << n << ","
           << st.cond[n](x, int(k)) << "\n";
}

}  // namespace ubb84::simulate
