#include "ubb84/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ubb84::cli {

namespace {

using povm::PovmSet;
using source::SignalSettings;

SignalSettings settings_for(double kappa, double alpha_sq) {
  SignalSettings s;
  s.kappa = kappa;
  s.alpha = std::sqrt(alpha_sq);
  return s;
}

PropertyResult check(const std::string& name, bool pass, const std::string& detail) {
  return PropertyResult{name, pass, detail};
}

}  // namespace

std::vector<PropertyResult> verify(const VerifyOptions& opt) {
  std::vector<PropertyResult> out;
  std::mt19937_64 rng(opt.seed);

  // POVM completeness / positivity / cardinality
  {
    double worst_defect = 0.0, worst_eig = 0.0;
    bool count_ok = true;
    for (double xi : {0.5, 0.77, 0.91}) {
      for (double pd : {0.0, 1e-3, opt.stress_p_d}) {
        SignalSettings s = settings_for(1.0 / xi - 1.0, 0.2);
        PovmSet p = povm::dark_count_postprocess(povm::build_ideal_povm(s, 4), pd);
        if (opt.corrupt_povm) p.elements[5] *= 1.01;
        count_ok = count_ok && int(p.elements.size()) == povm::kNumOutcomes;
        worst_defect = std::max(worst_defect, p.completeness_defect());
        worst_eig = std::min(worst_eig, p.min_eigenvalue());
      }
    }
    std::ostringstream d;
    d << "max completeness defect " << worst_defect << ", min eigenvalue " << worst_eig;
    out.push_back(check("povm-completeness-positivity",
                        count_ok && worst_defect < 1e-10 && worst_eig > -1e-10, d.str()));
  }

  // closed-form dark-count reproductions on the stress grid
  {
    double worst = 0.0;
    for (double xi : {0.5, 0.77}) {
      for (double pd : {8.5e-7, 1e-3, opt.stress_p_d}) {
        SignalSettings s = settings_for(1.0 / xi - 1.0, 0.2);
        PovmSet p = povm::dark_count_postprocess(povm::build_ideal_povm(s, 5), pd);
        auto c = povm::coarse_elements(p);
        worst = std::max(worst,
                         std::abs(c.cross_click.blocks[0](0, 0).real() - squash::p_cc_vacuum(pd)));
        for (int n = 1; n <= 5; ++n) {
          double numeric = c.cross_click.blocks[n].diagonal().real().minCoeff();
          worst = std::max(worst, std::abs(numeric - squash::p_min_cc(n, xi, pd)));
        }
      }
    }
    std::ostringstream d;
    d << "max closed-form deviation " << worst;
    out.push_back(check("cross-click-closed-forms", worst < 1e-12, d.str()));
  }

  // subspace-weight bound soundness on random states
  {
    double xi = 0.77, pd = 1e-3;
    int n_cut = 6, nb = 2;
    SignalSettings s = settings_for(1.0 / xi - 1.0, 0.2);
    auto c = povm::coarse_elements(
        povm::dark_count_postprocess(povm::build_ideal_povm(s, n_cut), pd));
    fock::FockBasis b(n_cut);
    fock::Mat pcc = c.cross_click.to_operator().entries;
    std::normal_distribution<double> g(0.0, 1.0);
    bool sound = true;
    double margin = 1.0;
    for (int trial = 0; trial < 1000; ++trial) {
      fock::Mat a(b.dim(), b.dim());
      for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) a(i, j) = fock::Complex(g(rng), g(rng));
      fock::Mat rho = a * a.adjoint();
      rho /= rho.trace().real();
      double pcc_val = (pcc * rho).trace().real();
      double weight = 0.0;
      for (int i = 0; i < b.sector_offset(nb + 1); ++i) weight += rho(i, i).real();
      double bound =
          squash::weight_lower_bound(pcc_val, nb, xi, pd, squash::BoundMode::trusted_analytic)
              .value;
      double bound_free =
          squash::weight_lower_bound(pcc_val, nb, xi, pd, squash::BoundMode::dark_count_free)
              .value;
      sound = sound && weight >= bound - 1e-10 && bound >= bound_free - 1e-12;
      margin = std::min(margin, weight - bound);
    }
    std::ostringstream d;
    d << "min weight-bound margin over 1000 states " << margin;
    out.push_back(check("weight-bound-soundness", sound, d.str()));
  }

  // gradient versus central finite differences
  {
    keyrate::ProtocolConfig cfg;
    cfg.kappa = 0.5;
    cfg.alpha_sq = 0.3;
    cfg.channel.eta = 0.6;
    cfg.channel.p_d = 0.05;
    cfg.n_a = 1;
    cfg.n_b = 1;
    keyrate::Instance inst = keyrate::prepare_instance(cfg);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_herm = [&](int d) {
      fock::Mat m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = fock::Complex(g(rng), g(rng));
      return fock::Mat(0.5 * (m + m.adjoint()));
    };
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      optimize::ReducedState rho = optimize::ReducedState::zero(1);
      fock::Mat a = random_herm(rho.low_dim());
      rho.rho_low =
          0.7 * (a * a / std::max(1.0, (a * a).trace().real()) +
                 0.05 * fock::Mat::Identity(rho.low_dim(), rho.low_dim()));
      for (auto& f : rho.flags) f = 0.01 * Eigen::Matrix4cd::Identity();
      optimize::ReducedState delta = optimize::ReducedState::zero(1);
      delta.rho_low = random_herm(rho.low_dim());
      for (auto& f : delta.flags) {
        fock::Mat m = random_herm(4);
        f = m;
      }
      delta.scale(1.0 / std::sqrt(delta.inner(delta)));
      double eps = 1e-9, t = 1e-5;
      optimize::ReducedState plus = rho, minus = rho;
      plus.axpy(t, delta);
      minus.axpy(-t, delta);
      double fd = (optimize::objective_bits(plus, inst.gz, eps) -
                   optimize::objective_bits(minus, inst.gz, eps)) /
                  (2 * t);
      double an = optimize::gradient_bits(rho, inst.gz, eps).inner(delta);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    std::ostringstream d;
    d << "worst relative gradient deviation " << worst;
    out.push_back(check("gradient-finite-differences", worst < 1e-4, d.str()));
  }

  // closed-form totals against the Poisson-weighted Fock conditionals
  {
    SignalSettings s = settings_for(0.5, 0.25);
    simulate::ChannelModel ch;
    ch.eta = 0.6;
    ch.p_d = 1e-3;
    int n_max = source::poisson_truncation(s, 1e-13);
    PovmSet p = povm::dark_count_postprocess(povm::build_ideal_povm(s, n_max), ch.p_d);
    simulate::Totals t = simulate::total_statistics(s, ch, p.labels);
    Eigen::MatrixXd fock_sum = Eigen::MatrixXd::Zero(4, povm::kNumOutcomes);
    for (int n = 0; n <= n_max; ++n)
      fock_sum += source::poisson_weight(n, s) * simulate::conditional_probs(n, p, ch, s);
    double worst = (t.table - fock_sum).cwiseAbs().maxCoeff();
    std::ostringstream d;
    d << "max closed-form vs Fock-sum deviation " << worst;
    out.push_back(check("simulation-oracle-agreement", worst < 2e-12, d.str()));
  }

  // squashed dimensions and constraint cardinality
  {
    keyrate::ProtocolConfig cfg;
    cfg.kappa = 0.5;
    cfg.alpha_sq = 0.3;
    cfg.channel.eta = 0.7;
    cfg.channel.p_d = 1e-3;
    cfg.n_a = 2;
    cfg.n_b = 4;
    keyrate::Instance inst = keyrate::prepare_instance(cfg);
    bool ok = inst.analysis.low_dim() == 15 && inst.analysis.total_dim() == 43 &&
              inst.constraints(1).size() == 133 &&
              optimize::ReducedState::zero(4).real_parameter_count() == 4048;
    out.push_back(check("squash-dimensions-constraint-count", ok,
                        ok ? "15 + 28 = 43, 133 rows, 4048 parameters" : "mismatch"));
  }

  // dark-count map columns are stochastic and match window flips
  {
    auto map = povm::PostProcessMap::build(0.07, {0.5, 0.5});
    double col_err = 0.0;
    for (int i = 0; i < povm::kNumOutcomes; ++i)
      col_err = std::max(col_err, std::abs(map.matrix.col(i).sum() - 1.0));
    out.push_back(check("postprocess-map-stochastic", col_err < 1e-12,
                        "max column-sum deviation " + std::to_string(col_err)));
  }

  return out;
}

}  // namespace ubb84::cli
