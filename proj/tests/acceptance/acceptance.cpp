// Acceptance suite: one numbered criterion per run (or all), each printing a
// pass/fail line with the measured quantities.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "ubb84/keyrate.hpp"

using namespace ubb84;
using optimize::ReducedState;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::string&)> run;
};

std::vector<optimize::BoundPair> g_all_bounds;  // every solved instance, for criterion 7

keyrate::ProtocolConfig config(double kappa, double eta, double p_d, int n_b, int n_a) {
  keyrate::ProtocolConfig cfg;
  cfg.kappa = kappa;
  cfg.alpha_sq = 0.3;
  cfg.channel.eta = eta;
  cfg.channel.p_d = p_d;
  cfg.n_b = n_b;
  cfg.n_a = n_a;
  return cfg;
}

source::SignalSettings settings_xi(double xi) {
  source::SignalSettings s;
  s.kappa = 1.0 / xi - 1.0;
  return s;
}

fock::SectorOperator scaled(fock::SectorOperator a, double w) {
  a *= w;
  return a;
}

// ---------------------------------------------------------------- criterion 1
bool criterion1(std::string& detail) {
  double worst = 0.0;
  for (double xi : {0.5, 0.55, 0.77, 0.91}) {
    for (double pd : {0.0, 1e-3, 0.1, 8.5e-7}) {
      source::SignalSettings s = settings_xi(xi);
      povm::PovmSet prod = povm::dark_count_postprocess(povm::build_ideal_povm(s, 6), pd);
      double q = 1.0 - (1 - pd) * (1 - pd);
      for (int basis = 0; basis < 2; ++basis) {
        auto f = povm::build_per_basis_povm(s, basis, 6);
        auto el = [&](unsigned mask) -> const fock::SectorOperator& {
          for (const auto& [l, e] : f)
            if (l.mask == mask) return e;
          throw std::logic_error("mask");
        };
        std::map<unsigned, fock::SectorOperator> formula;
        formula[0u] = scaled(el(0), std::pow(1 - pd, 6));
        fock::SectorOperator t1 = el(1);
        t1 += scaled(el(0), q);
        formula[1u] = scaled(t1, std::pow(1 - pd, 4));
        fock::SectorOperator t3 = el(8);
        t3 += scaled(el(0), q);
        formula[8u] = scaled(t3, std::pow(1 - pd, 4));
        fock::SectorOperator d2 = el(2);
        d2 += scaled(el(0), pd);
        formula[2u] = scaled(d2, std::pow(1 - pd, 5));
        fock::SectorOperator d5 = el(4);
        d5 += scaled(el(0), pd);
        formula[4u] = scaled(d5, std::pow(1 - pd, 5));
        fock::SectorOperator t13 = el(9);
        t13 += scaled(el(1), q);
        t13 += scaled(el(8), q);
        t13 += scaled(el(0), q * q);
        formula[9u] = scaled(t13, std::pow(1 - pd, 2));
        fock::SectorOperator d25 = el(6);
        d25 += scaled(el(2), pd);
        d25 += scaled(el(4), pd);
        d25 += scaled(el(0), pd * pd);
        formula[6u] = scaled(d25, std::pow(1 - pd, 4));
        // unmerged patterns compare directly; merged ones accumulate below
        for (unsigned mask : {2u, 4u, 6u})
          worst = std::max(worst,
                           prod.elements[prod.index_of(basis, mask)].max_abs_diff(formula[mask]));
        if (basis == 0) {
          for (unsigned mask : {0u, 1u, 8u, 9u}) {
            auto f1 = povm::build_per_basis_povm(s, 1, 6);
            auto el1 = [&](unsigned m) -> const fock::SectorOperator& {
              for (const auto& [l, e] : f1)
                if (l.mask == m) return e;
              throw std::logic_error("mask");
            };
            fock::SectorOperator other = el1(mask);
            std::map<unsigned, fock::SectorOperator> formula1;
            // rebuild the same combinations for basis 1
            fock::SectorOperator acc = formula[mask];
            switch (mask) {
              case 0u:
                acc += scaled(el1(0), std::pow(1 - pd, 6));
                break;
              case 1u: {
                fock::SectorOperator v = el1(1);
                v += scaled(el1(0), q);
                acc += scaled(v, std::pow(1 - pd, 4));
                break;
              }
              case 8u: {
                fock::SectorOperator v = el1(8);
                v += scaled(el1(0), q);
                acc += scaled(v, std::pow(1 - pd, 4));
                break;
              }
              default: {
                fock::SectorOperator v = el1(9);
                v += scaled(el1(1), q);
                v += scaled(el1(8), q);
                v += scaled(el1(0), q * q);
                acc += scaled(v, std::pow(1 - pd, 2));
              }
            }
            worst =
                std::max(worst, prod.elements[prod.index_of(-1, mask)].max_abs_diff(acc));
          }
        }
      }
      // coarse elements and the cross-click spectrum
      auto c = povm::coarse_elements(prod);
      worst = std::max(worst,
                       std::abs(c.cross_click.blocks[0](0, 0).real() - squash::p_cc_vacuum(pd)));
      double k2 = std::pow(1 - pd, 2), k4 = std::pow(1 - pd, 4);
      for (int n = 1; n <= 6; ++n)
        for (int i = 0; i <= n; ++i) {
          int n1 = n - i;
          double expect = 1.0 - k2 * std::pow(xi, n1) * std::pow(1 - xi, n - n1) -
                          k4 * std::pow(xi, n - n1) * std::pow(1 - xi, n1);
          worst = std::max(worst, std::abs(c.cross_click.blocks[n](i, i).real() - expect));
        }
      for (int n = 1; n <= 6; ++n) {
        double numeric = c.cross_click.blocks[n].diagonal().real().minCoeff();
        worst = std::max(worst, std::abs(numeric - squash::p_min_cc(n, xi, pd)));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max entrywise deviation %.3e (tolerance 1e-12)", worst);
  detail = buf;
  return worst < 1e-12;
}

// ---------------------------------------------------------------- criterion 2
bool criterion2(std::string& detail) {
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> g(0.0, 1.0);
  int n_cut = 8;
  fock::FockBasis b(n_cut);
  double min_margin = 1.0;
  bool tight_ok = true;
  for (int nb : {2, 4}) {
    for (auto [xi, pd] : std::vector<std::pair<double, double>>{
             {0.5, 1e-3}, {0.77, 8.5e-7}, {0.91, 0.1}}) {
      auto c = povm::coarse_elements(
          povm::dark_count_postprocess(povm::build_ideal_povm(settings_xi(xi), n_cut), pd));
      Eigen::VectorXd cc_diag(b.dim());
      for (int n = 0; n <= n_cut; ++n)
        for (int i = 0; i <= n; ++i)
          cc_diag(b.sector_offset(n) + i) = c.cross_click.blocks[n](i, i).real();
      for (int trial = 0; trial < 10000; ++trial) {
        fock::Mat a(b.dim(), b.dim());
        for (int i = 0; i < b.dim(); ++i)
          for (int j = 0; j < b.dim(); ++j) a(i, j) = fock::Complex(g(rng), g(rng));
        fock::Mat rho = a * a.adjoint();
        rho /= rho.trace().real();
        double pcc = 0.0, weight = 0.0;
        for (int i = 0; i < b.dim(); ++i) {
          pcc += cc_diag(i) * rho(i, i).real();
          if (i < b.sector_offset(nb + 1)) weight += rho(i, i).real();
        }
        double bound =
            squash::weight_lower_bound(pcc, nb, xi, pd, squash::BoundMode::trusted_analytic)
                .value;
        double bound_free =
            squash::weight_lower_bound(pcc, nb, xi, pd, squash::BoundMode::dark_count_free)
                .value;
        min_margin = std::min(min_margin, weight - bound);
        tight_ok = tight_ok && bound >= bound_free - 1e-12;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "min weight margin %.3e over 6x10^4 states; trusted >= dark-count-free: %s",
                min_margin, tight_ok ? "yes" : "NO");
  detail = buf;
  return min_margin >= -1e-10 && tight_ok;
}

// ---------------------------------------------------------------- criterion 3
bool criterion3(std::string& detail) {
  bool ok = true;
  for (double xi : {0.5, 0.77}) {
    for (double pd : {0.0, 1e-3}) {
      for (double eta : {1.0, 0.5}) {
        povm::PovmSet p = povm::trusted_efficiency_transform(
            povm::dark_count_postprocess(povm::build_ideal_povm(settings_xi(xi), 5), pd), eta);
        ok = ok && int(p.elements.size()) == 28;
        ok = ok && p.completeness_defect() < 1e-10;
        ok = ok && p.min_eigenvalue() > -1e-10;
        for (const auto& e : p.elements) ok = ok && e.to_operator().check_block_diagonal(0.0);
      }
    }
  }
  keyrate::Instance inst = keyrate::prepare_instance(config(0.5, 0.7, 1e-3, 4, 2));
  bool dims_ok = inst.analysis.low_dim() == 15 && inst.analysis.total_dim() == 43;
  bool count_ok = inst.constraints(1).size() == 133 && inst.constraints(2).size() == 133;
  bool param_ok = ReducedState::zero(4).real_parameter_count() == 4048;
  detail = std::string("povm integrity ") + (ok ? "ok" : "BAD") + ", squashed dim 15+28=43 " +
           (dims_ok ? "ok" : "BAD") + ", 133 constraints " + (count_ok ? "ok" : "BAD") +
           ", 4048 parameters " + (param_ok ? "ok" : "BAD");
  return ok && dims_ok && count_ok && param_ok;
}

// ---------------------------------------------------------------- criterion 4
bool criterion4(std::string& detail) {
  keyrate::Instance inst = keyrate::prepare_instance(config(0.5, 0.7, 1e-3, 1, 1));
  oracles::MonolithicGZ mono = oracles::build_monolithic_gz(inst.analysis);
  oracles::FeasibleSampler sampler(inst, 1);
  std::mt19937_64 rng(99);
  double worst_block = 0.0, worst_pert = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ReducedState rho = sampler.draw(rng);
    double block0 = optimize::objective_bits(rho, inst.gz, 0.0);
    double full0 = oracles::monolithic_objective_bits(rho.assemble(), mono, 0.0);
    worst_block = std::max(worst_block, std::abs(block0 - full0));
    double eps = 1e-7;
    double blocke = optimize::objective_bits(rho, inst.gz, eps);
    double fulle = oracles::monolithic_objective_bits(rho.assemble(), mono, eps);
    worst_pert = std::max(worst_pert, std::abs(blocke - fulle));
  }
  // gradient versus central finite differences on 20 random interior states
  keyrate::Instance fd_inst = keyrate::prepare_instance(config(0.5, 0.6, 0.05, 1, 1));
  double worst_fd = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ReducedState rho = ReducedState::zero(1);
    rho.rho_low = 0.7 * (0.7 * oracles::random_density(rho.low_dim(), rng) +
                         0.3 / rho.low_dim() *
                             fock::Mat::Identity(rho.low_dim(), rho.low_dim()));
    for (auto& f : rho.flags)
      f = (0.3 / 28.0) *
          (0.7 * oracles::random_density(4, rng) + 0.075 * Eigen::Matrix4cd::Identity());
    ReducedState delta = ReducedState::zero(1);
    delta.rho_low = oracles::random_hermitian(delta.low_dim(), rng);
    for (auto& f : delta.flags) f = oracles::random_hermitian(4, rng);
    delta.scale(1.0 / std::sqrt(delta.inner(delta)));
    double eps = 1e-9, t = 1e-5;
    ReducedState plus = rho, minus = rho;
    plus.axpy(t, delta);
    minus.axpy(-t, delta);
    double fd = (optimize::objective_bits(plus, fd_inst.gz, eps) -
                 optimize::objective_bits(minus, fd_inst.gz, eps)) /
                (2 * t);
    double an = optimize::gradient_bits(rho, fd_inst.gz, eps).inner(delta);
    worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "blockwise vs monolithic %.3e, perturbed restriction %.3e (tol 1e-9); "
                "gradient FD rel %.3e (tol 1e-4)",
                worst_block, worst_pert, worst_fd);
  detail = buf;
  return worst_block < 1e-9 && worst_pert < 1e-9 && worst_fd < 1e-4;
}

// ---------------------------------------------------------------- criterion 5
bool criterion5(std::string& detail) {
  keyrate::Instance inst = keyrate::prepare_instance(config(1.0, 1.0, 0.0, 1, 1));
  auto pa = keyrate::pa_terms(inst);
  g_all_bounds.push_back(pa[0].bounds);
  double lo = pa[0].bounds.lower, up = pa[0].bounds.upper;
  char buf[160];
  std::snprintf(buf, sizeof buf, "PA1 bounds [%.9f, %.9f], window [0.245, 0.250]", lo, up);
  detail = buf;
  return lo >= 0.245 && lo <= 0.250 && up >= 0.245 && up <= 0.250;
}

// ---------------------------------------------------------------- criterion 6
bool criterion6(std::string& detail) {
  keyrate::Instance bal = keyrate::prepare_instance(config(1.0, 1.0, 0.0, 2, 2));
  auto pa_bal = keyrate::pa_terms(bal);
  g_all_bounds.push_back(pa_bal[0].bounds);
  g_all_bounds.push_back(pa_bal[1].bounds);
  double pa2_bal = pa_bal[1].bounds.upper;

  keyrate::Instance unbal = keyrate::prepare_instance(config(0.3, 1.0, 0.0, 2, 2));
  auto pa_unbal = keyrate::pa_terms(unbal);
  g_all_bounds.push_back(pa_unbal[0].bounds);
  g_all_bounds.push_back(pa_unbal[1].bounds);
  double pa2_unbal_lower = pa_unbal[1].bounds.lower;

  bool first = pa2_bal <= 1e-3;
  bool second = pa2_unbal_lower > 0.0;
  char buf[420];
  std::snprintf(
      buf, sizeof buf,
      "balanced PA2 upper %.6f (required <= 1e-3): %s; unbalanced certified PA2 %.6f > 0: %s.%s",
      pa2_bal, first ? "ok" : "FAILS", pa2_unbal_lower, second ? "ok" : "FAILS",
      first ? ""
            : " Note: the balanced minimum is genuinely positive here; forcing zero key "
              "coherence on top of the 133 constraints is linear-SDP infeasible (min violation "
              "~8.5e-4), and a zero value would contradict the reported r21 minimum at kappa "
              "~= 0.3 and the kappa = 1 gain over the one-photon tagging baseline.");
  detail = buf;
  return first && second;
}

// ---------------------------------------------------------------- criterion 7
bool criterion7(std::string& detail) {
  // toy singleton: tomographically pinned interior state
  keyrate::Instance inst = keyrate::prepare_instance(config(0.5, 0.8, 1e-4, 1, 1));
  ReducedState rho0 = inst.simulated_state(1);
  rho0.scale(0.7);
  int dim_total = rho0.low_dim() + 4 * povm::kNumOutcomes;
  rho0.rho_low += 0.3 / dim_total * fock::Mat::Identity(rho0.low_dim(), rho0.low_dim());
  for (auto& f : rho0.flags) f += 0.3 / dim_total * Eigen::Matrix4cd::Identity();

  optimize::ConstraintSet cs;
  cs.n_b = 1;
  cs.n_tilde = 1;
  Eigen::VectorXd v0 = optimize::vectorize_state(rho0);
  for (int p = 0; p < int(v0.size()); ++p) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(v0.size());
    e(p) = 1.0;
    ReducedState basis_el = optimize::unvectorize_state(e, 1);
    sdp::ConstraintMat a;
    a.terms.push_back({0, basis_el.rho_low});
    for (int k = 0; k < povm::kNumOutcomes; ++k)
      if (basis_el.flags[k].cwiseAbs().maxCoeff() > 0.0)
        a.terms.push_back({1 + k, basis_el.flags[k]});
    cs.rows.push_back({std::move(a), v0(p), sdp::Sense::eq});
    cs.kinds.push_back(optimize::ConstraintKind::normalization);
    cs.relaxable.push_back(false);
    cs.psd_operator.push_back(false);
  }
  optimize::FwConfig fw;
  optimize::PaSolution sol = optimize::solve_pa_term(cs, inst.gz, fw, &rho0);
  g_all_bounds.push_back(sol.bounds);
  double gap = sol.bounds.upper - sol.bounds.lower;

  bool ordered = true;
  double worst_inversion = 0.0;
  for (const auto& b : g_all_bounds) {
    ordered = ordered && b.lower <= b.upper + 1e-9;
    worst_inversion = std::max(worst_inversion, b.lower - b.upper);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "singleton gap %.3e (tol 1e-6); lower <= upper on %zu solved instances "
                "(worst inversion %.3e)",
                gap, g_all_bounds.size(), worst_inversion);
  detail = buf;
  return gap <= 1e-6 && ordered;
}

// ---------------------------------------------------------------- criterion 8
bool criterion8(std::string& detail) {
  const double pd = 8.5e-7;
  keyrate::IntensityGrid grid;
  grid.points = 20;

  // (a) rate increases with kappa at fixed eta
  std::map<double, std::map<double, keyrate::KeyRateReport>> reports;
  std::map<double, std::map<double, std::vector<keyrate::PaTerm>>> terms;
  std::map<double, std::map<double, keyrate::Instance>> instances;
  for (double eta : {1.0, 0.5}) {
    for (double kappa : {0.3, 0.5, 1.0}) {
      keyrate::Instance inst = keyrate::prepare_instance(config(kappa, eta, pd, 2, 2));
      auto pa = keyrate::pa_terms(inst);
      for (const auto& t : pa) g_all_bounds.push_back(t.bounds);
      reports[eta][kappa] = keyrate::optimize_intensity(pa, inst, grid);
      terms[eta][kappa] = pa;
      instances[eta].emplace(kappa, std::move(inst));
    }
  }
  bool a_ok = true;
  for (double eta : {1.0, 0.5}) {
    a_ok = a_ok && reports[eta][0.3].rate < reports[eta][0.5].rate;
    a_ok = a_ok && reports[eta][0.5].rate < reports[eta][1.0].rate;
  }

  // (b) N_A = 2 never loses to N_A = 1 at fixed alpha; strictly better at
  // eta = 1, kappa = 0.5
  bool b_ok = true;
  double b_gain = 0.0;
  for (double eta : {1.0, 0.5}) {
    for (double kappa : {0.3, 0.5, 1.0}) {
      const auto& inst = instances[eta].at(kappa);
      const auto& pa = terms[eta][kappa];
      std::vector<keyrate::PaTerm> pa1(pa.begin(), pa.begin() + 1);
      double asq = reports[eta][kappa].alpha_sq;
      double r2 = keyrate::key_rate(asq, pa, inst).rate_raw;
      double r1 = keyrate::key_rate(asq, pa1, inst).rate_raw;
      b_ok = b_ok && r2 >= r1 - 1e-12;
      if (eta == 1.0 && kappa == 0.5) {
        b_gain = r2 - r1;
        b_ok = b_ok && b_gain > 0.0;
      }
    }
  }

  // (c) trusted detector loss at fixed total eta = 0.1 never hurts
  bool c_ok = true;
  std::vector<double> c_rates;
  {
    double prev = -1.0;
    for (double eta_det : {1.0, 0.5, 0.2, 0.1}) {
      keyrate::ProtocolConfig cfg = config(1.0, 0.1, pd, 2, 2);
      cfg.channel.eta_det = eta_det;
      cfg.channel.trusted_det = eta_det < 1.0;
      keyrate::Instance inst = keyrate::prepare_instance(cfg);
      auto pa = keyrate::pa_terms(inst);
      for (const auto& t : pa) g_all_bounds.push_back(t.bounds);
      double rate = keyrate::optimize_intensity(pa, inst, grid).rate;
      c_rates.push_back(rate);
      if (prev >= 0.0) c_ok = c_ok && rate >= prev - 1e-9;
      prev = rate;
    }
  }

  // (d) untrusted dark counts at eta = 0.1: solves or records a relaxation
  bool d_ok = true;
  std::string d_note;
  {
    keyrate::ProtocolConfig cfg = config(1.0, 0.1, pd, 2, 2);
    cfg.channel.trusted_dark = false;
    try {
      keyrate::Instance inst = keyrate::prepare_instance(cfg);
      auto pa = keyrate::pa_terms(inst);
      for (const auto& t : pa) {
        g_all_bounds.push_back(t.bounds);
        if (t.bounds.relaxed && t.bounds.radius <= 0.0) d_ok = false;
      }
      int relaxed = 0;
      for (const auto& t : pa) relaxed += t.bounds.relaxed;
      d_note = relaxed > 0 ? "relaxed with recorded radius" : "solved without relaxation";
    } catch (const std::exception& e) {
      d_ok = false;
      d_note = std::string("unhandled: ") + e.what();
    }
  }

  char buf[300];
  std::snprintf(buf, sizeof buf,
                "(a) rate grows with kappa: %s; (b) N_A=2 >= N_A=1, gain at eta=1 kappa=0.5 "
                "%.3e: %s; (c) trusted-loss sweep non-decreasing: %s; (d) untrusted dark counts "
                "at eta=0.1 %s: %s",
                a_ok ? "ok" : "FAILS", b_gain, b_ok ? "ok" : "FAILS", c_ok ? "ok" : "FAILS",
                d_note.c_str(), d_ok ? "ok" : "FAILS");
  detail = buf;
  return a_ok && b_ok && c_ok && d_ok;
}

// ---------------------------------------------------------------- criterion 9
bool criterion9(std::string& detail) {
  struct Point {
    double kappa, alpha_sq, eta, p_d;
  };
  double worst = 0.0;
  for (const Point& pt :
       {Point{1.0, 0.2, 0.5, 0.0}, Point{0.5, 0.3, 0.8, 1e-3}, Point{0.3, 0.15, 0.25, 8.5e-7},
        Point{1.0, 0.4, 1.0, 1e-4}, Point{0.77, 0.1, 0.1, 8.5e-7}}) {
    source::SignalSettings s;
    s.kappa = pt.kappa;
    s.alpha = std::sqrt(pt.alpha_sq);
    simulate::ChannelModel ch;
    ch.eta = pt.eta;
    ch.p_d = pt.p_d;
    int n_max = source::poisson_truncation(s, 1e-13);
    povm::PovmSet p = povm::dark_count_postprocess(povm::build_ideal_povm(s, n_max), pt.p_d);
    simulate::Totals t = simulate::total_statistics(s, ch, p.labels);
    Eigen::MatrixXd fock_sum = Eigen::MatrixXd::Zero(4, povm::kNumOutcomes);
    for (int n = 0; n <= n_max; ++n)
      fock_sum += source::poisson_weight(n, s) * simulate::conditional_probs(n, p, ch, s);
    worst = std::max(worst, (t.table - fock_sum).cwiseAbs().maxCoeff());
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max closed-form vs Fock-sum deviation %.3e (tol 2e-12)", worst);
  detail = buf;
  return worst < 2e-12;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  std::vector<Criterion> criteria = {
      {1, "dark-count closed-form reproduction", criterion1},
      {2, "subspace-weight bound soundness", criterion2},
      {3, "POVM/squashing integrity", criterion3},
      {4, "objective and gradient correctness", criterion4},
      {5, "analytic optimizer anchor", criterion5},
      {6, "tagging consistency", criterion6},
      {7, "certified bracketing", criterion7},
      {8, "paper-trend suite", criterion8},
      {9, "simulation oracle agreement", criterion9},
  };

  // criterion 7 audits every instance solved in this process; when it is
  // requested alone, run the solve-bearing criteria first to populate them
  if (only == 7) {
    std::string scratch;
    criterion5(scratch);
    criterion6(scratch);
  }

  int failures = 0;
  for (auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d (%s): %s  [%.1fs]  %s\n", c.id, c.title.c_str(),
                pass ? "PASS" : "FAIL", dt, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures;
}
