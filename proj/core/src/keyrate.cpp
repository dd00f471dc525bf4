#include "ubb84/keyrate.hpp"

#include <cmath>
#include <sstream>

namespace ubb84::keyrate {

void ProtocolConfig::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::domain_error("kappa must be in (0,1]");
  if (alpha_sq < 0.0) throw std::domain_error("negative intensity");
  if (n_a < 1 || n_b < 1) throw std::domain_error("N_A and N_B must be positive");
  if (n_a > n_b) throw std::domain_error("N_A must not exceed N_B");
  if (f_ec < 1.0) throw std::domain_error("f_EC below the Shannon limit");
  channel.validate();
}

Instance prepare_instance(const ProtocolConfig& cfg) {
  cfg.validate();
  Instance inst;
  inst.cfg = cfg;
  inst.settings.kappa = cfg.kappa;
  inst.settings.alpha = std::sqrt(cfg.alpha_sq);
  inst.settings.validate();

  int n_cut = cfg.n_b + 1;
  povm::PovmSet ideal = povm::build_ideal_povm(inst.settings, n_cut);
  povm::PovmSet processed = povm::dark_count_postprocess(ideal, cfg.channel.p_d);

  inst.physical = processed;
  inst.analysis_full = cfg.channel.trusted_dark ? processed : ideal;
  if (cfg.channel.trusted_det) {
    inst.physical = povm::trusted_efficiency_transform(inst.physical, cfg.channel.eta_det);
    inst.analysis_full =
        povm::trusted_efficiency_transform(inst.analysis_full, cfg.channel.eta_det);
  }
  inst.analysis = squash::squash_povm(inst.analysis_full, cfg.n_b);
  inst.analysis_cc = povm::coarse_elements(inst.analysis_full).cross_click;

  if (cfg.gz_use_postprocessed) {
    inst.gz = optimize::build_gz_maps(inst.analysis);
  } else {
    povm::PovmSet raw = ideal;
    if (cfg.channel.trusted_det)
      raw = povm::trusted_efficiency_transform(raw, cfg.channel.eta_det);
    inst.gz = optimize::build_gz_maps(squash::squash_povm(raw, cfg.n_b));
    inst.gz.from_postprocessed = false;
  }

  inst.stats = simulate::simulate_stats(inst.settings, cfg.channel, inst.physical, cfg.n_a,
                                        cfg.f_ec);
  return inst;
}

std::array<squash::SubspaceBound, 4> Instance::weight_bounds(int n_tilde) const {
  std::array<squash::SubspaceBound, 4> out;
  double xi = settings.xi();
  for (int x = 0; x < 4; ++x) {
    double pcc = stats.p_cc_cond[n_tilde][x];
    if (cfg.channel.trusted_det) {
      out[x] = squash::weight_lower_bound(pcc, cfg.n_b, xi, cfg.channel.p_d,
                                          squash::BoundMode::numeric, &analysis_cc);
    } else if (cfg.channel.trusted_dark) {
      out[x] = squash::weight_lower_bound(pcc, cfg.n_b, xi, cfg.channel.p_d,
                                          squash::BoundMode::trusted_analytic);
    } else {
      out[x] = squash::weight_lower_bound(pcc, cfg.n_b, xi, cfg.channel.p_d,
                                          squash::BoundMode::dark_count_free);
    }
  }
  return out;
}

optimize::ConstraintSet Instance::constraints(int n_tilde) const {
  return optimize::build_constraints(n_tilde, stats, analysis, weight_bounds(n_tilde), settings);
}

optimize::ReducedState Instance::simulated_state(int n_tilde) const {
  fock::FockBasis basis(cfg.n_b);
  fock::Mat rho = simulate::conditional_state(n_tilde, cfg.channel, settings, basis);
  return optimize::ReducedState::from_low(rho, cfg.n_b);
}

std::vector<PaTerm> pa_terms(const Instance& inst) {
  std::vector<PaTerm> out;
  for (int n = 1; n <= inst.cfg.n_a; ++n) {
    optimize::ConstraintSet cs = inst.constraints(n);
    PaTerm term;
    term.n_tilde = n;
    if (inst.cfg.channel.trusted_dark) {
      optimize::ReducedState start = inst.simulated_state(n);
      optimize::PaSolution sol = optimize::solve_pa_term(cs, inst.gz, inst.cfg.fw, &start);
      term.bounds = sol.bounds;
      term.log = std::move(sol.log);
    } else {
      try {
        optimize::PaSolution sol = optimize::solve_pa_term(cs, inst.gz, inst.cfg.fw);
        term.bounds = sol.bounds;
        term.log = std::move(sol.log);
      } catch (const optimize::InfeasibleError& e) {
        if (!inst.cfg.auto_relax) throw;
        double r = optimize::find_relaxation_radius(cs, inst.cfg.fw.sdp);
        optimize::ConstraintSet relaxed = optimize::relax_constraints(cs, r);
        optimize::PaSolution sol = optimize::solve_pa_term(relaxed, inst.gz, inst.cfg.fw);
        term.bounds = sol.bounds;
        term.log = std::move(sol.log);
        term.log.status = "relaxed r=" + std::to_string(r) + " after: " + e.what();
      }
    }
    out.push_back(std::move(term));
  }
  return out;
}

double KeyRateReport::reconstruct() const {
  double r = p_pass_vacuum - p_pass * delta_ec_bits;
  for (size_t i = 0; i < pa.size(); ++i) r += p_n[i] * pa[i].bounds.lower;
  return r;
}

KeyRateReport key_rate(double alpha_sq, const std::vector<PaTerm>& pa, const Instance& inst) {
  KeyRateReport rep;
  rep.cfg = inst.cfg;
  rep.alpha_sq = alpha_sq;
  rep.pa = pa;

  source::SignalSettings s = inst.settings;
  s.alpha = std::sqrt(alpha_sq);
  simulate::ObservedStats st =
      simulate::simulate_stats(s, inst.cfg.channel, inst.physical, 0, inst.cfg.f_ec);
  rep.p_pass = st.p_pass;
  rep.p_pass_vacuum = st.p_pass_vacuum;
  rep.delta_ec_bits = inst.cfg.f_ec * st.ec_entropy_bits;
  for (const auto& term : pa) rep.p_n.push_back(source::poisson_weight(term.n_tilde, s));
  rep.rate_raw = rep.reconstruct();
  rep.rate = std::max(rep.rate_raw, 0.0);
  if (pa.size() >= 2 && pa[0].bounds.lower > 0.0) {
    rep.r21 = pa[1].bounds.lower / pa[0].bounds.lower;
    rep.r21_upper = pa[1].bounds.upper / pa[0].bounds.upper;
  }
  return rep;
}

std::vector<double> IntensityGrid::values() const {
  if (points < 1 || lo <= 0.0 || hi < lo) throw std::domain_error("bad intensity grid");
  std::vector<double> v;
  for (int i = 0; i < points; ++i) {
    double f = points == 1 ? 0.0 : double(i) / (points - 1);
    v.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
  }
  return v;
}

KeyRateReport optimize_intensity(const std::vector<PaTerm>& pa, const Instance& inst,
                                 const IntensityGrid& grid) {
  std::vector<double> alphas = grid.values();
  int best = 0;
  double best_rate = -std::numeric_limits<double>::infinity();
  std::vector<double> rates(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) {
    rates[i] = key_rate(alphas[i], pa, inst).rate_raw;
    if (rates[i] > best_rate) {
      best_rate = rates[i];
      best = int(i);
    }
  }
  // one golden-section refinement around the best grid point
  double lo = alphas[std::max(best - 1, 0)];
  double hi = alphas[std::min(best + 1, int(alphas.size()) - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  auto val = [&](double asq) { return key_rate(asq, pa, inst).rate_raw; };
  double fc = val(c), fd = val(d);
  for (int k = 0; k < 40 && b - a > 1e-6 * hi; ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = val(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = val(d);
    }
  }
  double alpha_star = 0.5 * (a + b);
  if (val(alpha_star) < best_rate) alpha_star = alphas[best];
  return key_rate(alpha_star, pa, inst);
}

double r21_ratio(const std::vector<PaTerm>& pa, double* upper_ratio) {
  if (pa.size() < 2) throw std::invalid_argument("r21 needs PA terms up to n~ = 2");
  if (!(pa[0].bounds.lower > 0.0))
    throw std::runtime_error("r21 undefined: 1-photon PA lower bound is zero");
  if (upper_ratio != nullptr)
    *upper_ratio = pa[0].bounds.upper > 0.0 ? pa[1].bounds.upper / pa[0].bounds.upper
                                            : std::numeric_limits<double>::quiet_NaN();
  return pa[1].bounds.lower / pa[0].bounds.lower;
}

std::string report_csv_header(int n_a) {
  std::ostringstream os;
  os << "kappa,eta,eta_det,p_d,trusted_dark,trusted_det,N_A,N_B,f_EC,"
        "alpha_sq_opt,rate_bits_per_cycle,rate_raw_bits_per_cycle,p_pass,"
        "p_pass_vacuum,delta_ec_bits,r21";
  for (int n = 1; n <= n_a; ++n)
    os << ",pa" << n << "_lower_bits,pa" << n << "_upper_bits,pa" << n << "_gap_bits,pa" << n
       << "_violation,pa" << n << "_relax_radius";
  return os.str();
}

std::string report_csv_row(const KeyRateReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.cfg.kappa << "," << r.cfg.channel.eta << "," << r.cfg.channel.eta_det << ","
     << r.cfg.channel.p_d << "," << (r.cfg.channel.trusted_dark ? 1 : 0) << ","
     << (r.cfg.channel.trusted_det ? 1 : 0) << "," << r.cfg.n_a << "," << r.cfg.n_b << ","
     << r.cfg.f_ec << "," << r.alpha_sq << "," << r.rate << "," << r.rate_raw << "," << r.p_pass
     << "," << r.p_pass_vacuum << "," << r.delta_ec_bits << ",";
  if (std::isnan(r.r21)) os << "nan";
  else os << r.r21;
  for (const auto& t : r.pa)
    os << "," << t.bounds.lower << "," << t.bounds.upper << "," << t.bounds.gap << ","
       << t.bounds.max_violation << "," << t.bounds.radius;
  return os.str();
}

std::string report_text(const KeyRateReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "key rate lower bound: " << r.rate << " bits/cycle (raw " << r.rate_raw << ")\n"
     << "  kappa " << r.cfg.kappa << ", eta " << r.cfg.channel.eta << ", eta_det "
     << r.cfg.channel.eta_det << ", p_d " << r.cfg.channel.p_d << "\n"
     << "  trusted dark counts: " << (r.cfg.channel.trusted_dark ? "yes" : "no")
     << ", trusted detector loss: " << (r.cfg.channel.trusted_det ? "yes" : "no") << "\n"
     << "  N_A " << r.cfg.n_a << ", N_B " << r.cfg.n_b << ", f_EC " << r.cfg.f_ec << "\n"
     << "  |alpha|^2 " << r.alpha_sq << ", p_pass " << r.p_pass << ", vacuum term "
     << r.p_pass_vacuum << ", EC term " << r.p_pass * r.delta_ec_bits << "\n";
  for (const auto& t : r.pa)
    os << "  PA(" << t.n_tilde << "): [" << t.bounds.lower << ", " << t.bounds.upper
       << "] bits, gap " << t.bounds.gap << ", violation " << t.bounds.max_violation
       << ", radius " << t.bounds.radius << "\n";
  if (!std::isnan(r.r21)) os << "  r21 " << r.r21 << "\n";
  return os.str();
}

}  // namespace ubb84::keyrate
