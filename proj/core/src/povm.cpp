#include "ubb84/povm.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

namespace ubb84::povm {

namespace {

constexpr unsigned kMiddleBits = 0b0110u;

bool merged_mask(unsigned mask) { return (mask & kMiddleBits) == 0; }

// Canonical outcome order: the four merged outside-only patterns, then the
// twelve middle-containing patterns for each basis.
std::vector<ClickPattern> canonical_labels() {
  std::vector<ClickPattern> labels;
  for (unsigned mask : {0u, 1u, 8u, 9u}) labels.push_back({-1, mask});
  for (int basis = 0; basis < 2; ++basis)
    for (unsigned mask = 0; mask < 16; ++mask)
      if (!merged_mask(mask)) labels.push_back({basis, mask});
  return labels;
}

// Creation coefficients (on a1^dag, a2^dag) of the four effective modes for
// a fixed basis phase phi_B.
std::array<std::pair<Complex, Complex>, 4> mode_coefficients(double xi, double phi_b) {
  Complex ph = std::exp(Complex(0.0, -phi_b));
  return {{
      {std::sqrt(xi), 0.0},                                          // t1
      {std::sqrt((1.0 - xi) / 2.0), -ph * std::sqrt(xi / 2.0)},      // D2
      {std::sqrt((1.0 - xi) / 2.0), +ph * std::sqrt(xi / 2.0)},      // D5
      {0.0, std::sqrt(1.0 - xi)},                                    // t3
  }};
}

// Enumerate compositions of n into k parts, each >= 1.
void for_each_composition(int n, int k, std::vector<int>& parts,
                          const std::function<void(const std::vector<int>&)>& fn, int pos = 0) {
  if (pos == k - 1) {
    parts[pos] = n;
    if (n >= 1) fn(parts);
    return;
  }
  for (int v = 1; v <= n - (k - 1 - pos); ++v) {
    parts[pos] = v;
    for_each_composition(n - v, k, parts, fn, pos + 1);
  }
}

}  // namespace

int PovmSet::index_of(int basis, unsigned mask) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].basis == basis && labels[i].mask == mask) return int(i);
  throw std::out_of_range("no such outcome label");
}

SectorOperator PovmSet::sum() const {
  SectorOperator s = SectorOperator::zeros(n_cut);
  for (const auto& e : elements) s += e;
  return s;
}

double PovmSet::completeness_defect() const {
  return sum().max_abs_diff(SectorOperator::identity(n_cut));
}

double PovmSet::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : elements) m = std::min(m, e.min_eigenvalue());
  return m;
}

std::vector<int> PovmSet::kept_indices(int basis) const {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].basis == basis && labels[i].has_middle()) out.push_back(int(i));
  return out;
}

std::vector<int> PovmSet::cross_click_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i].is_cross_click()) out.push_back(int(i));
  return out;
}

PostProcessMap PostProcessMap::build(double p_d, const std::array<double, 2>& p_basis) {
  if (!(p_d >= 0.0 && p_d < 1.0)) throw std::domain_error("dark-count probability must be in [0,1)");
  PostProcessMap m;
  m.p_d = p_d;
  // The two outside bins each merge two physical detection windows.
  double q_out = 1.0 - (1.0 - p_d) * (1.0 - p_d);
  m.flip = {q_out, p_d, p_d, q_out};

  auto labels = canonical_labels();
  m.matrix = Eigen::MatrixXd::Zero(kNumOutcomes, kNumOutcomes);
  // probability of observing pattern 'to' given real clicks 'from'
  auto transition = [&](unsigned to, unsigned from) {
    if ((to & from) != from) return 0.0;
    double p = 1.0;
    for (int b = 0; b < 4; ++b) {
      unsigned bit = 1u << b;
      if (from & bit) continue;                 // real clicks stay clicked
      if (to & bit) p *= m.flip[b];             // dark count added
      else p *= 1.0 - m.flip[b];                // bin stays silent
    }
    return p;
  };
  for (int i = 0; i < kNumOutcomes; ++i) {
    for (int k = 0; k < kNumOutcomes; ++k) {
      const auto& in = labels[i];
      const auto& out = labels[k];
      if (in.basis == -1) {
        // A merged element splits across the bases with weight p(phi_B)
        // when dark counts add a middle click.
        if (out.basis == -1) m.matrix(k, i) = transition(out.mask, in.mask);
        else m.matrix(k, i) = p_basis[out.basis] * transition(out.mask, in.mask);
      } else {
        if (out.basis == in.basis) m.matrix(k, i) = transition(out.mask, in.mask);
      }
    }
  }
  return m;
}

std::vector<std::pair<ClickPattern, SectorOperator>> build_per_basis_povm(
    const source::SignalSettings& s, int basis, int n_cut) {
  double xi = s.xi();
  if (!(xi >= 0.5 && xi < 1.0)) throw std::domain_error("xi must lie in [1/2, 1)");
  double phi_b = basis * std::numbers::pi / 2.0;
  double pb = s.p_basis[basis];
  auto modes = mode_coefficients(xi, phi_b);
  fock::FockBasis fb(n_cut);

  std::vector<std::pair<ClickPattern, SectorOperator>> out;
  for (unsigned mask = 0; mask < 16; ++mask) {
    SectorOperator el = SectorOperator::zeros(n_cut);
    if (mask == 0) {
      el.blocks[0](0, 0) = pb;
    } else {
      std::vector<int> bins;
      for (int b = 0; b < 4; ++b)
        if (mask & (1u << b)) bins.push_back(b);
      std::vector<std::pair<Complex, Complex>> used;
      for (int b : bins) used.push_back(modes[b]);
      int k = int(bins.size());
      for (int n = k; n <= n_cut; ++n) {
        Mat& block = el.blocks[n];
        int off = fb.sector_offset(n);
        std::vector<int> parts(k);
        for_each_composition(n, k, parts, [&](const std::vector<int>& p) {
          fock::Vec beta = fock::multimode_monomial_state(used, p, fb);
          Eigen::VectorXcd seg = beta.segment(off, n + 1);
          block.noalias() += pb * seg * seg.adjoint();
        });
      }
    }
    out.push_back({ClickPattern{basis, mask}, std::move(el)});
  }
  return out;
}

PovmSet build_ideal_povm(const source::SignalSettings& s, int n_cut) {
  PovmSet set;
  set.labels = canonical_labels();
  set.xi = s.xi();
  set.p_basis = s.p_basis;
  set.n_cut = n_cut;
  set.elements.assign(kNumOutcomes, SectorOperator::zeros(n_cut));

  for (int basis = 0; basis < 2; ++basis) {
    auto raw = build_per_basis_povm(s, basis, n_cut);
    for (auto& [label, el] : raw) {
      int idx = merged_mask(label.mask) ? set.index_of(-1, label.mask)
                                        : set.index_of(basis, label.mask);
      set.elements[idx] += el;
    }
  }
  return set;
}

PovmSet dark_count_postprocess(const PovmSet& povm, double p_d) {
  PostProcessMap map = PostProcessMap::build(p_d, povm.p_basis);
  PovmSet out = povm;
  out.p_d = p_d;
  for (int k = 0; k < kNumOutcomes; ++k) {
    SectorOperator acc = SectorOperator::zeros(povm.n_cut);
    for (int i = 0; i < kNumOutcomes; ++i) {
      double w = map.matrix(k, i);
      if (w == 0.0) continue;
      SectorOperator term = povm.elements[i];
      term *= w;
      acc += term;
    }
    out.elements[k] = std::move(acc);
  }
  return out;
}

PovmSet trusted_efficiency_transform(const PovmSet& povm, double eta_det) {
  if (!(eta_det > 0.0 && eta_det <= 1.0))
    throw std::domain_error("detector transmissivity must be in (0,1]");
  PovmSet out = povm;
  out.eta_det = eta_det;
  if (eta_det == 1.0) return out;
  for (auto& e : out.elements) e = fock::loss_adjoint(e, eta_det);
  return out;
}

CoarseElements coarse_elements(const PovmSet& povm) {
  CoarseElements c{SectorOperator::zeros(povm.n_cut), SectorOperator::zeros(povm.n_cut),
                   SectorOperator::zeros(povm.n_cut), SectorOperator::zeros(povm.n_cut)};
  for (int i = 0; i < kNumOutcomes; ++i) {
    const auto& l = povm.labels[i];
    if (l.mask == 0) c.no_click += povm.elements[i];
    else if (!l.has_middle()) c.outside_only += povm.elements[i];
    else if (!l.has_outside()) c.inside_only += povm.elements[i];
  }
  c.cross_click = SectorOperator::identity(povm.n_cut);
  SectorOperator rest = c.no_click;
  rest += c.outside_only;
  rest += c.inside_only;
  rest *= -1.0;
  c.cross_click += rest;
  return c;
}

void dump_blocks(const PovmSet& povm, std::ostream& os) {
  os.precision(17);
  os << "outcomes " << kNumOutcomes << " n_cut " << povm.n_cut << " xi " << povm.xi
     << " p_d " << povm.p_d << " eta_det " << povm.eta_det << "\n";
  for (int k = 0; k < kNumOutcomes; ++k) {
    const auto& l = povm.labels[k];
    os << "element " << k << " basis " << l.basis << " mask " << l.mask << "\n";
    for (int n = 0; n <= povm.n_cut; ++n) {
      os << "sector " << n << "\n";
      const Mat& b = povm.elements[k].blocks[n];
      for (int r = 0; r <= n; ++r) {
        for (int cidx = 0; cidx <= n; ++cidx)
          os << b(r, cidx).real() << " " << b(r, cidx).imag() << (cidx == n ? "" : " ");
        os << "\n";
      }
    }
  }
}

}  // namespace ubb84::povm
