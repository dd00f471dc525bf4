#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ubb84/squash.hpp"

using namespace ubb84::squash;
using ubb84::fock::FockBasis;
using ubb84::fock::Mat;
using ubb84::povm::PovmSet;
using ubb84::povm::build_ideal_povm;
using ubb84::povm::coarse_elements;
using ubb84::povm::dark_count_postprocess;
using ubb84::source::SignalSettings;

namespace {
SignalSettings settings_xi(double xi) {
  SignalSettings s;
  s.kappa = 1.0 / xi - 1.0;
  return s;
}
}  // namespace

TEST_CASE("squashed dimensions") {
  PovmSet p = build_ideal_povm(settings_xi(0.5), 4);
  SquashedPovm s0 = squash_povm(p, 0);
  CHECK(s0.low_dim() == 1);
  CHECK(s0.total_dim() == 29);
  SquashedPovm s4 = squash_povm(p, 4);
  CHECK(s4.low_dim() == 15);
  CHECK(s4.total_dim() == 43);
  CHECK_THROWS_AS(squash_povm(p, 5), std::invalid_argument);
}

TEST_CASE("squashed low blocks are exact restrictions and complete") {
  PovmSet p = dark_count_postprocess(build_ideal_povm(settings_xi(0.77), 5), 1e-3);
  SquashedPovm s = squash_povm(p, 3);
  CHECK(s.completeness_defect() < 1e-12);
  FockBasis low(3);
  for (int k = 0; k < ubb84::povm::kNumOutcomes; ++k)
    for (int n = 0; n <= 3; ++n) {
      int off = low.sector_offset(n);
      CHECK((s.low_blocks[k].block(off, off, n + 1, n + 1) - p.elements[k].blocks[n])
                .cwiseAbs()
                .maxCoeff() < 1e-15);
    }
}

TEST_CASE("vacuum cross-click formula") {
  CHECK(p_cc_vacuum(0.0) == 0.0);
  CHECK(p_cc_vacuum(0.5) == doctest::Approx(0.703125).epsilon(1e-12));

  // numeric agreement at the paper's operating point
  double pd = 8.5e-7;
  auto c = coarse_elements(dark_count_postprocess(build_ideal_povm(settings_xi(0.77), 3), pd));
  CHECK(std::abs(c.cross_click.blocks[0](0, 0).real() - p_cc_vacuum(pd)) < 1e-15);
}

TEST_CASE("vacuum cross-click versus window-flip monte carlo") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double pd = 0.5;
  const int samples = 10000000;
  long long cc = 0;
  for (int s = 0; s < samples; ++s) {
    bool t1 = u(rng) < pd || u(rng) < pd;
    bool d2 = u(rng) < pd;
    bool d5 = u(rng) < pd;
    bool t3 = u(rng) < pd || u(rng) < pd;
    bool middle = d2 || d5;
    bool outside = t1 || t3;
    bool any = middle || outside;
    // cross-click: any event except no-click, inside-only, outside-only
    if (any && middle && outside) cc++;
  }
  double emp = double(cc) / samples;
  double p = p_cc_vacuum(pd);
  double se = std::sqrt(p * (1 - p) / samples);
  CHECK(std::abs(emp - p) < 3.5 * se);
}

TEST_CASE("p_min_cc: examples and numeric minima") {
  CHECK(p_min_cc(1, 0.5, 0.0) == doctest::Approx(0.0));
  CHECK(p_min_cc(2, 0.5, 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(p_min_cc(0, 0.5, 0.0), std::domain_error);

  for (double xi : {0.5, 0.77, 0.91}) {
    for (double pd : {0.0, 1e-3, 0.1}) {
      auto c = coarse_elements(dark_count_postprocess(build_ideal_povm(settings_xi(xi), 6), pd));
      for (int n = 1; n <= 6; ++n) {
        double numeric = c.cross_click.blocks[n].diagonal().real().minCoeff();
        CHECK(std::abs(numeric - p_min_cc(n, xi, pd)) < 1e-12);
      }
    }
  }
}

TEST_CASE("monotonicity chain p(cc|0) <= p_min(1) < p_min(2) < ...") {
  for (double xi : {0.5, 0.66, 0.91}) {
    for (double pd : {0.0, 1e-4, 0.2}) {
      double prev = p_cc_vacuum(pd);
      for (int n = 1; n <= 10; ++n) {
        double v = p_min_cc(n, xi, pd);
        CHECK(v >= prev);
        if (n >= 2) CHECK(v > p_min_cc(n - 1, xi, pd));
        prev = v;
      }
    }
  }
}

TEST_CASE("weight bound endpoints and tightness") {
  double xi = 0.77, pd = 1e-3;
  int nb = 3;
  auto at_vacuum = weight_lower_bound(p_cc_vacuum(pd), nb, xi, pd, BoundMode::trusted_analytic);
  CHECK(at_vacuum.value == doctest::Approx(1.0));
  auto at_full = weight_lower_bound(p_min_cc(nb + 1, xi, pd), nb, xi, pd, BoundMode::trusted_analytic);
  CHECK(at_full.value == doctest::Approx(0.0));

  for (double pcc : {0.001, 0.01, 0.1, 0.4}) {
    for (double xiv : {0.5, 0.77}) {
      for (double pdv : {1e-6, 1e-3, 0.05}) {
        for (int nbv : {1, 2, 4}) {
          double ta = weight_lower_bound(pcc, nbv, xiv, pdv, BoundMode::trusted_analytic).value;
          double df = weight_lower_bound(pcc, nbv, xiv, pdv, BoundMode::dark_count_free).value;
          CHECK(ta >= df - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("bound soundness on random states") {
  std::mt19937_64 rng(99);
  double xi = 0.77, pd = 1e-3;
  int n_cut = 8, nb = 3;
  auto c = coarse_elements(dark_count_postprocess(build_ideal_povm(settings_xi(xi), n_cut), pd));
  Mat pcc = c.cross_click.to_operator().entries;
  FockBasis b(n_cut);
  Mat proj = Mat::Zero(b.dim(), b.dim());
  for (int i = 0; i < b.sector_offset(nb + 1); ++i) proj(i, i) = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    Mat rho = oracles::random_density(b.dim(), rng);
    double pcc_val = (pcc * rho).trace().real();
    double true_weight = (proj * rho).trace().real();
    double bound = weight_lower_bound(pcc_val, nb, xi, pd, BoundMode::trusted_analytic).value;
    CHECK(true_weight >= bound - 1e-10);
    double bound_free = weight_lower_bound(pcc_val, nb, xi, pd, BoundMode::dark_count_free).value;
    CHECK(true_weight >= bound_free - 1e-10);
  }
}

TEST_CASE("numeric bound mode: matches analytic at unit efficiency, sound under loss") {
  double xi = 0.66, pd = 1e-3;
  int n_cut = 6, nb = 2;
  PovmSet p = dark_count_postprocess(build_ideal_povm(settings_xi(xi), n_cut), pd);
  auto c = coarse_elements(p);
  for (double pcc : {0.01, 0.2}) {
    double analytic = weight_lower_bound(pcc, nb, xi, pd, BoundMode::trusted_analytic).value;
    double numeric =
        weight_lower_bound(pcc, nb, xi, pd, BoundMode::numeric, &c.cross_click).value;
    CHECK(std::abs(analytic - numeric) < 1e-12);
  }

  double eta = 0.55;
  auto ct = coarse_elements(ubb84::povm::trusted_efficiency_transform(p, eta));
  Mat pcc_t = ct.cross_click.to_operator().entries;
  FockBasis b(n_cut);
  Mat proj = Mat::Zero(b.dim(), b.dim());
  for (int i = 0; i < b.sector_offset(nb + 1); ++i) proj(i, i) = 1.0;
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    Mat rho = oracles::random_density(b.dim(), rng);
    double pcc_val = (pcc_t * rho).trace().real();
    double true_weight = (proj * rho).trace().real();
    double bound =
        weight_lower_bound(pcc_val, nb, xi, pd, BoundMode::numeric, &ct.cross_click).value;
    CHECK(true_weight >= bound - 1e-10);
  }
}
