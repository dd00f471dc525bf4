#include "ubb84/scan.hpp"

#include <atomic>
#include <sstream>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

namespace ubb84::cli {

bool ScanResult::all_ok() const {
  for (const auto& p : points)
    if (!p.ok()) return false;
  return true;
}

namespace {

void solve_point(ScanPoint& pt, const RunConfig& cfg) {
  try {
    keyrate::ProtocolConfig pc = cfg.protocol_at(pt.kappa, pt.eta, pt.eta_det, pt.p_d);
    keyrate::Instance inst = keyrate::prepare_instance(pc);
    std::vector<keyrate::PaTerm> pa = keyrate::pa_terms(inst);
    pt.report = keyrate::optimize_intensity(pa, inst, cfg.alpha_grid);
    for (const auto& term : pa) pt.logs.push_back(term.log);
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
}

}  // namespace

ScanResult run_scan(const RunConfig& cfg) {
  cfg.validate();
  ScanResult res;
  int idx = 0;
  for (double k : cfg.kappa)
    for (double e : cfg.eta)
      for (double ed : cfg.eta_det)
        for (double pd : cfg.p_d) {
          ScanPoint pt;
          pt.index = idx++;
          pt.kappa = k;
          pt.eta = e;
          pt.eta_det = ed;
          pt.p_d = pd;
          res.points.push_back(std::move(pt));
        }

  int workers = std::min<int>(cfg.parallelism, int(res.points.size()));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= res.points.size()) return;
      solve_point(res.points[i], cfg);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  {
    std::ofstream csv(fs::path(cfg.output_dir) / "scan.csv");
    csv << keyrate::report_csv_header(cfg.n_a) << ",status\n";
    for (const auto& pt : res.points) {
      if (pt.ok()) {
        csv << keyrate::report_csv_row(pt.report) << ",ok\n";
      } else {
        csv << pt.kappa << "," << pt.eta << "," << pt.eta_det << "," << pt.p_d << ","
            << (cfg.trusted_dark ? 1 : 0) << "," << (cfg.trusted_det ? 1 : 0) << "," << cfg.n_a
            << "," << cfg.n_b << "," << cfg.f_ec;
        for (int c = 0; c < 7 + 5 * cfg.n_a; ++c) csv << ",nan";
        csv << ",error: " << pt.error << "\n";
      }
    }
  }

  // one two-column (eta, rate) file per kappa, rows ordered by eta
  {
    std::map<double, std::map<double, double>> by_kappa;
    for (const auto& pt : res.points)
      if (pt.ok()) by_kappa[pt.kappa][pt.eta] = pt.report.rate;
    for (const auto& [k, rows] : by_kappa) {
      std::ostringstream name;
      name.precision(6);
      name << "rate_vs_eta_kappa_" << k << ".dat";
      std::ofstream f(fs::path(cfg.output_dir) / name.str());
      f << "# eta rate_bits_per_cycle\n";
      f.precision(12);
      for (const auto& [eta, rate] : rows) f << eta << " " << rate << "\n";
    }
  }

  {
    std::ofstream jl(fs::path(cfg.output_dir) / "solves.jsonl");
    for (const auto& pt : res.points)
      for (const auto& log : pt.logs) jl << log.to_json() << "\n";
  }
  return res;
}

}  // namespace ubb84::cli
