#include "ubb84/config.hpp"

#include <fstream>
#include <sstream>

namespace ubb84::cli {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::runtime_error("config: bad numeric value '" + s + "' for key " + key);
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::runtime_error("config: bad boolean value '" + s + "' for key " + key);
}

std::vector<double> to_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(to_double(tok, key));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error("config: " + what);
  };
  require(!kappa.empty(), "kappa list is empty");
  require(!eta.empty(), "eta list is empty");
  require(!eta_det.empty(), "eta_det list is empty");
  require(!p_d.empty(), "p_d list is empty");
  for (double k : kappa) require(k > 0.0 && k <= 1.0, "kappa outside (0,1]");
  for (double e : eta) require(e > 0.0 && e <= 1.0, "eta outside (0,1]");
  for (double e : eta_det) require(e > 0.0 && e <= 1.0, "eta_det outside (0,1]");
  for (double p : p_d) require(p >= 0.0 && p < 1.0, "p_d outside [0,1)");
  require(n_a >= 1, "n_a must be at least 1");
  require(n_a <= n_b, "n_a must not exceed n_b");
  require(f_ec >= 1.0, "f_ec below 1");
  require(alpha_grid.points >= 2, "alpha grid needs at least 2 points");
  require(alpha_grid.lo > 0.0 && alpha_grid.hi >= alpha_grid.lo, "bad alpha grid range");
  require(parallelism >= 1, "parallelism must be positive");
  require(fw_max_iters >= 1, "fw_max_iters must be positive");
  require(fw_gap_tol > 0.0, "fw_gap_tol must be positive");
}

keyrate::ProtocolConfig RunConfig::protocol_at(double kappa_v, double eta_v, double eta_det_v,
                                               double p_d_v) const {
  keyrate::ProtocolConfig cfg;
  cfg.kappa = kappa_v;
  cfg.alpha_sq = alpha_grid.lo;
  cfg.channel.eta = eta_v;
  cfg.channel.eta_det = eta_det_v;
  cfg.channel.p_d = p_d_v;
  cfg.channel.trusted_dark = trusted_dark;
  cfg.channel.trusted_det = trusted_det;
  cfg.n_a = n_a;
  cfg.n_b = n_b;
  cfg.f_ec = f_ec;
  cfg.gz_use_postprocessed = gz_use_postprocessed;
  cfg.fw.gap_tol_bits = fw_gap_tol;
  cfg.fw.max_iters = fw_max_iters;
  cfg.fw.line_search_tol = fw_line_search_tol;
  return cfg;
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' on line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "kappa") cfg.kappa = to_list(value, key);
    else if (key == "eta") cfg.eta = to_list(value, key);
    else if (key == "eta_det") cfg.eta_det = to_list(value, key);
    else if (key == "p_d") cfg.p_d = to_list(value, key);
    else if (key == "trusted_dark_counts") cfg.trusted_dark = to_bool(value, key);
    else if (key == "trusted_detector") cfg.trusted_det = to_bool(value, key);
    else if (key == "n_a") cfg.n_a = int(to_double(value, key));
    else if (key == "n_b") cfg.n_b = int(to_double(value, key));
    else if (key == "f_ec") cfg.f_ec = to_double(value, key);
    else if (key == "gz_use_postprocessed") cfg.gz_use_postprocessed = to_bool(value, key);
    else if (key == "alpha_grid") {
      auto parts = split(value, ' ');
      std::vector<std::string> tok;
      for (auto& p : parts)
        if (!p.empty()) tok.push_back(p);
      if (tok.size() != 4 || (tok[0] != "log" && tok[0] != "linear"))
        throw std::runtime_error("config: alpha_grid wants '(log|linear) <lo> <hi> <points>'");
      cfg.alpha_grid.log_spaced = tok[0] == "log";
      cfg.alpha_grid.lo = to_double(tok[1], key);
      cfg.alpha_grid.hi = to_double(tok[2], key);
      cfg.alpha_grid.points = int(to_double(tok[3], key));
    } else if (key == "fw_gap_tol") cfg.fw_gap_tol = to_double(value, key);
    else if (key == "fw_max_iters") cfg.fw_max_iters = int(to_double(value, key));
    else if (key == "fw_line_search_tol") cfg.fw_line_search_tol = to_double(value, key);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "parallelism") cfg.parallelism = int(to_double(value, key));
    else if (key == "seed") cfg.seed = (unsigned long long)(to_double(value, key));
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  return parse_config(f);
}

}  // namespace ubb84::cli
