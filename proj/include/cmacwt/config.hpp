// SPDX-License-Identifier: Apache-2.0
//
// Scenario files (JSON) and the built-in named scenarios.

#ifndef CMACWT_CONFIG_HPP
#define CMACWT_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmacwt/channel.hpp"
#include "cmacwt/scenario.hpp"

namespace cmacwt {

/// Configuration failure; field() is the JSON path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& msg) : Error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline std::vector<std::string> builtin_scenario_names() { return {"paper-fig3", "paper-fig45", "paper-fig6", "tiny"}; }

namespace detail {

inline CorrelationSet exp_set(int nr, int ne, int nt1, int nt2, double phi_h, std::array<double, 2> psi_h, double phi_g,
                              std::array<double, 2> psi_g, const std::vector<int>& npr, const std::vector<double>& phi_f,
                              const std::vector<std::array<double, 2>>& psi_f) {
  CorrelationSet c;
  c.phi_h = exp_correlation(phi_h, nr);
  c.phi_g = exp_correlation(phi_g, ne);
  c.psi_h = {exp_correlation(psi_h[0], nt1), exp_correlation(psi_h[1], nt2)};
  c.psi_g = {exp_correlation(psi_g[0], nt1), exp_correlation(psi_g[1], nt2)};
  for (std::size_t j = 0; j < phi_f.size(); ++j) {
    c.phi_f.push_back(exp_correlation(phi_f[j], npr[j]));
    c.psi_f.push_back({exp_correlation(psi_f[j][0], nt1), exp_correlation(psi_f[j][1], nt2)});
  }
  return c;
}

}  // namespace detail

inline Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "paper-fig3") {
    s.n_pr = {2};
    s.corr = detail::exp_set(2, 2, 2, 2, 0.3, {0.95, 0.85}, 0.6, {0.4, 0.95}, s.n_pr, {0.5}, {{0.3, 0.5}});
    s.beta = {2.0, 2.0};
    s.gamma = {0.2};
    s.sigma2_r = s.sigma2_e = 0.1;
    s.solver.ccp.epsilon = 0.002;
  } else if (name == "paper-fig45") {
    s.mod1 = s.mod2 = ConstellationKind::QPSK;
    s.n_pr = {2};
    s.corr = detail::exp_set(2, 2, 2, 2, 0.25, {0.95, 0.9}, 0.75, {0.5, 0.3}, s.n_pr, {0.5}, {{0.8, 0.5}});
    s.beta = {2.0, 2.0};
    s.gamma = {0.2};
    s.sigma2_r = s.sigma2_e = 0.02;  // 20 dB
    s.solver.ccp.epsilon = 0.002;
  } else if (name == "paper-fig6") {
    s.n_pr = {2, 2};
    s.corr = detail::exp_set(2, 2, 2, 2, 0.3, {0.9, 0.95}, 0.6, {0.7, 0.2}, s.n_pr, {0.4, 0.5}, {{0.6, 0.4}, {0.3, 0.5}});
    s.beta = {2.0, 2.0};
    s.gamma = {0.2, 0.2};
    s.sigma2_r = s.sigma2_e = 0.2;  // 10 dB
    s.solver.ccp.epsilon = 0.002;
  } else if (name == "tiny") {
    s.nt1 = s.nt2 = 1;
    s.n_pr = {2};
    s.corr = detail::exp_set(2, 2, 1, 1, 0.3, {0.0, 0.0}, 0.6, {0.0, 0.0}, s.n_pr, {0.5}, {{0.0, 0.0}});
    s.beta = {0.5, 0.5};
    s.gamma = {0.6};
    s.sigma2_r = s.sigma2_e = 0.1;
    s.solver.ccp.epsilon = 1e-4;
    s.solver.bnb.max_iterations = 60;
  } else {
    throw ConfigError("name", "unknown built-in scenario '" + name + "'");
  }
  return s;
}

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key, "missing required field");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline std::vector<double> as_numbers(const json& j, const std::string& path, std::size_t expect = 0) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  if (expect && j.size() != expect) throw ConfigError(path, "expected " + std::to_string(expect) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// rho for the exponential model, or {"real": [[..]], "imag": [[..]]} row-major.
inline CMatrix parse_correlation(const json& j, int n, const std::string& path) {
  if (j.is_number()) {
    const double rho = as_number(j, path);
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError(path, "correlation coefficient must lie in [0, 1)");
    return exp_correlation(rho, n);
  }
  if (!j.is_object()) throw ConfigError(path, "expected a coefficient or a {real, imag} matrix");
  const json& re = require(j, "real", path + ".");
  if (!re.is_array() || static_cast<int>(re.size()) != n) throw ConfigError(path + ".real", "expected " + std::to_string(n) + " rows");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto row = as_numbers(re[r], path + ".real[" + std::to_string(r) + "]", n);
    for (int c = 0; c < n; ++c) m(r, c) = row[c];
  }
  if (j.contains("imag")) {
    const json& im = j.at("imag");
    if (!im.is_array() || static_cast<int>(im.size()) != n) throw ConfigError(path + ".imag", "expected " + std::to_string(n) + " rows");
    for (int r = 0; r < n; ++r) {
      const auto row = as_numbers(im[r], path + ".imag[" + std::to_string(r) + "]", n);
      for (int c = 0; c < n; ++c) m(r, c) += Complex(0, row[c]);
    }
  }
  if (hermitian_defect(m) > 1e-12) throw ConfigError(path, "matrix is not Hermitian");
  if (hermitian_eigenvalues(m)(0) < -1e-10) throw ConfigError(path, "matrix is not positive semidefinite");
  return m;
}

template <class T, class F>
void optional_field(const json& sec, const std::string& key, const std::string& path, T& target, F conv) {
  if (sec.contains(key)) target = conv(sec.at(key), path + key);
}

inline void parse_solver(const json& j, SolverSettings& s) {
  auto num = [](const json& v, const std::string& p) { return as_number(v, p); };
  auto integer = [](const json& v, const std::string& p) { return as_int(v, p); };
  auto section = [&j](const char* name) -> const json* {
    if (!j.contains(name)) return nullptr;
    if (!j.at(name).is_object()) throw ConfigError(name, "expected an object");
    return &j.at(name);
  };
  if (const json* sec = section("subsolver")) {
    optional_field(*sec, "t0", "subsolver.", s.subsolver.t0, num);
    optional_field(*sec, "mu", "subsolver.", s.subsolver.mu, num);
    optional_field(*sec, "gap_tol", "subsolver.", s.subsolver.gap_tol, num);
    optional_field(*sec, "ls_alpha", "subsolver.", s.subsolver.ls_alpha, num);
    optional_field(*sec, "ls_beta", "subsolver.", s.subsolver.ls_beta, num);
    optional_field(*sec, "max_newton", "subsolver.", s.subsolver.max_newton, integer);
    optional_field(*sec, "newton_tol", "subsolver.", s.subsolver.newton_tol, num);
    if (!(s.subsolver.t0 > 0 && s.subsolver.mu > 1 && s.subsolver.gap_tol > 0 && s.subsolver.max_newton >= 1))
      throw ConfigError("subsolver", "requires t0 > 0, mu > 1, gap_tol > 0, max_newton >= 1");
  }
  if (const json* sec = section("ccp")) {
    optional_field(*sec, "epsilon", "ccp.", s.ccp.epsilon, num);
    optional_field(*sec, "max_iterations", "ccp.", s.ccp.max_iterations, integer);
    optional_field(*sec, "starts", "ccp.", s.ccp.starts, integer);
    if (!(s.ccp.epsilon > 0)) throw ConfigError("ccp.epsilon", "must be positive");
    if (s.ccp.max_iterations < 1) throw ConfigError("ccp.max_iterations", "must be >= 1");
    if (s.ccp.starts < 1) throw ConfigError("ccp.starts", "must be >= 1");
  }
  if (const json* sec = section("bnb")) {
    optional_field(*sec, "max_iterations", "bnb.", s.bnb.max_iterations, integer);
    optional_field(*sec, "gap_tol", "bnb.", s.bnb.gap_tol, num);
    if (s.bnb.max_iterations < 1) throw ConfigError("bnb.max_iterations", "must be >= 1");
    if (!(s.bnb.gap_tol >= 0)) throw ConfigError("bnb.gap_tol", "must be non-negative");
  }
  if (const json* sec = section("randomization")) {
    optional_field(*sec, "draws", "randomization.", s.randomization.draws, integer);
    if (s.randomization.draws < 1) throw ConfigError("randomization.draws", "must be >= 1");
  }
  if (const json* sec = section("baseline")) {
    optional_field(*sec, "samples", "baseline.", s.baseline.samples, integer);
    optional_field(*sec, "ccp_epsilon", "baseline.", s.baseline.ccp_epsilon, num);
    optional_field(*sec, "max_iterations", "baseline.", s.baseline.max_iterations, integer);
    optional_field(*sec, "power_scale", "baseline.", s.baseline.power_scale, num);
    if (s.baseline.samples < 1) throw ConfigError("baseline.samples", "must be >= 1");
    if (!(s.baseline.ccp_epsilon > 0)) throw ConfigError("baseline.ccp_epsilon", "must be positive");
    if (!(s.baseline.power_scale >= 0)) throw ConfigError("baseline.power_scale", "must be non-negative");
  }
  if (const json* sec = section("mi")) {
    optional_field(*sec, "channel_samples", "mi.", s.mi.channel_samples, integer);
    optional_field(*sec, "noise_samples", "mi.", s.mi.noise_samples, integer);
    if (s.mi.channel_samples < 1 || s.mi.noise_samples < 1) throw ConfigError("mi", "sample counts must be >= 1");
  }
}

}  // namespace detail

/// Parses a scenario document. An optional "base" names a built-in scenario
/// whose values are used for every omitted field.
inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::as_int;
  using detail::as_number;
  using detail::as_numbers;
  using detail::require;
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  const bool has_base = j.contains("base");
  Scenario s;
  if (has_base) {
    if (!j.at("base").is_string()) throw ConfigError("base", "expected a built-in scenario name");
    try {
      s = builtin_scenario(j.at("base").get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("base", e.what());
    }
  }
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("name", "expected a string");
    s.name = j.at("name").get<std::string>();
  }
  const bool need = !has_base;
  auto present = [&](const std::string& key) {
    if (need && !j.contains(key)) throw ConfigError(key, "missing required field");
    return j.contains(key);
  };

  if (present("antennas")) {
    const auto& a = j.at("antennas");
    const auto nt = as_numbers(require(a, "nt", "antennas."), "antennas.nt", 2);
    s.nt1 = static_cast<int>(nt[0]);
    s.nt2 = static_cast<int>(nt[1]);
    if (s.nt1 < 1 || s.nt2 < 1 || nt[0] != s.nt1 || nt[1] != s.nt2) throw ConfigError("antennas.nt", "entries must be positive integers");
    s.nr = as_int(require(a, "nr", "antennas."), "antennas.nr");
    s.ne = as_int(require(a, "ne", "antennas."), "antennas.ne");
    if (s.nr < 1) throw ConfigError("antennas.nr", "must be positive");
    if (s.ne < 1) throw ConfigError("antennas.ne", "must be positive");
    s.n_pr.clear();
    for (double v : as_numbers(require(a, "npr", "antennas."), "antennas.npr")) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("antennas.npr", "entries must be positive integers");
      s.n_pr.push_back(static_cast<int>(v));
    }
  }
  if (present("modulation")) {
    const auto& m = j.at("modulation");
    if (!m.is_array() || m.size() != 2) throw ConfigError("modulation", "expected two constellation names");
    for (int i = 0; i < 2; ++i) {
      if (!m[i].is_string()) throw ConfigError("modulation[" + std::to_string(i) + "]", "expected a string");
      try {
        (i == 0 ? s.mod1 : s.mod2) = parse_constellation_kind(m[i].get<std::string>());
      } catch (const Error& e) {
        throw ConfigError("modulation[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (present("correlation")) {
    const auto& c = j.at("correlation");
    const std::string p = "correlation.";
    CorrelationSet cs;
    cs.phi_h = detail::parse_correlation(require(c, "phi_h", p), s.nr, p + "phi_h");
    cs.phi_g = detail::parse_correlation(require(c, "phi_g", p), s.ne, p + "phi_g");
    const int nt[2] = {s.nt1, s.nt2};
    for (const char* key : {"psi_h", "psi_g"}) {
      const auto& arr = require(c, key, p);
      if (!arr.is_array() || arr.size() != 2) throw ConfigError(p + key, "expected one entry per transmitter");
      auto& dst = std::string(key) == "psi_h" ? cs.psi_h : cs.psi_g;
      for (int i = 0; i < 2; ++i) dst[i] = detail::parse_correlation(arr[i], nt[i], p + key + "[" + std::to_string(i) + "]");
    }
    const auto& pf = require(c, "phi_f", p);
    const auto& sf = require(c, "psi_f", p);
    if (!pf.is_array() || pf.size() != s.n_pr.size()) throw ConfigError(p + "phi_f", "expected one entry per primary receiver");
    if (!sf.is_array() || sf.size() != s.n_pr.size()) throw ConfigError(p + "psi_f", "expected one entry per primary receiver");
    for (std::size_t jj = 0; jj < s.n_pr.size(); ++jj) {
      const std::string idx = "[" + std::to_string(jj) + "]";
      cs.phi_f.push_back(detail::parse_correlation(pf[jj], s.n_pr[jj], p + "phi_f" + idx));
      if (!sf[jj].is_array() || sf[jj].size() != 2) throw ConfigError(p + "psi_f" + idx, "expected one entry per transmitter");
      cs.psi_f.push_back({detail::parse_correlation(sf[jj][0], nt[0], p + "psi_f" + idx + "[0]"),
                          detail::parse_correlation(sf[jj][1], nt[1], p + "psi_f" + idx + "[1]")});
    }
    s.corr = std::move(cs);
  }
  if (present("beta")) {
    const auto b = as_numbers(j.at("beta"), "beta", 2);
    if (!(b[0] > 0 && b[1] > 0)) throw ConfigError("beta", "budgets must be positive");
    s.beta = {b[0], b[1]};
  }
  if (present("gamma")) {
    s.gamma = as_numbers(j.at("gamma"), "gamma");
    for (double g : s.gamma)
      if (!(g > 0)) throw ConfigError("gamma", "thresholds must be positive");
  }
  if (j.contains("sigma2")) {
    s.sigma2_r = s.sigma2_e = as_number(j.at("sigma2"), "sigma2");
    if (!(s.sigma2_r > 0)) throw ConfigError("sigma2", "must be positive");
  } else if (j.contains("sigma2_r") || j.contains("sigma2_e")) {
    s.sigma2_r = as_number(require(j, "sigma2_r", ""), "sigma2_r");
    s.sigma2_e = as_number(require(j, "sigma2_e", ""), "sigma2_e");
    if (!(s.sigma2_r > 0)) throw ConfigError("sigma2_r", "must be positive");
    if (!(s.sigma2_e > 0)) throw ConfigError("sigma2_e", "must be positive");
  } else if (need) {
    throw ConfigError("sigma2", "missing required field");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("limits")) {
    const auto& l = j.at("limits");
    if (l.contains("max_vectors")) s.max_vectors = as_int(l.at("max_vectors"), "limits.max_vectors");
    if (l.contains("max_quadratics_mib"))
      s.max_quadratics_bytes = static_cast<std::int64_t>(as_number(l.at("max_quadratics_mib"), "limits.max_quadratics_mib") * (1 << 20));
  }
  detail::parse_solver(j, s.solver);
  if (static_cast<int>(s.n_pr.size()) != s.n_primary()) throw ConfigError("gamma", "expected one threshold per primary receiver");
  if (std::string e = s.check(); !e.empty()) throw ConfigError("<scenario>", e);
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

/// Built-in name or path to a scenario file.
inline Scenario load_scenario(const std::string& name_or_path) {
  for (const auto& n : builtin_scenario_names())
    if (n == name_or_path) return builtin_scenario(n);
  return load_scenario_file(name_or_path);
}

/// Noise variance giving SNR = beta / sigma2 (beta of transmitter 1).
inline double sigma2_for_snr_db(const Scenario& s, double snr_db) { return s.beta[0] / std::pow(10.0, snr_db / 10.0); }

}  // namespace cmacwt

#endif  // CMACWT_CONFIG_HPP
