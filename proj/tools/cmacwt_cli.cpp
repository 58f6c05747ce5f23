// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end: optimize | sweep | cdf-init | mi | baseline | validate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmacwt/cmacwt.hpp"

using namespace cmacwt;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json a = json::array(), b = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      a.push_back(m(r, c).real());
      b.push_back(m(r, c).imag());
    }
    re.push_back(a);
    im.push_back(b);
  }
  return {{"real", re}, {"imag", im}};
}

CMatrix matrix_from_json(const json& j, int n, const std::string& field) {
  if (!j.is_object() || !j.contains("real") || !j.contains("imag")) throw ConfigError(field, "expected {real, imag}");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      try {
        m(r, c) = Complex(j.at("real").at(r).at(c).get<double>(), j.at("imag").at(r).at(c).get<double>());
      } catch (const json::exception&) {
        throw ConfigError(field, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
      }
    }
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

double clamp_rate(double v) { return std::max(v, 0.0); }

std::vector<double> parse_grid(const std::string& spec) {
  double a, b, c;
  char s1, s2;
  std::istringstream in(spec);
  if (!(in >> a >> s1 >> b >> s2 >> c) || s1 != ':' || s2 != ':' || !(c > 0) || b < a)
    throw ConfigError("--snr-db", "expected start:stop:step with step > 0");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((b - a) / c + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(a + i * c);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Common {
  std::string config;
  long long seed = -1;

  Scenario load() const {
    Scenario s = load_scenario(config);
    if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
    return s;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "Scenario file or built-in name (paper-fig3, paper-fig45, paper-fig6, tiny)")->required();
  sub->add_option("--seed", c.seed, "Override the scenario seed");
}

double rate_of(const std::array<CMatrix, 2>& p, const LiftedQuadratics& q) {
  return secrecy_objective(vectorize(p[0], p[1]), q);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure precoder design for the cognitive multiple-access wiretap channel"};
  app.require_subcommand(1);

  Common c_opt, c_sweep, c_cdf, c_mi, c_base;

  auto* opt = app.add_subcommand("optimize", "Run the global search and write bnb_trace.csv and precoders.json");
  add_common(opt, c_opt);
  std::string out_dir = ".";
  int max_iters = -1;
  double gap_tol = -1, sigma2 = -1;
  bool timing = false;
  opt->add_option("--out-dir", out_dir, "Output directory");
  opt->add_option("--max-iters", max_iters, "Iteration cap");
  opt->add_option("--gap-tol", gap_tol, "Stop once U - L falls below this");
  opt->add_option("--sigma2", sigma2, "Override the noise variance");
  opt->add_flag("--timing", timing, "Record wall-clock milliseconds (output no longer byte-reproducible)");

  auto* sweep = app.add_subcommand("sweep", "Rate versus SNR for several methods (CSV on stdout or --out)");
  add_common(sweep, c_sweep);
  std::string grid = "-10:20:5", methods = "proposed,gaussian,none", sweep_out;
  int sweep_iters = -1;
  sweep->add_option("--snr-db", grid, "start:stop:step in dB, SNR = beta / sigma2");
  sweep->add_option("--methods", methods, "Comma list of proposed, gaussian, none");
  sweep->add_option("--max-iters", sweep_iters, "Iteration cap for the proposed method");
  sweep->add_option("--out", sweep_out, "CSV path");

  auto* cdf = app.add_subcommand("cdf-init", "Final CCP values from random starts on the initial box");
  add_common(cdf, c_cdf);
  int trials = 100;
  double cdf_eps = 0.002;
  std::string cdf_out;
  cdf->add_option("--trials", trials, "Number of random starts")->check(CLI::PositiveNumber);
  cdf->add_option("--epsilon", cdf_eps, "CCP stopping tolerance");
  cdf->add_option("--out", cdf_out, "CSV path");

  auto* mi = app.add_subcommand("mi", "Exact (Monte-Carlo) and approximate mutual information of a precoder file");
  add_common(mi, c_mi);
  std::string precoder_file;
  int samples = -1, noise_samples = -1;
  mi->add_option("--precoder", precoder_file, "precoders.json (omit for zero precoders)");
  mi->add_option("--samples", samples, "Channel draws");
  mi->add_option("--noise-samples", noise_samples, "Noise draws per row and channel draw");

  auto* base = app.add_subcommand("baseline", "Gaussian-signaling or no-precoding design");
  add_common(base, c_base);
  std::string base_method = "gaussian", base_out;
  double power_scale = -1;
  base->add_option("--method", base_method, "gaussian or none");
  base->add_option("--power-scale", power_scale, "Fraction of the designed power to use, in [0, 1]");
  base->add_option("--out", base_out, "precoders.json path");

  auto* val = app.add_subcommand("validate", "Run the built-in invariant suite");
  long long val_seed = 1;
  val->add_option("--seed", val_seed, "Seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt) {
      Scenario s = c_opt.load();
      if (max_iters > 0) s.solver.bnb.max_iterations = max_iters;
      if (gap_tol >= 0) s.solver.bnb.gap_tol = gap_tol;
      if (sigma2 > 0) s.sigma2_r = s.sigma2_e = sigma2;
      const LiftedQuadratics q = build_quadratics(s);
      const BnbReport r = bnb_maximize(s, q);
      std::filesystem::create_directories(out_dir);
      std::string csv = "iter,U,L,gap,boxes_open,wall_ms\n";
      for (const auto& row : r.ledger)
        csv += std::to_string(row.iter) + "," + num(row.U) + "," + num(row.L) + "," + num(row.gap) + "," +
               std::to_string(row.boxes_open) + "," + (timing ? num(row.wall_ms) : std::string("0")) + "\n";
      write_file(out_dir + "/bnb_trace.csv", csv);
      json pj = {{"scenario", s.name},
                 {"rate_bits", clamp_rate(r.best_rate)},
                 {"upper_bound", r.ledger.back().U},
                 {"iterations", r.iterations},
                 {"P1", matrix_json(r.best_p1)},
                 {"P2", matrix_json(r.best_p2)}};
      write_file(out_dir + "/precoders.json", pj.dump(2) + "\n");
      std::cout << "rate_bits " << num(clamp_rate(r.best_rate)) << "  U " << num(r.ledger.back().U) << "  gap "
                << num(r.gap) << "  iterations " << r.iterations << "\n";
    } else if (*sweep) {
      Scenario s = c_sweep.load();
      if (sweep_iters > 0) s.solver.bnb.max_iterations = sweep_iters;
      const std::vector<double> snrs = parse_grid(grid);
      const std::vector<std::string> ms = split(methods, ',');
      for (const auto& m : ms)
        if (m != "proposed" && m != "gaussian" && m != "none") throw ConfigError("--methods", "unknown method '" + m + "'");
      const LiftedQuadratics q0 = build_quadratics(s);
      struct Job {
        double snr;
        std::string method;
        double rate = 0.0;
      };
      std::vector<Job> jobs;
      for (double snr : snrs)
        for (const auto& m : ms) jobs.push_back({snr, m});
      parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        Job& job = jobs[i];
        Scenario sp = s;
        sp.sigma2_r = sp.sigma2_e = sigma2_for_snr_db(s, job.snr);
        sp.seed = derive_seed(s.seed, static_cast<std::uint64_t>(i));
        LiftedQuadratics q = q0;
        q.sigma2_r = sp.sigma2_r;
        q.sigma2_e = sp.sigma2_e;
        if (job.method == "proposed") {
          job.rate = bnb_maximize(sp, q).best_rate;
        } else if (job.method == "gaussian") {
          Rng rng(sp.seed);
          const GaussianDesign d = gaussian_precoding(sp, sp.solver.baseline.samples, rng);
          job.rate = rate_of(d.precoders, q);
        } else {
          job.rate = rate_of(no_precoding(sp), q);
        }
      });
      std::string csv = "snr_db,method,rate_bits\n";
      for (const auto& j : jobs) csv += num(j.snr) + "," + j.method + "," + num(clamp_rate(j.rate)) + "\n";
      if (sweep_out.empty())
        std::cout << csv;
      else
        write_file(sweep_out, csv);
    } else if (*cdf) {
      const Scenario s = c_cdf.load();
      const LiftedQuadratics q = build_quadratics(s);
      const Box b = initial_box(q);
      std::vector<double> finals(trials);
      parallel_for(trials, [&](int t) {
        Rng rng = make_rng(s.seed, static_cast<std::uint64_t>(t));
        const LiftedPoint start = random_lifted_point(b, rng);
        finals[t] = ccp_maximize(q, b, start, cdf_eps, s.solver.ccp.max_iterations, s.solver.subsolver).final_objective;
      });
      std::sort(finals.begin(), finals.end());
      std::string csv = "rank,final_value\n";
      for (int t = 0; t < trials; ++t) csv += std::to_string(t + 1) + "," + num(finals[t]) + "\n";
      if (cdf_out.empty())
        std::cout << csv;
      else
        write_file(cdf_out, csv);
    } else if (*mi) {
      Scenario s = c_mi.load();
      if (samples > 0) s.solver.mi.channel_samples = samples;
      if (noise_samples > 0) s.solver.mi.noise_samples = noise_samples;
      CMatrix p1 = CMatrix::Zero(s.nt1, s.nt1), p2 = CMatrix::Zero(s.nt2, s.nt2);
      if (!precoder_file.empty()) {
        std::ifstream in(precoder_file);
        if (!in) throw ConfigError("--precoder", "cannot open '" + precoder_file + "'");
        json j;
        try {
          j = json::parse(in);
        } catch (const json::parse_error& e) {
          throw ConfigError("--precoder", std::string("malformed JSON: ") + e.what());
        }
        p1 = matrix_from_json(j.value("P1", json()), s.nt1, "P1");
        p2 = matrix_from_json(j.value("P2", json()), s.nt2, "P2");
      }
      const LiftedQuadratics q = build_quadratics(s);
      const Vector p = vectorize(p1, p2);
      const SymbolEnumeration en = s.enumeration();
      Rng rng(s.seed);
      const MiEstimate el = mi_exact_mc(p1, p2, s.legitimate(), s.sigma2_r, en, s.solver.mi.channel_samples,
                                        s.solver.mi.noise_samples, rng);
      const MiEstimate ee = mi_exact_mc(p1, p2, s.eavesdropper(), s.sigma2_e, en, s.solver.mi.channel_samples,
                                        s.solver.mi.noise_samples, rng);
      const double al = mi_approx(p, q, Side::Legitimate, s.sigma2_r);
      const double ae = mi_approx(p, q, Side::Eavesdropper, s.sigma2_e);
      json rep = {{"legitimate", {{"exact", el.value}, {"std_error", el.std_error}, {"approx", al}}},
                  {"eavesdropper", {{"exact", ee.value}, {"std_error", ee.std_error}, {"approx", ae}}},
                  {"secrecy", {{"exact", el.value - ee.value}, {"approx", al - ae}}},
                  {"channel_samples", el.n_channel_samples},
                  {"noise_samples", el.n_noise_samples}};
      std::cout << rep.dump(2) << "\n";
    } else if (*base) {
      const Scenario s = c_base.load();
      const LiftedQuadratics q = build_quadratics(s);
      std::array<CMatrix, 2> p;
      if (base_method == "gaussian") {
        Rng rng(s.seed);
        const GaussianDesign d = gaussian_precoding(s, s.solver.baseline.samples, rng);
        p = scaled_precoders(d, power_scale >= 0 ? power_scale : s.solver.baseline.power_scale);
      } else if (base_method == "none") {
        p = no_precoding(s);
      } else {
        throw ConfigError("--method", "expected gaussian or none");
      }
      const PowerBound pbnd = effective_power_bound(s);
      const double rate = rate_of(p, q);
      json pj = {{"scenario", s.name},
                 {"method", base_method},
                 {"rate_bits", clamp_rate(rate)},
                 {"beta_bar", {pbnd.beta_bar[0], pbnd.beta_bar[1]}},
                 {"P1", matrix_json(p[0])},
                 {"P2", matrix_json(p[1])}};
      if (!base_out.empty()) write_file(base_out, pj.dump(2) + "\n");
      std::cout << "rate_bits " << num(clamp_rate(rate)) << "  beta_bar " << num(pbnd.beta_bar[0]) << " "
                << num(pbnd.beta_bar[1]) << (pbnd.vacuous[0] || pbnd.vacuous[1] ? "  (bound vacuous: singular Psi_f)" : "")
                << "\n";
    } else if (*val) {
      const auto results = run_validation(static_cast<std::uint64_t>(val_seed));
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << (r.pass ? "" : ": " + r.detail) << "\n";
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", {{"type", "config"}, {"field", e.field()}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "runtime"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}
