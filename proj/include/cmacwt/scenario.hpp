// SPDX-License-Identifier: Apache-2.0

#ifndef CMACWT_SCENARIO_HPP
#define CMACWT_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cmacwt/channel.hpp"
#include "cmacwt/constellation.hpp"

namespace cmacwt {

/// Log-barrier Newton method used for every convex subproblem.
struct SubsolverSettings {
  double t0 = 1.0;
  double mu = 10.0;
  double gap_tol = 1e-8;  // stop when (barrier weight) / t drops below this
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  int max_newton = 200;  // per centering step
  double newton_tol = 1e-10;
};

struct CcpSettings {
  double epsilon = 1e-3;
  int max_iterations = 100;
  int starts = 3;
};

struct BnbSettings {
  int max_iterations = 40;
  double gap_tol = 0.002;
};

struct RandomizationSettings {
  int draws = 100;
};

struct BaselineSettings {
  int samples = 200;
  double ccp_epsilon = 1e-4;
  int max_iterations = 50;
  double power_scale = 1.0;
};

struct MiSettings {
  int channel_samples = 10000;
  int noise_samples = 100;
};

struct SolverSettings {
  SubsolverSettings subsolver;
  CcpSettings ccp;
  BnbSettings bnb;
  RandomizationSettings randomization;
  BaselineSettings baseline;
  MiSettings mi;
};

/// A complete problem instance plus solver configuration.
struct Scenario {
  std::string name = "custom";
  int nt1 = 2, nt2 = 2, nr = 2, ne = 2;
  std::vector<int> n_pr;
  ConstellationKind mod1 = ConstellationKind::BPSK;
  ConstellationKind mod2 = ConstellationKind::BPSK;
  CorrelationSet corr;
  std::array<double, 2> beta{2.0, 2.0};
  std::vector<double> gamma;
  double sigma2_r = 0.1;
  double sigma2_e = 0.1;
  std::uint64_t seed = 1;
  std::int64_t max_vectors = kDefaultMaxVectors;
  std::int64_t max_quadratics_bytes = std::int64_t{1} << 30;
  SolverSettings solver;

  int n_primary() const { return static_cast<int>(gamma.size()); }
  /// Number of real optimization variables 2 (N_T1^2 + N_T2^2).
  int real_dim() const { return 2 * (nt1 * nt1 + nt2 * nt2); }

  LinkSide legitimate() const { return {corr.phi_h, corr.psi_h, sigma2_r}; }
  LinkSide eavesdropper() const { return {corr.phi_g, corr.psi_g, sigma2_e}; }

  SymbolEnumeration enumeration() const {
    return enumerate_vectors(make_constellation(mod1), make_constellation(mod2), nt1, nt2, max_vectors);
  }

  /// Empty string when the instance is consistent.
  std::string check() const {
    if (nt1 < 1 || nt2 < 1 || nr < 1 || ne < 1) return "antenna counts must be positive";
    if (static_cast<int>(n_pr.size()) != n_primary()) return "n_pr and gamma must have one entry per primary receiver";
    if (corr.n_primary() != n_primary()) return "correlation set and gamma disagree on the number of primary receivers";
    if (std::string e = corr.check(); !e.empty()) return e;
    auto dim_ok = [](const CMatrix& m, int n) { return m.rows() == n && m.cols() == n; };
    if (!dim_ok(corr.phi_h, nr)) return "phi_h must be nr x nr";
    if (!dim_ok(corr.phi_g, ne)) return "phi_g must be ne x ne";
    const int nt[2] = {nt1, nt2};
    for (int i = 0; i < 2; ++i) {
      if (!dim_ok(corr.psi_h[i], nt[i]) || !dim_ok(corr.psi_g[i], nt[i])) return "transmit correlations must be nt x nt";
      for (int j = 0; j < n_primary(); ++j)
        if (!dim_ok(corr.psi_f[j][i], nt[i])) return "psi_f must be nt x nt";
    }
    for (int j = 0; j < n_primary(); ++j) {
      if (n_pr[j] < 1) return "primary receiver antenna counts must be positive";
      if (!dim_ok(corr.phi_f[j], n_pr[j])) return "phi_f must match the primary receiver antenna count";
      if (!(gamma[j] >= 0.0)) return "gamma must be non-negative";
    }
    if (!(beta[0] >= 0.0 && beta[1] >= 0.0)) return "beta must be non-negative";
    if (!(sigma2_r > 0.0 && sigma2_e > 0.0)) return "noise variances must be positive";
    return {};
  }
};

}  // namespace cmacwt

#endif  // CMACWT_SCENARIO_HPP
