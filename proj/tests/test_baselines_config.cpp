// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "cmacwt/baselines.hpp"
#include "cmacwt/config.hpp"
#include "cmacwt/lift.hpp"
#include "cmacwt/validate.hpp"

using namespace cmacwt;

namespace {

std::string scenario_path(const std::string& name) { return std::string(CMACWT_SOURCE_DIR) + "/scenarios/" + name + ".json"; }

std::string config_error_field(const nlohmann::json& j) {
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

nlohmann::json tiny_json() {
  return nlohmann::json::parse(R"({
    "antennas": {"nt": [1, 1], "nr": 2, "ne": 2, "npr": [2]},
    "modulation": ["BPSK", "BPSK"],
    "correlation": {"phi_h": 0.3, "psi_h": [0, 0], "phi_g": 0.6, "psi_g": [0, 0],
                    "phi_f": [0.5], "psi_f": [[0, 0]]},
    "beta": [0.5, 0.5], "gamma": [0.6], "sigma2": 0.1
  })");
}

double interference(const std::array<CMatrix, 2>& p, const Scenario& sc, int j) {
  return interference_closed_form(p[0], p[1], sc.corr.phi_f[j], sc.corr.psi_f[j][0], sc.corr.psi_f[j][1]);
}

}  // namespace

TEST(PowerBound, ExactValuesForSweepScenario) {
  Scenario sc = builtin_scenario("paper-fig45");
  PowerBound b = effective_power_bound(sc);
  EXPECT_NEAR(b.beta_bar[0], 0.5, 1e-12 * 0.5);
  EXPECT_NEAR(b.beta_bar[1], 0.2, 1e-12 * 0.2);
  sc.gamma = {0.02};
  b = effective_power_bound(sc);
  EXPECT_NEAR(b.beta_bar[0], 0.05, 1e-12 * 0.05);
  EXPECT_NEAR(b.beta_bar[1], 0.02, 1e-12 * 0.02);
  EXPECT_FALSE(b.vacuous[0] || b.vacuous[1]);
}

TEST(PowerBound, SingularCorrelationIsFlaggedVacuous) {
  Scenario sc = builtin_scenario("paper-fig3");
  sc.corr.psi_f[0][0] = CMatrix::Ones(2, 2);  // rank one
  const PowerBound b = effective_power_bound(sc);
  EXPECT_TRUE(b.vacuous[0]);
  EXPECT_EQ(b.beta_bar[0], sc.beta[0]);
}

TEST(NoPrecoding, ScaledIdentityMeetsBudgets) {
  const Scenario sc = builtin_scenario("paper-fig3");
  const auto p = no_precoding(sc);
  // Unscaled (beta / N) I = I has interference tr(Phi_f)(tr Psi_f1 + tr Psi_f2) = 2 * 4.
  const double factor = std::sqrt(sc.gamma[0] / 8.0);
  EXPECT_TRUE(p[0].isApprox(factor * CMatrix::Identity(2, 2), 1e-12));
  EXPECT_TRUE(p[1].isApprox(factor * CMatrix::Identity(2, 2), 1e-12));
  EXPECT_NEAR(interference(p, sc, 0), sc.gamma[0], 1e-12);

  Scenario loose = sc;
  loose.gamma = {100.0};
  const auto q = no_precoding(loose);
  EXPECT_TRUE(q[0].isApprox(CMatrix::Identity(2, 2), 1e-12));
  EXPECT_LE(q[0].squaredNorm(), loose.beta[0] + 1e-12);
}

TEST(GaussianBaseline, FeasibleMonotoneAndConsistent) {
  const Scenario sc = builtin_scenario("paper-fig3");
  Rng rng = make_rng(31, 0);
  const GaussianDesign d = gaussian_precoding(sc, 20, rng);
  ASSERT_GE(d.trace.size(), 2u);
  for (std::size_t i = 2; i < d.trace.size(); ++i) EXPECT_GE(d.trace[i], d.trace[i - 1] - 1e-7);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE(d.Q[i].trace().real(), sc.beta[i] + 1e-7);
    EXPECT_GE(hermitian_eigenvalues(d.Q[i])(0), -1e-8);
    EXPECT_TRUE((d.precoders[i] * d.precoders[i]).isApprox(d.Q[i], 1e-8));
  }
  EXPECT_LE(interference(d.precoders, sc, 0), sc.gamma[0] + 1e-7);
  const auto half = scaled_precoders(d, 0.5);
  EXPECT_NEAR(half[0].squaredNorm(), 0.5 * d.precoders[0].squaredNorm(), 1e-12);
  EXPECT_THROW(scaled_precoders(d, 1.5), Error);
}

TEST(GaussianBaseline, SameSeedSameDesign) {
  const Scenario sc = builtin_scenario("tiny");
  Rng a = make_rng(5, 0), b = make_rng(5, 0);
  EXPECT_EQ(gaussian_precoding(sc, 10, a).Q[0], gaussian_precoding(sc, 10, b).Q[0]);
}

TEST(Config, ParsesMinimalDocument) {
  const Scenario s = parse_scenario(tiny_json());
  EXPECT_EQ(s.nt1, 1);
  EXPECT_EQ(s.n_primary(), 1);
  EXPECT_EQ(s.sigma2_r, 0.1);
  EXPECT_EQ(s.sigma2_e, 0.1);
  EXPECT_TRUE(s.corr.phi_g.isApprox(exp_correlation(0.6, 2)));
}

TEST(Config, ScenarioFilesMatchBuiltins) {
  for (const std::string name : {"paper-fig3", "paper-fig45", "paper-fig6", "tiny"}) {
    const Scenario f = load_scenario_file(scenario_path(name));
    const Scenario b = builtin_scenario(name);
    EXPECT_EQ(f.mod1, b.mod1) << name;
    EXPECT_EQ(f.beta, b.beta) << name;
    EXPECT_EQ(f.gamma, b.gamma) << name;
    EXPECT_EQ(f.sigma2_r, b.sigma2_r) << name;
    EXPECT_EQ(f.corr.psi_h[1], b.corr.psi_h[1]) << name;
    EXPECT_EQ(f.corr.psi_f.back()[0], b.corr.psi_f.back()[0]) << name;
    EXPECT_EQ(f.solver.ccp.epsilon, b.solver.ccp.epsilon) << name;
  }
  const Scenario g = load_scenario_file(scenario_path("paper-fig45-gamma002"));
  EXPECT_EQ(g.gamma, std::vector<double>{0.02});
  EXPECT_EQ(g.mod2, ConstellationKind::QPSK);
}

TEST(Config, BaseOverlayAndComplexCorrelation) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "base": "tiny", "sigma2_r": 0.05, "sigma2_e": 0.2,
    "antennas": {"nt": [1, 1], "nr": 2, "ne": 2, "npr": [2]},
    "correlation": {"phi_h": {"real": [[1, 0.2], [0.2, 1]], "imag": [[0, 0.1], [-0.1, 0]]},
                    "psi_h": [0, 0], "phi_g": 0.6, "psi_g": [0, 0], "phi_f": [0.5], "psi_f": [[0, 0]]},
    "bnb": {"max_iterations": 7}
  })");
  const Scenario s = parse_scenario(j);
  EXPECT_EQ(s.sigma2_r, 0.05);
  EXPECT_EQ(s.sigma2_e, 0.2);
  EXPECT_EQ(s.corr.phi_h(0, 1), Complex(0.2, 0.1));
  EXPECT_EQ(s.solver.bnb.max_iterations, 7);
  EXPECT_EQ(s.gamma, builtin_scenario("tiny").gamma);
}

TEST(Config, ErrorsNameTheField) {
  auto with = [](const char* ptr, nlohmann::json v) {
    nlohmann::json j = tiny_json();
    j[nlohmann::json::json_pointer(ptr)] = std::move(v);
    return j;
  };
  EXPECT_EQ(config_error_field(with("/correlation/phi_h", 1.2)), "correlation.phi_h");
  EXPECT_EQ(config_error_field(with("/modulation/1", "64QAM")), "modulation[1]");
  EXPECT_EQ(config_error_field(with("/beta", nlohmann::json::array({1.0}))), "beta");
  EXPECT_EQ(config_error_field(with("/gamma", nlohmann::json::array({0.1, 0.1}))), "gamma");
  EXPECT_EQ(config_error_field(with("/sigma2", -1.0)), "sigma2");
  EXPECT_EQ(config_error_field(with("/ccp", nlohmann::json{{"epsilon", 0.0}})), "ccp.epsilon");
  EXPECT_EQ(config_error_field(with("/correlation/phi_f/0", nlohmann::json{{"real", {{1, 2}, {2, 1}}}})),
            "correlation.phi_f[0]");
  nlohmann::json missing = tiny_json();
  missing.erase("beta");
  EXPECT_EQ(config_error_field(missing), "beta");
  EXPECT_THROW(load_scenario("no-such-scenario.json"), ConfigError);
}

TEST(Config, SnrToNoiseVariance) {
  const Scenario s = builtin_scenario("paper-fig45");
  EXPECT_NEAR(sigma2_for_snr_db(s, 20.0), 0.02, 1e-15);
  EXPECT_NEAR(sigma2_for_snr_db(s, -10.0), 20.0, 1e-12);
}

TEST(Validate, AllSelfChecksPass) {
  for (const CheckResult& r : run_validation(3)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
