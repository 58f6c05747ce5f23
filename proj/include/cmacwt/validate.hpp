// SPDX-License-Identifier: Apache-2.0
//
// Self-check suite behind `cmacwt validate`: cheap invariant and property
// checks across all modules on the built-in small scenarios.

#ifndef CMACWT_VALIDATE_HPP
#define CMACWT_VALIDATE_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cmacwt/baselines.hpp"
#include "cmacwt/config.hpp"
#include "cmacwt/lift.hpp"
#include "cmacwt/mutual_info.hpp"
#include "cmacwt/optimizer.hpp"

namespace cmacwt {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline CheckResult run_check(const std::string& name, const std::function<std::string()>& body) {
  try {
    const std::string failure = body();
    return {name, failure.empty(), failure};
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(std::uint64_t seed = 1) {
  std::vector<CheckResult> out;
  auto check = [&out](const std::string& name, const std::function<std::string()>& body) {
    out.push_back(detail::run_check(name, body));
  };
  const Scenario tiny = builtin_scenario("tiny");
  const Scenario fig3 = builtin_scenario("paper-fig3");
  const LiftedQuadratics qt = build_quadratics(tiny);
  const LiftedQuadratics q3 = build_quadratics(fig3);
  Rng rng = make_rng(seed, 0);

  check("constellation energy and mean", [] {
    for (auto k : {ConstellationKind::BPSK, ConstellationKind::QPSK, ConstellationKind::PSK8, ConstellationKind::QAM16})
      make_constellation(k);  // throws on violation
    return std::string();
  });
  check("difference class multiplicities sum to N^2", [&] {
    int total = 0;
    for (const auto& c : q3.classes->classes) total += c.total_multiplicity();
    const int n = q3.n_vectors;
    return total == n * n ? std::string() : "got " + std::to_string(total);
  });
  check("vectorize round trip", [&] {
    const CMatrix p1 = complex_gaussian_matrix(2, 2, rng), p2 = complex_gaussian_matrix(2, 2, rng);
    auto [a, b] = devectorize(vectorize(p1, p2), 2, 2);
    return (a == p1 && b == p2) ? std::string() : "mismatch";
  });
  check("quadratic forms match complex arithmetic", [&] {
    for (int trial = 0; trial < 10; ++trial) {
      const CMatrix p1 = complex_gaussian_matrix(2, 2, rng), p2 = complex_gaussian_matrix(2, 2, rng);
      const Vector p = vectorize(p1, p2);
      const CMatrix r1 = matrix_sqrt(fig3.corr.psi_h[0]), r2 = matrix_sqrt(fig3.corr.psi_h[1]);
      for (int c = 0; c < q3.n_classes(); c += 7) {
        const CVector& e = q3.classes->classes[c].e;
        const double direct = 0.5 * ((r1 * p1 * e.head(2)).squaredNorm() + (r2 * p2 * e.tail(2)).squaredNorm());
        if (std::abs(p.dot(q3.A[c] * p) - direct) > 1e-9 * std::max(1.0, direct)) return "class " + std::to_string(c);
      }
      const double pow1 = (p1.adjoint() * p1).trace().real();
      if (std::abs(p.dot(q3.C[0] * p) - pow1) > 1e-9 * pow1) return std::string("power selector");
    }
    return std::string();
  });
  check("zero precoder gives zero rate", [&] {
    const Vector z = Vector::Zero(q3.n);
    const double a = mi_approx(z, q3, Side::Legitimate, fig3.sigma2_r);
    const double f = f_of_p(z, q3) - g_of_p(z, q3);
    return (a == 0.0 && f == 0.0) ? std::string() : "mi " + detail::fmt(a) + ", f-g " + detail::fmt(f);
  });
  check("f - g equals the mutual-information difference", [&] {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector p = 0.3 * gaussian_vector(q3.n, rng);
      const double d = f_of_p(p, q3) - g_of_p(p, q3) - secrecy_rate_approx(p, q3);
      if (std::abs(d) > 1e-10) return "difference " + detail::fmt(d);
      if (std::abs(F_of_Q(p * p.transpose(), q3) - f_of_p(p, q3)) > 1e-10) return std::string("F(pp^T) != f(p)");
    }
    return std::string();
  });
  check("gradient matches finite differences", [&] {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix w = 0.2 * Matrix::Random(q3.n, q3.n);
      const Matrix Q = w * w.transpose();
      const Matrix g = grad_F(Q, q3);
      Matrix dir = Matrix::Random(q3.n, q3.n);
      dir = 0.5 * (dir + dir.transpose());
      const double h = 1e-5;
      const double fd = (F_of_Q(Q + h * dir, q3) - F_of_Q(Q - h * dir, q3)) / (2 * h);
      const double an = g.cwiseProduct(dir).sum();
      if (std::abs(fd - an) > 1e-4 * std::max(1e-3, std::abs(an))) return "fd " + detail::fmt(fd) + " vs " + detail::fmt(an);
    }
    return std::string();
  });
  check("surrogate is a lower bound", [&] {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = 0.2 * Matrix::Random(q3.n, q3.n), b = 0.2 * Matrix::Random(q3.n, q3.n);
      const Matrix Q = a * a.transpose(), Qc = b * b.transpose();
      if (surrogate_value(Q, Qc, q3) > dc_objective(Q, q3) + 1e-9) return std::string("violated");
    }
    return std::string();
  });
  check("initial box contains sampled feasible points", [&] {
    const Box b = initial_box(q3);
    for (int trial = 0; trial < 2000; ++trial) {
      Vector p = gaussian_vector(q3.n, rng);
      scale_into_feasible(p, q3);
      p *= std::pow(std::uniform_real_distribution<double>(0, 1)(rng), 0.5);
      if (!b.contains(p, 1e-12)) return std::string("point outside box");
    }
    return std::string();
  });
  check("subproblem optimum lies in C(B)", [&] {
    const Box b = initial_box(qt);
    const SolveOutcome o = solve_concave_subproblem(qt, b, 0.01 * Matrix::Identity(qt.n, qt.n), tiny.solver.subsolver);
    if (o.status != SolveOutcome::Status::Optimal) return "status " + to_string(o.status);
    const MembershipReport r = membership_C(o.point, b, qt, 1e-8);
    return r.member ? std::string() : "violates " + r.worst;
  });
  check("CCP trace is monotone", [&] {
    const Box b = initial_box(qt);
    for (int trial = 0; trial < 3; ++trial) {
      const LiftedPoint s = random_lifted_point(b, rng);
      const CcpTrace t = ccp_maximize(qt, b, s, 1e-4, 50, tiny.solver.subsolver);
      for (std::size_t i = 1; i < t.values.size(); ++i)
        if (t.values[i] < t.values[i - 1] - 1e-7) return "drop at step " + std::to_string(i);
    }
    return std::string();
  });
  check("randomized precoders are feasible", [&] {
    const Matrix w = Matrix::Random(qt.n, qt.n);
    const RandomizedPoint r = gaussian_randomize(0.1 * w * w.transpose(), qt, 50, rng);
    return membership_P(r.p, qt).member ? std::string() : std::string("infeasible");
  });
  check("no-precoding design is feasible", [&] {
    auto p = no_precoding(fig3);
    return membership_P(vectorize(p[0], p[1]), q3).member ? std::string() : std::string("infeasible");
  });
  check("closed-form interference of zero precoder is zero", [&] {
    const CMatrix z = CMatrix::Zero(2, 2);
    const double v = interference_closed_form(z, z, fig3.corr.phi_f[0], fig3.corr.psi_f[0][0], fig3.corr.psi_f[0][1]);
    return v == 0.0 ? std::string() : detail::fmt(v);
  });
  return out;
}

}  // namespace cmacwt

#endif  // CMACWT_VALIDATE_HPP
