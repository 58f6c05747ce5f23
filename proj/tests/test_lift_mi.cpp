// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "cmacwt/config.hpp"
#include "cmacwt/lift.hpp"
#include "cmacwt/mutual_info.hpp"
#include "cmacwt/optimizer.hpp"

using namespace cmacwt;

namespace {

const LiftedQuadratics& fig3_quadratics() {
  static const LiftedQuadratics q = build_quadratics(builtin_scenario("paper-fig3"));
  return q;
}

const LiftedQuadratics& tiny_quadratics() {
  static const LiftedQuadratics q = build_quadratics(builtin_scenario("tiny"));
  return q;
}

Matrix random_psd(int n, double scale, Rng& rng) {
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = std::normal_distribution<double>(0.0, scale)(rng);
  return w * w.transpose();
}

// Approximated MI by a direct double loop over symbol pairs, using complex
// arithmetic instead of the stored real matrices.
double mi_approx_oracle(const CMatrix& p1, const CMatrix& p2, const LinkSide& side, double sigma2,
                        const SymbolEnumeration& en) {
  const Vector lam = hermitian_eigenvalues(side.phi);
  const CMatrix r1 = matrix_sqrt(side.psi[0]), r2 = matrix_sqrt(side.psi[1]);
  const int n = en.count();
  double total = 0;
  for (int m = 0; m < n; ++m) {
    double sum = 0;
    for (int k = 0; k < n; ++k) {
      const CVector e = en.vectors[m] - en.vectors[k];
      const double t = 0.5 * ((r1 * p1 * e.head(en.nt1)).squaredNorm() + (r2 * p2 * e.tail(en.nt2)).squaredNorm());
      double prod = 1;
      for (Eigen::Index j = 0; j < lam.size(); ++j) prod /= 1.0 + lam(j) / sigma2 * t;
      sum += prod;
    }
    total += std::log2(sum);
  }
  return std::log2(static_cast<double>(n)) - total / n;
}

}  // namespace

TEST(Lift, VectorizeIsColumnMajorRealThenImaginary) {
  CMatrix p1(2, 2), p2(1, 1);
  p1 << Complex(1, 5), Complex(3, 7), Complex(2, 6), Complex(4, 8);
  p2 << Complex(9, 10);
  const Vector p = vectorize(p1, p2);
  ASSERT_EQ(p.size(), 10);
  const double expect[] = {1, 2, 3, 4, 9, 5, 6, 7, 8, 10};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(p(i), expect[i]);
  auto [a, b] = devectorize(p, 2, 1);
  EXPECT_EQ(a, p1);
  EXPECT_EQ(b, p2);
  EXPECT_THROW(devectorize(p, 2, 2), Error);
}

TEST(Lift, QuadraticFormsMatchComplexArithmetic) {
  const Scenario sc = builtin_scenario("paper-fig3");
  const LiftedQuadratics& q = fig3_quadratics();
  Rng rng = make_rng(3, 0);
  const CMatrix rh1 = matrix_sqrt(sc.corr.psi_h[0]), rh2 = matrix_sqrt(sc.corr.psi_h[1]);
  const CMatrix rg1 = matrix_sqrt(sc.corr.psi_g[0]), rg2 = matrix_sqrt(sc.corr.psi_g[1]);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix p1 = complex_gaussian_matrix(2, 2, rng), p2 = complex_gaussian_matrix(2, 2, rng);
    const Vector p = vectorize(p1, p2);
    for (int c = 0; c < q.n_classes(); ++c) {
      const CVector& e = q.classes->classes[c].e;
      const double a = 0.5 * ((rh1 * p1 * e.head(2)).squaredNorm() + (rh2 * p2 * e.tail(2)).squaredNorm());
      const double b = 0.5 * ((rg1 * p1 * e.head(2)).squaredNorm() + (rg2 * p2 * e.tail(2)).squaredNorm());
      EXPECT_NEAR(p.dot(q.A[c] * p), a, 1e-10 * std::max(1.0, a));
      EXPECT_NEAR(p.dot(q.B[c] * p), b, 1e-10 * std::max(1.0, b));
    }
    EXPECT_NEAR(p.dot(q.C[0] * p), p1.squaredNorm(), 1e-10 * p1.squaredNorm());
    EXPECT_NEAR(p.dot(q.C[1] * p), p2.squaredNorm(), 1e-10 * p2.squaredNorm());
    const double intf = interference_closed_form(p1, p2, sc.corr.phi_f[0], sc.corr.psi_f[0][0], sc.corr.psi_f[0][1]);
    EXPECT_NEAR(p.dot(q.D[0] * p), intf, 1e-10 * intf);
  }
}

TEST(Lift, ReducedCoordinatesReproduceClassMatrices) {
  const LiftedQuadratics& q = fig3_quadratics();
  for (int c = 0; c < q.n_classes(); c += 5) {
    Matrix a = Matrix::Zero(q.n, q.n), b = Matrix::Zero(q.n, q.n);
    for (int r = 0; r < q.reduced_dim(); ++r) {
      a += q.theta(c, r) * q.basis_a[r];
      b += q.theta(c, r) * q.basis_b[r];
    }
    EXPECT_LT((a - q.A[c]).norm(), 1e-12);
    EXPECT_LT((b - q.B[c]).norm(), 1e-12);
  }
}

TEST(Lift, MemoryCapIsEnforced) {
  Scenario sc = builtin_scenario("paper-fig3");
  sc.max_quadratics_bytes = 1024;
  EXPECT_THROW(build_quadratics(sc), Error);
}

TEST(MutualInfo, ApproximationMatchesPairwiseOracle) {
  for (const char* name : {"paper-fig3", "tiny"}) {
    const Scenario sc = builtin_scenario(name);
    const LiftedQuadratics q = build_quadratics(sc);
    const SymbolEnumeration en = sc.enumeration();
    Rng rng = make_rng(8, 0);
    for (int trial = 0; trial < 4; ++trial) {
      const CMatrix p1 = 0.5 * complex_gaussian_matrix(sc.nt1, sc.nt1, rng);
      const CMatrix p2 = 0.5 * complex_gaussian_matrix(sc.nt2, sc.nt2, rng);
      const Vector p = vectorize(p1, p2);
      EXPECT_NEAR(mi_approx(p, q, Side::Legitimate, sc.sigma2_r),
                  mi_approx_oracle(p1, p2, sc.legitimate(), sc.sigma2_r, en), 1e-10) << name;
      EXPECT_NEAR(mi_approx(p, q, Side::Eavesdropper, sc.sigma2_e),
                  mi_approx_oracle(p1, p2, sc.eavesdropper(), sc.sigma2_e, en), 1e-10) << name;
    }
  }
}

TEST(MutualInfo, ApproximationLimits) {
  const LiftedQuadratics& q = fig3_quadratics();
  const Vector z = Vector::Zero(q.n);
  EXPECT_EQ(mi_approx(z, q, Side::Legitimate, 0.1), 0.0);
  Rng rng = make_rng(9, 0);
  const Vector p = gaussian_vector(q.n, rng);
  const double high = mi_approx(p, q, Side::Legitimate, 1e-8);
  EXPECT_NEAR(high, std::log2(16.0), 1e-3);
  EXPECT_LE(mi_approx(p, q, Side::Legitimate, 1.0), mi_approx(p, q, Side::Legitimate, 0.1));
  EXPECT_THROW(mi_approx(p, q, Side::Legitimate, 0.0), Error);
}

TEST(MutualInfo, ExactMonteCarloZeroPrecoderIsExactlyZero) {
  const Scenario sc = builtin_scenario("paper-fig3");
  const CMatrix z = CMatrix::Zero(2, 2);
  Rng rng = make_rng(1, 0);
  const MiEstimate e = mi_exact_mc(z, z, sc.legitimate(), sc.sigma2_r, sc.enumeration(), 20, 5, rng);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(MutualInfo, ExactMonteCarloIndependentOfWorkerCount) {
  const Scenario sc = builtin_scenario("tiny");
  Rng rng = make_rng(4, 0);
  const CMatrix p1 = 0.5 * complex_gaussian_matrix(1, 1, rng), p2 = 0.5 * complex_gaussian_matrix(1, 1, rng);
  auto run = [&] {
    Rng r = make_rng(77, 0);
    return mi_exact_mc(p1, p2, sc.legitimate(), sc.sigma2_r, sc.enumeration(), 64, 8, r);
  };
  ::setenv("CMACWT_WORKERS", "1", 1);
  const MiEstimate a = run();
  ::setenv("CMACWT_WORKERS", "3", 1);
  const MiEstimate b = run();
  ::unsetenv("CMACWT_WORKERS");
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_GT(a.value, 0.0);
  EXPECT_LE(a.value, 2.0 + 4 * a.std_error);
}

TEST(Objective, DifferenceEqualsSecrecyRate) {
  const LiftedQuadratics& q = fig3_quadratics();
  Rng rng = make_rng(10, 0);
  EXPECT_EQ(f_of_p(Vector::Zero(q.n), q) - g_of_p(Vector::Zero(q.n), q), 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector p = 0.4 * gaussian_vector(q.n, rng);
    EXPECT_NEAR(f_of_p(p, q) - g_of_p(p, q), secrecy_rate_approx(p, q), 1e-10);
    EXPECT_NEAR(F_of_Q(p * p.transpose(), q), f_of_p(p, q), 1e-10);
    EXPECT_NEAR(G_of_Q(p * p.transpose(), q), g_of_p(p, q), 1e-10);
  }
}

TEST(Objective, GradientMatchesCentralDifferences) {
  const LiftedQuadratics& q = fig3_quadratics();
  Rng rng = make_rng(12, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix Q = random_psd(q.n, 0.15, rng);
    const Matrix g = grad_F(Q, q);
    for (int i = 0; i < q.n; i += 3)
      for (int j = i; j < q.n; j += 4) {
        Matrix dir = Matrix::Zero(q.n, q.n);
        dir(i, j) = dir(j, i) = 1.0;
        const double h = 1e-6;
        const double fd = (F_of_Q(Q + h * dir, q) - F_of_Q(Q - h * dir, q)) / (2 * h);
        const double an = g.cwiseProduct(dir).sum();
        EXPECT_NEAR(an, fd, 1e-5 * std::max(1e-2, std::abs(fd)));
      }
  }
}

TEST(Objective, ConvexityAndTangentLowerBound) {
  const LiftedQuadratics& q = fig3_quadratics();
  Rng rng = make_rng(13, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = random_psd(q.n, 0.15, rng), Y = random_psd(q.n, 0.15, rng);
    const Matrix M = 0.5 * (X + Y);
    EXPECT_LE(F_of_Q(M, q), 0.5 * (F_of_Q(X, q) + F_of_Q(Y, q)) + 1e-9);
    EXPECT_LE(G_of_Q(M, q), 0.5 * (G_of_Q(X, q) + G_of_Q(Y, q)) + 1e-9);
    EXPECT_LE(surrogate_value(X, Y, q), dc_objective(X, q) + 1e-9);
    EXPECT_NEAR(surrogate_value(Y, Y, q), dc_objective(Y, q), 1e-10);
  }
}

TEST(Objective, ShiftMakesBothSidesConvexAlongLines) {
  const Scenario sc = builtin_scenario("paper-fig3");
  const LiftedQuadratics& q = fig3_quadratics();
  const double k = dc_shift_k(q, sc);
  Rng rng = make_rng(14, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = gaussian_vector(q.n, rng), y = gaussian_vector(q.n, rng);
    auto fs = [&](const Vector& p) { return f_of_p(p, q) + k * p.squaredNorm(); };
    auto gs = [&](const Vector& p) { return g_of_p(p, q) + k * p.squaredNorm(); };
    const Vector m = 0.5 * (x + y);
    EXPECT_LE(fs(m), 0.5 * (fs(x) + fs(y)) + 1e-9);
    EXPECT_LE(gs(m), 0.5 * (gs(x) + gs(y)) + 1e-9);
  }
}

TEST(Box, BoundsMatchPseudoInverseOracle) {
  const LiftedQuadratics& q = fig3_quadratics();
  const Box b = initial_box(q);
  for (int i = 0; i < q.n; ++i) {
    double u = std::numeric_limits<double>::infinity();
    for (const auto& [m, budget] : q.constraints()) {
      const Matrix pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(*m).pseudoInverse();
      // Only constraints whose range contains e_i bound coordinate i.
      const Vector ei = Vector::Unit(q.n, i);
      if ((*m * pinv * ei - ei).norm() > 1e-8) continue;
      u = std::min(u, std::sqrt(budget * pinv(i, i)));
    }
    EXPECT_NEAR(b.upper(i), u, 1e-10);
    EXPECT_EQ(b.lower(i), -b.upper(i));
  }
}

TEST(Box, ContainsScaledFeasiblePointsAndBoundIsAttained) {
  const LiftedQuadratics& q = fig3_quadratics();
  const Box b = initial_box(q);
  Rng rng = make_rng(15, 0);
  for (int trial = 0; trial < 500; ++trial) {
    Vector p = gaussian_vector(q.n, rng);
    ASSERT_TRUE(scale_into_feasible(p, q));
    EXPECT_TRUE(membership_P(p, q).member);
    EXPECT_TRUE(b.contains(p, 1e-12));
  }
  // The maximizer of p_0 under the tightest single constraint lies on the box face.
  double best = -1;
  for (const auto& [m, budget] : q.constraints()) {
    const Matrix pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(*m).pseudoInverse();
    if (pinv(0, 0) <= 1e-12) continue;  // coordinate 0 is unconstrained here
    const Vector p = std::sqrt(budget / pinv(0, 0)) * pinv.col(0);
    EXPECT_NEAR(p.dot(*m * p), budget, 1e-9 * std::max(1.0, budget));
    if (best < 0 || p(0) < best) best = p(0);
  }
  EXPECT_NEAR(best, b.upper(0), 1e-10);
}

TEST(Membership, RankOneInteriorPointsAreInS) {
  const LiftedQuadratics& q = tiny_quadratics();
  const Box b = initial_box(q);
  Rng rng = make_rng(16, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const LiftedPoint x = random_lifted_point(b, rng);
    EXPECT_TRUE(membership_S(x, b).member);
    EXPECT_GE(bordered_min_eigenvalue(x.Q, x.p), -1e-12);
  }
  LiftedPoint bad = LiftedPoint::rank_one(b.center());
  bad.Q(0, 0) = -1.0;
  const MembershipReport r = membership_S(bad, b);
  EXPECT_FALSE(r.member);
  EXPECT_EQ(r.worst, "rlt_lower");
  LiftedPoint outside = LiftedPoint::rank_one(b.upper * 1.1);
  const MembershipReport ro = membership_S(outside, b);
  EXPECT_FALSE(ro.member);
  ASSERT_EQ(ro.margins.front().first, "box");
  EXPECT_LT(ro.margins.front().second, 0.0);
}

TEST(Membership, BudgetMarginsNameTheConstraint) {
  const LiftedQuadratics& q = tiny_quadratics();
  Vector p = Vector::Zero(q.n);
  p(0) = 10.0;
  const MembershipReport r = membership_P(p, q);
  EXPECT_FALSE(r.member);
  EXPECT_TRUE(r.worst == "power[0]" || r.worst == "interference[0]");
}
