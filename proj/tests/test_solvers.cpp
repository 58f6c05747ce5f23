// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "cmacwt/barrier.hpp"
#include "cmacwt/config.hpp"
#include "cmacwt/optimizer.hpp"
#include "cmacwt/subsolver.hpp"

using namespace cmacwt;

namespace {

const LiftedQuadratics& tiny_quadratics() {
  static const LiftedQuadratics q = build_quadratics(builtin_scenario("tiny"));
  return q;
}

const LiftedQuadratics& fig3_quadratics() {
  static const LiftedQuadratics q = build_quadratics(builtin_scenario("paper-fig3"));
  return q;
}

SparseRow row(std::vector<std::pair<int, double>> terms, double rhs) {
  SparseRow r;
  r.terms = std::move(terms);
  r.rhs = rhs;
  return r;
}

ObjectiveEval linear(const Vector& c, const Vector& x, int order) {
  ObjectiveEval e;
  e.value = c.dot(x);
  if (order >= 1) e.grad = c;
  if (order >= 2) e.hess = Matrix::Zero(c.size(), c.size());
  return e;
}

// A point of C(B) for a box symmetric about the origin: S(B) is convex and
// contains (0, 0), so shrinking toward it keeps membership while meeting budgets.
LiftedPoint random_member(const Box& box, const LiftedQuadratics& q, Rng& rng) {
  LiftedPoint x = random_lifted_point(box, rng);
  double worst = 1.0;
  for (const auto& [m, budget] : q.constraints()) worst = std::max(worst, m->cwiseProduct(x.Q).sum() / budget);
  const double a = std::uniform_real_distribution<double>(0.05, 1.0)(rng) / worst;
  x.Q *= a;
  x.p *= a;
  return x;
}

}  // namespace

TEST(Barrier, LinearProgramOnSimplex) {
  BarrierProblem pb;
  pb.n_vars = 2;
  pb.rows = {row({{0, 1.0}, {1, 1.0}}, 1.0), row({{0, -1.0}}, 0.0), row({{1, -1.0}}, 0.0)};
  const Vector c = (Vector(2) << 1.0, 2.0).finished();
  pb.objective = [&](const Vector& x, int order) { return linear(c, x, order); };
  const BarrierResult r = barrier_maximize(pb, Vector::Constant(2, 0.25), SubsolverSettings{});
  ASSERT_EQ(r.status, BarrierResult::Status::Optimal);
  EXPECT_NEAR(r.value, 2.0, 1e-7);
  EXPECT_NEAR(r.x(1), 1.0, 1e-7);
  EXPECT_LE(r.duality_gap, 1e-7);
}

TEST(Barrier, TwoByTwoLmi) {
  // max x subject to [[1, x], [x, 1]] > 0: optimum 1.
  BarrierProblem pb;
  pb.n_vars = 1;
  AffineLmi l;
  l.base = Matrix::Identity(2, 2);
  l.terms = {{{0, 1, 1.0}}};
  pb.lmis = {l};
  const Vector c = Vector::Ones(1);
  pb.objective = [&](const Vector& x, int order) { return linear(c, x, order); };
  const BarrierResult r = barrier_maximize(pb, Vector::Zero(1), SubsolverSettings{});
  ASSERT_EQ(r.status, BarrierResult::Status::Optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-7);
}

TEST(Barrier, ConcaveObjectiveInteriorOptimum) {
  // max log x + log(1 - x) + x / 2 over 0 <= x <= 0.9; stationary point solves 1/x - 1/(1-x) + 1/2 = 0.
  BarrierProblem pb;
  pb.n_vars = 1;
  pb.rows = {row({{0, 1.0}}, 0.9), row({{0, -1.0}}, 0.0)};
  pb.objective = [](const Vector& x, int order) {
    ObjectiveEval e;
    const double v = x(0);
    if (!(v > 0.0 && v < 1.0)) {
      e.ok = false;
      return e;
    }
    e.value = std::log(v) + std::log(1 - v) + 0.5 * v;
    if (order >= 1) e.grad = Vector::Constant(1, 1 / v - 1 / (1 - v) + 0.5);
    if (order >= 2) e.hess = Matrix::Constant(1, 1, -1 / (v * v) - 1 / ((1 - v) * (1 - v)));
    return e;
  };
  const BarrierResult r = barrier_maximize(pb, Vector::Constant(1, 0.3), SubsolverSettings{});
  ASSERT_EQ(r.status, BarrierResult::Status::Optimal);
  // Multiplying the stationarity condition by 2x(1 - x) gives x^2 + 3x - 2 = 0.
  const double root = 0.5 * (std::sqrt(17.0) - 3.0);
  EXPECT_NEAR(r.x(0), root, 1e-6);
}

TEST(Barrier, RejectsInfeasibleStart) {
  BarrierProblem pb;
  pb.n_vars = 1;
  pb.rows = {row({{0, 1.0}}, 1.0)};
  const Vector c = Vector::Ones(1);
  pb.objective = [&](const Vector& x, int order) { return linear(c, x, order); };
  EXPECT_EQ(barrier_maximize(pb, Vector::Constant(1, 2.0), SubsolverSettings{}).status,
            BarrierResult::Status::NotStrictlyFeasible);
}

TEST(Subsolver, OptimumDominatesSampledMembers) {
  const LiftedQuadratics& q = tiny_quadratics();
  const Box b = initial_box(q);
  Rng rng = make_rng(21, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const LiftedPoint c = random_member(b, q, rng);
    const SolveOutcome o = solve_concave_subproblem(q, b, c.Q);
    ASSERT_EQ(o.status, SolveOutcome::Status::Optimal);
    EXPECT_TRUE(membership_C(o.point, b, q, 1e-8).member);
    EXPECT_NEAR(o.value, surrogate_value(o.point.Q, c.Q, q), 1e-9);
    for (int s = 0; s < 300; ++s) {
      const LiftedPoint x = random_member(b, q, rng);
      ASSERT_TRUE(membership_C(x, b, q).member);
      EXPECT_LE(surrogate_value(x.Q, c.Q, q), o.value + 1e-7);
    }
  }
}

TEST(Subsolver, ReportsInfeasibleBox) {
  const LiftedQuadratics& q = tiny_quadratics();
  const Box root = initial_box(q);
  Box far = root;
  // Every point of this box violates the interference budget.
  far.lower(0) = 0.99 * root.upper(0);
  far.lower(2) = 0.99 * root.upper(2);
  const SolveOutcome o = solve_concave_subproblem(q, far, Matrix::Zero(q.n, q.n));
  EXPECT_EQ(o.status, SolveOutcome::Status::Infeasible);
}

TEST(Subsolver, SemidefiniteRelaxationIsFeasible) {
  const LiftedQuadratics& q = fig3_quadratics();
  const SolveOutcome o = solve_sdr_subproblem(q, Matrix::Zero(q.n, q.n));
  ASSERT_EQ(o.status, SolveOutcome::Status::Optimal);
  EXPECT_TRUE(membership_sdr(o.point.Q, q, 1e-8).member);
}

TEST(Branching, ChildrenPartitionTheLongestEdge) {
  Box b{(Vector(3) << -1, -2, 0).finished(), (Vector(3) << 1, 2, 4).finished()};
  auto [l, r] = branch(b);
  EXPECT_EQ(l.upper(1), 0.0);
  EXPECT_EQ(r.lower(1), 0.0);
  EXPECT_EQ(l.lower, b.lower);
  EXPECT_EQ(r.upper, b.upper);
  EXPECT_DOUBLE_EQ(l.volume() + r.volume(), b.volume());
  // Ties go to the lowest index.
  Box t{Vector::Zero(2), Vector::Ones(2)};
  EXPECT_EQ(branch(t).first.upper(0), 0.5);
}

TEST(Branching, ChildSetMembersBelongToParentSet) {
  const LiftedQuadratics& q = tiny_quadratics();
  const Box root = initial_box(q);
  Rng rng = make_rng(22, 0);
  Box cur = root;
  for (int depth = 0; depth < 6; ++depth) {
    auto [a, b] = branch(cur);
    for (const Box* child : {&a, &b})
      for (int s = 0; s < 50; ++s) {
        const LiftedPoint x = random_lifted_point(*child, rng);
        ASSERT_TRUE(membership_S(x, *child).member);
        EXPECT_TRUE(membership_S(x, cur, 1e-12).member);
      }
    cur = depth % 2 ? a : b;
  }
}

TEST(Ccp, TracesAreMonotone) {
  for (const LiftedQuadratics* q : {&tiny_quadratics(), &fig3_quadratics()}) {
    const Box b = initial_box(*q);
    Rng rng = make_rng(23, 0);
    for (int trial = 0; trial < 2; ++trial) {
      const CcpTrace t = ccp_maximize(*q, b, random_lifted_point(b, rng), 1e-3, 30);
      ASSERT_FALSE(t.infeasible);
      ASSERT_GE(t.values.size(), 1u);
      for (std::size_t i = 1; i < t.values.size(); ++i) EXPECT_GE(t.values[i], t.values[i - 1] - 1e-7);
      EXPECT_TRUE(membership_C(t.final_point, b, *q, 1e-8).member);
    }
  }
}

TEST(Randomization, ProducesFeasiblePoints) {
  const LiftedQuadratics& q = fig3_quadratics();
  Rng rng = make_rng(24, 0);
  Matrix w = Matrix::Random(q.n, q.n);
  const RandomizedPoint r = gaussian_randomize(w * w.transpose(), q, 50, rng);
  EXPECT_TRUE(membership_P(r.p, q).member);
  EXPECT_GE(r.value, 0.0);
  EXPECT_NEAR(r.value, secrecy_objective(r.p, q), 1e-12);
  Matrix bad = Matrix::Identity(q.n, q.n);
  bad(0, 0) = -1.0;
  EXPECT_THROW(gaussian_randomize(bad, q, 5, rng), Error);
}

TEST(BranchAndBound, LedgerIsConsistentOnTinyInstance) {
  const Scenario sc = builtin_scenario("tiny");
  const LiftedQuadratics& q = tiny_quadratics();
  BnbOptions opt = bnb_options(sc);
  opt.max_iterations = 8;
  opt.gap_tol = 0.0;
  const BnbReport rep = bnb_maximize(q, opt);
  ASSERT_GE(rep.iterations, 1);
  ASSERT_LE(rep.iterations, 8);
  // Stops early only once the gap is closed.
  if (rep.iterations < 8) EXPECT_LE(rep.gap, opt.gap_tol);
  for (std::size_t i = 0; i < rep.ledger.size(); ++i) {
    const BnbIteration& r = rep.ledger[i];
    EXPECT_EQ(r.iter, static_cast<int>(i) + 1);
    EXPECT_LE(r.L, r.U + 1e-9);
    EXPECT_NEAR(r.gap, r.U - r.L, 1e-15);
    if (i > 0) EXPECT_GE(r.L, rep.ledger[i - 1].L);
  }
  EXPECT_TRUE(membership_P(rep.best_p, q).member);
  EXPECT_NEAR(rep.best_rate, secrecy_objective(rep.best_p, q), 1e-12);
  EXPECT_EQ(rep.best_rate, rep.ledger.back().L);
  EXPECT_EQ(vectorize(rep.best_p1, rep.best_p2), rep.best_p);
}

TEST(BranchAndBound, SameSeedSameLedger) {
  const Scenario sc = builtin_scenario("tiny");
  BnbOptions opt = bnb_options(sc);
  opt.max_iterations = 4;
  const BnbReport a = bnb_maximize(tiny_quadratics(), opt);
  const BnbReport b = bnb_maximize(tiny_quadratics(), opt);
  EXPECT_EQ(a.upper_bounds(), b.upper_bounds());
  EXPECT_EQ(a.lower_bounds(), b.lower_bounds());
}
