// SPDX-License-Identifier: Apache-2.0
//
// Global search: convex-concave procedure per node set, rectangle-splitting
// outer approximation, and Gaussian randomization for feasible precoders.

#ifndef CMACWT_OPTIMIZER_HPP
#define CMACWT_OPTIMIZER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cmacwt/lift.hpp"
#include "cmacwt/mutual_info.hpp"
#include "cmacwt/rng.hpp"
#include "cmacwt/subsolver.hpp"

namespace cmacwt {

struct CcpTrace {
  std::vector<double> values;  // s_0 (only when the start lies in the set), s_1, ...
  double initial_value = -std::numeric_limits<double>::infinity();
  int iterations = 0;  // subproblem solves
  bool converged = false;
  bool infeasible = false;
  LiftedPoint final_point;
  double final_objective = -std::numeric_limits<double>::infinity();  // F - G at final_point
  int newton_iterations = 0;
};

/// Generic CCP loop; solve(Qc) maximizes the surrogate linearized at Qc.
template <class Solve>
CcpTrace run_ccp(const LiftedQuadratics& q, const LiftedPoint& start, bool start_member, double epsilon,
                 int max_iterations, Solve&& solve) {
  if (!(epsilon > 0.0)) throw Error("ccp: epsilon must be positive");
  CcpTrace tr;
  tr.final_point = start;
  const SideEval f0 = evaluate_side(q, Side::Eavesdropper, reduced_from_Q(q, Side::Eavesdropper, start.Q));
  const SideEval g0 = evaluate_side(q, Side::Legitimate, reduced_from_Q(q, Side::Legitimate, start.Q));
  if (f0.ok && g0.ok) tr.initial_value = f0.value - g0.value;
  double prev = std::numeric_limits<double>::quiet_NaN();
  if (start_member && f0.ok && g0.ok) {
    tr.values.push_back(tr.initial_value);
    prev = tr.initial_value;
  }
  Matrix Qc = start.Q;
  for (int it = 0; it < max_iterations; ++it) {
    const SolveOutcome out = solve(Qc);
    tr.newton_iterations += out.newton_iterations;
    if (out.status == SolveOutcome::Status::Infeasible) {
      if (it == 0) tr.infeasible = true;
      break;
    }
    ++tr.iterations;
    tr.values.push_back(out.value);
    tr.final_point = out.point;
    if (!std::isnan(prev) && std::abs(out.value - prev) <= epsilon) {
      tr.converged = true;
      break;
    }
    prev = out.value;
    Qc = out.point.Q;
  }
  if (!tr.infeasible) tr.final_objective = dc_objective(tr.final_point.Q, q);
  return tr;
}

/// CCP over C(B) from (Q0, p0); s_0 is part of the trace when (Q0, p0) is in C(B).
inline CcpTrace ccp_maximize(const LiftedQuadratics& q, const Box& box, const LiftedPoint& start, double epsilon,
                             int max_iterations = 100, const SubsolverSettings& cfg = {}) {
  const bool member = membership_C(start, box, q).member;
  return run_ccp(q, start, member, epsilon, max_iterations,
                 [&](const Matrix& Qc) { return solve_concave_subproblem(q, box, Qc, cfg); });
}

inline CcpTrace ccp_maximize(const LiftedQuadratics& q, const Box& box, const Matrix& Q0, double epsilon,
                             int max_iterations = 100, const SubsolverSettings& cfg = {}) {
  return run_ccp(q, LiftedPoint{Q0, Vector::Zero(q.n)}, false, epsilon, max_iterations,
                 [&](const Matrix& Qc) { return solve_concave_subproblem(q, box, Qc, cfg); });
}

/// CCP over the semidefinite relaxation {Q >= 0, trace budgets}.
inline CcpTrace ccp_sdr(const LiftedQuadratics& q, const Matrix& Q0, double epsilon, int max_iterations = 100,
                        const SubsolverSettings& cfg = {}) {
  const bool member = membership_sdr(Q0, q).member;
  return run_ccp(q, LiftedPoint{Q0, Vector::Zero(q.n)}, member, epsilon, max_iterations,
                 [&](const Matrix& Qc) { return solve_sdr_subproblem(q, Qc, cfg); });
}

/// Comparison bound from the semidefinite relaxation (best of Q = 0 and a
/// scaled identity as CCP starts).
inline double solve_sdr_bound(const LiftedQuadratics& q, const CcpSettings& ccp = {}, const SubsolverSettings& cfg = {}) {
  double best = ccp_sdr(q, Matrix::Zero(q.n, q.n), ccp.epsilon, ccp.max_iterations, cfg).final_objective;
  double used = 0.0;
  for (const auto& [m, budget] : q.constraints())
    if (budget > 0.0) used = std::max(used, m->trace() / budget);
  if (used > 0.0) {
    const Matrix Q0 = Matrix::Identity(q.n, q.n) / used;
    best = std::max(best, ccp_sdr(q, Q0, ccp.epsilon, ccp.max_iterations, cfg).final_objective);
  }
  return best;
}

// --- branching -----------------------------------------------------------------

/// Midpoint split of the longest edge; ties go to the lowest index.
inline std::pair<Box, Box> branch(const Box& box) {
  const Vector w = box.width();
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < w.size(); ++i)
    if (w(i) > w(k)) k = i;
  if (!(w.size() > 0 && w(k) > 0.0)) throw Error("branch: box has zero width");
  const double mid = 0.5 * (box.lower(k) + box.upper(k));
  Box a = box, b = box;
  a.upper(k) = mid;
  b.lower(k) = mid;
  return {a, b};
}

// --- randomization ---------------------------------------------------------------

struct RandomizedPoint {
  Vector p;
  double value = 0.0;
};

/// Scales p onto the boundary of P (the tightest constraint becomes active).
/// Returns false when p lies in the null space of every constraint.
inline bool scale_into_feasible(Vector& p, const LiftedQuadratics& q) {
  double worst = 0.0;
  for (const auto& [m, budget] : q.constraints()) {
    const double used = p.dot(*m * p);
    if (used <= 0.0) continue;
    worst = budget > 0.0 ? std::max(worst, used / budget) : std::numeric_limits<double>::infinity();
  }
  if (!(worst > 0.0)) return false;
  if (!std::isfinite(worst)) {
    p.setZero();
    return true;
  }
  p /= std::sqrt(worst);
  return true;
}

inline double secrecy_objective(const Vector& p, const LiftedQuadratics& q) { return f_of_p(p, q) - g_of_p(p, q); }

/// Draws xi ~ N(0, Qopt), scales each into P and keeps the best. p = 0 is the
/// fallback, so the returned value is never negative.
inline RandomizedPoint gaussian_randomize(const Matrix& Qopt, const LiftedQuadratics& q, int draws, Rng& rng) {
  if (draws < 1) throw Error("gaussian_randomize: draws must be >= 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Qopt + Qopt.transpose()));
  const double scale = std::max(1.0, Qopt.cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) < -1e-8 * scale)
    throw Error("gaussian_randomize: covariance is not positive semidefinite (min eigenvalue " +
                std::to_string(es.eigenvalues()(0)) + ")");
  const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  RandomizedPoint best{Vector::Zero(q.n), 0.0};
  if (es.eigenvalues().maxCoeff() <= 0.0) return best;
  for (int l = 0; l < draws; ++l) {
    Vector xi = root * gaussian_vector(q.n, rng);
    if (!scale_into_feasible(xi, q)) continue;
    const double v = secrecy_objective(xi, q);
    if (v > best.value) best = {xi, v};
  }
  return best;
}

/// Best point t d with t in [0, 1]: a coarse scan followed by golden-section
/// refinement around the best scan point. d is usually a boundary point of P,
/// so every candidate is feasible.
inline RandomizedPoint best_on_segment(const Vector& d, const LiftedQuadratics& q, int scan = 24) {
  RandomizedPoint best{Vector::Zero(q.n), 0.0};
  auto value = [&](double t) { return secrecy_objective(t * d, q); };
  int arg = 0;
  for (int i = 1; i <= scan; ++i) {
    const double v = value(static_cast<double>(i) / scan);
    if (v > best.value) {
      best = {(static_cast<double>(i) / scan) * d, v};
      arg = i;
    }
  }
  if (arg == 0) return best;
  double a = static_cast<double>(arg - 1) / scan, b = std::min(1.0, static_cast<double>(arg + 1) / scan);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double v1 = value(x1), v2 = value(x2);
  for (int it = 0; it < 30; ++it) {
    if (v1 > v2) {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - r * (b - a);
      v1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + r * (b - a);
      v2 = value(x2);
    }
  }
  const double t = v1 > v2 ? x1 : x2;
  const double v = std::max(v1, v2);
  if (v > best.value) best = {t * d, v};
  return best;
}

/// Gradient ascent on f - g from a feasible p. Steps that leave P are pulled
/// back radially onto its boundary; only improving steps are taken.
inline RandomizedPoint polish_point(const Vector& p0, const LiftedQuadratics& q, int max_steps = 60) {
  RandomizedPoint cur{p0, secrecy_objective(p0, q)};
  auto grad = [&](const Vector& p) {
    const Matrix Q = p * p.transpose();
    const SideEval f = evaluate_side(q, Side::Eavesdropper, reduced_from_Q(q, Side::Eavesdropper, Q), 1);
    const SideEval g = evaluate_side(q, Side::Legitimate, reduced_from_Q(q, Side::Legitimate, Q), 1);
    return Vector(2.0 * (lift_gradient(q, Side::Eavesdropper, f.grad) - lift_gradient(q, Side::Legitimate, g.grad)) * p);
  };
  double step = 1.0;
  for (int it = 0; it < max_steps; ++it) {
    const Vector d = grad(cur.p);
    if (!(d.norm() > 0.0)) break;
    bool moved = false;
    while (step * d.norm() > 1e-12) {
      Vector trial = cur.p + step * d;
      if (!membership_P(trial, q, 0.0).member) scale_into_feasible(trial, q);
      const double v = secrecy_objective(trial, q);
      if (v > cur.value) {
        moved = v - cur.value > 1e-13;
        cur = {trial, v};
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return cur;
}

// --- outer approximation -----------------------------------------------------------

struct BnbNode {
  enum class Status { Open, Split, PrunedInfeasible };
  int id = 0;
  int parent = -1;
  Box box;
  double bound = -std::numeric_limits<double>::infinity();
  LiftedPoint solution;
  Status status = Status::Open;
};

struct BnbIteration {
  int iter = 0;
  double U = 0.0, L = 0.0, gap = 0.0;
  int boxes_open = 0;
  double wall_ms = 0.0;
};

struct BnbReport {
  std::vector<BnbIteration> ledger;
  Vector best_p;
  CMatrix best_p1, best_p2;
  double best_rate = 0.0;  // f - g at best_p (unclamped)
  int iterations = 0;
  double gap = 0.0;
  int nodes = 0;
  std::vector<BnbNode> tree;

  std::vector<double> upper_bounds() const {
    std::vector<double> u;
    for (const auto& r : ledger) u.push_back(r.U);
    return u;
  }
  std::vector<double> lower_bounds() const {
    std::vector<double> l;
    for (const auto& r : ledger) l.push_back(r.L);
    return l;
  }
};

struct BnbOptions {
  int max_iterations = 40;
  double gap_tol = 0.002;
  CcpSettings ccp;
  SubsolverSettings subsolver;
  int randomization_draws = 100;
  std::uint64_t seed = 1;
  bool keep_tree = false;
};

inline BnbOptions bnb_options(const Scenario& s) {
  BnbOptions o;
  o.max_iterations = s.solver.bnb.max_iterations;
  o.gap_tol = s.solver.bnb.gap_tol;
  o.ccp = s.solver.ccp;
  o.subsolver = s.solver.subsolver;
  o.randomization_draws = s.solver.randomization.draws;
  o.seed = s.seed;
  return o;
}

/// Rank-one lifted points p_i p_i^T averaged with random weights; p_i uniform
/// in the box. The result lies in S(B) with Q >= p p^T.
inline LiftedPoint random_lifted_point(const Box& box, Rng& rng, int terms = 0) {
  const Eigen::Index n = box.dim();
  if (terms <= 0) terms = static_cast<int>(n);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::exponential_distribution<double> ex(1.0);
  LiftedPoint pt{Matrix::Zero(n, n), Vector::Zero(n)};
  std::vector<double> w(terms);
  double total = 0.0;
  for (double& v : w) total += (v = ex(rng));
  for (int t = 0; t < terms; ++t) {
    Vector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = box.lower(i) + uni(rng) * (box.upper(i) - box.lower(i));
    pt.Q += (w[t] / total) * p * p.transpose();
    pt.p += (w[t] / total) * p;
  }
  return pt;
}

namespace detail {

struct NodeResult {
  bool infeasible = true;
  double value = -std::numeric_limits<double>::infinity();
  LiftedPoint point;
};

/// Multi-start CCP on C(B): delta I, box center, one random start, and the
/// incumbent when it lies in the box.
inline NodeResult solve_node(const LiftedQuadratics& q, const Box& box, const BnbOptions& opt, Rng& rng,
                             const Vector* incumbent) {
  std::vector<LiftedPoint> starts;
  const Vector c = box.center();
  double half = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < box.dim(); ++i)
    if (box.upper(i) > box.lower(i)) half = std::min(half, 0.5 * (box.upper(i) - box.lower(i)));
  const double delta = std::isfinite(half) ? 0.25 * half * half : 0.0;
  starts.push_back({delta * Matrix::Identity(q.n, q.n), Vector::Zero(q.n)});
  LiftedPoint center = LiftedPoint::rank_one(c);
  center.Q.diagonal().array() += delta;
  starts.push_back(center);
  for (int k = 2; k < opt.ccp.starts; ++k) starts.push_back(random_lifted_point(box, rng));
  if (incumbent && box.contains(*incumbent)) starts.push_back(LiftedPoint::rank_one(*incumbent));
  if (opt.ccp.starts < 2) starts.resize(1);

  NodeResult best;
  for (const LiftedPoint& s : starts) {
    const CcpTrace tr = ccp_maximize(q, box, s, opt.ccp.epsilon, opt.ccp.max_iterations, opt.subsolver);
    if (tr.infeasible) return best;  // C(B) empty: no start can help
    if (best.infeasible || tr.final_objective > best.value) {
      best.infeasible = false;
      best.value = tr.final_objective;
      best.point = tr.final_point;
    }
  }
  return best;
}

}  // namespace detail

inline BnbReport bnb_maximize(const LiftedQuadratics& q, const BnbOptions& opt) {
  if (opt.max_iterations < 1) throw Error("bnb_maximize: max_iterations must be >= 1");
  const auto t_start = std::chrono::steady_clock::now();
  BnbReport rep;
  std::vector<BnbNode> nodes;
  Vector best_p = Vector::Zero(q.n);
  double best_val = 0.0;  // p = 0 is always feasible

  auto consider = [&](const Vector& p) {
    const double v = secrecy_objective(p, q);
    if (v > best_val) {
      best_val = v;
      best_p = p;
    }
  };
  auto evaluate = [&](BnbNode& node, double parent_bound) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(node.id));
    const detail::NodeResult r = detail::solve_node(q, node.box, opt, rng, &best_p);
    if (r.infeasible) {
      node.status = BnbNode::Status::PrunedInfeasible;
      return;
    }
    node.solution = r.point;
    node.bound = std::min(r.value, parent_bound);
    const RandomizedPoint rp = gaussian_randomize(r.point.Q, q, opt.randomization_draws, rng);
    consider(rp.p);
    // Randomized points sit on the boundary of P; the optimum may be interior,
    // so also search the segments toward a few boundary directions.
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r.point.Q + r.point.Q.transpose()));
    const Vector dominant = es.eigenvectors().col(q.n - 1);
    RandomizedPoint local = rp;
    for (Vector d : {rp.p, r.point.p, dominant})
      if (scale_into_feasible(d, q)) {
        const RandomizedPoint s = best_on_segment(d, q);
        if (s.value > local.value) local = s;
      }
    consider(polish_point(local.p, q).p);
  };
  auto raise_bounds = [&]() {
    // A feasible point inside a box certifies that its set reaches that value.
    for (BnbNode& n : nodes)
      if (n.status == BnbNode::Status::Open && n.box.contains(best_p)) n.bound = std::max(n.bound, best_val);
  };

  BnbNode root;
  root.id = 0;
  root.box = initial_box(q);
  nodes.push_back(root);
  evaluate(nodes[0], std::numeric_limits<double>::infinity());

  for (int k = 1; k <= opt.max_iterations; ++k) {
    if (k > 1) {
      int sel = -1;
      for (const BnbNode& n : nodes)
        if (n.status == BnbNode::Status::Open && (sel < 0 || n.bound > nodes[sel].bound)) sel = n.id;
      if (sel >= 0 && nodes[sel].box.width().maxCoeff() > 0.0) {
        auto [a, b] = branch(nodes[sel].box);
        nodes[sel].status = BnbNode::Status::Split;
        const double pb = nodes[sel].bound;
        for (Box* bx : {&a, &b}) {
          BnbNode child;
          child.id = static_cast<int>(nodes.size());
          child.parent = sel;
          child.box = *bx;
          nodes.push_back(child);
          evaluate(nodes.back(), pb);
        }
      }
    }
    raise_bounds();
    double U = -std::numeric_limits<double>::infinity();
    int open = 0;
    for (const BnbNode& n : nodes)
      if (n.status == BnbNode::Status::Open) {
        ++open;
        U = std::max(U, n.bound);
      }
    if (open == 0) U = best_val;  // every set pruned: only p = 0 remains
    BnbIteration row;
    row.iter = k;
    row.U = U;
    row.L = best_val;
    row.gap = U - best_val;
    row.boxes_open = open;
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    rep.ledger.push_back(row);
    if (row.gap <= opt.gap_tol) break;
  }

  rep.iterations = static_cast<int>(rep.ledger.size());
  rep.gap = rep.ledger.back().gap;
  rep.best_p = best_p;
  rep.best_rate = best_val;
  auto [p1, p2] = devectorize(best_p, q.nt1, q.nt2);
  rep.best_p1 = p1;
  rep.best_p2 = p2;
  rep.nodes = static_cast<int>(nodes.size());
  if (opt.keep_tree) rep.tree = std::move(nodes);
  return rep;
}

inline BnbReport bnb_maximize(const Scenario& s, const LiftedQuadratics& q) { return bnb_maximize(q, bnb_options(s)); }

}  // namespace cmacwt

#endif  // CMACWT_OPTIMIZER_HPP
