// SPDX-License-Identifier: Apache-2.0
//
// Concave maximization of the tangent surrogate over the lifted convex set
// C(B), and over the plain semidefinite relaxation {Q >= 0, trace budgets}.
//
// Variables are the upper triangle of Q and the vector p, restricted to the
// coordinates with a non-degenerate box edge. A zero-width coordinate i is
// pinned by S(B) to p_i = c_i and Q_ij = c_i p_j, so it is substituted out.

#ifndef CMACWT_SUBSOLVER_HPP
#define CMACWT_SUBSOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cmacwt/barrier.hpp"
#include "cmacwt/lift.hpp"

namespace cmacwt {

struct SolveOutcome {
  enum class Status { Optimal, Infeasible, MaxIterations };
  Status status = Status::Infeasible;
  LiftedPoint point;
  double value = -std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::infinity();
  double feasibility_margin = -std::numeric_limits<double>::infinity();
  int newton_iterations = 0;
};

inline std::string to_string(SolveOutcome::Status s) {
  switch (s) {
    case SolveOutcome::Status::Optimal: return "Optimal";
    case SolveOutcome::Status::Infeasible: return "Infeasible";
    case SolveOutcome::Status::MaxIterations: return "MaxIterations";
  }
  return "?";
}

/// Maps the free variables x to (Q, p).
class LiftedParam {
 public:
  /// with_p = false drops p entirely (semidefinite relaxation).
  LiftedParam(const Box& box, bool with_p, double zero_width = 1e-12) : n_(static_cast<int>(box.dim())), with_p_(with_p) {
    pos_.assign(n_, -1);
    fixed_ = Vector::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      if (box.upper(i) - box.lower(i) > zero_width) {
        pos_[i] = static_cast<int>(free_.size());
        free_.push_back(i);
      } else {
        fixed_(i) = 0.5 * (box.lower(i) + box.upper(i));
      }
    }
    const int nf = n_free();
    n_q_ = nf * (nf + 1) / 2;
    n_vars_ = n_q_ + (with_p_ ? nf : 0);
  }

  int n() const { return n_; }
  int n_free() const { return static_cast<int>(free_.size()); }
  int n_vars() const { return n_vars_; }
  bool with_p() const { return with_p_; }
  const std::vector<int>& free_coords() const { return free_; }
  double fixed_value(int i) const { return fixed_(i); }

  /// Index of Q_(free a, free b) for positions ia <= ib in the free list.
  int q_var(int ia, int ib) const {
    if (ia > ib) std::swap(ia, ib);
    const int nf = n_free();
    return ia * nf - ia * (ia - 1) / 2 + (ib - ia);
  }
  int p_var(int ia) const { return n_q_ + ia; }

  LiftedPoint point(const Vector& x) const {
    LiftedPoint pt{Matrix::Zero(n_, n_), Vector::Zero(n_)};
    for (int i = 0; i < n_; ++i) {
      if (pos_[i] >= 0)
        pt.p(i) = with_p_ ? x(p_var(pos_[i])) : 0.0;
      else
        pt.p(i) = fixed_(i);
    }
    for (int a = 0; a < n_; ++a)
      for (int b = a; b < n_; ++b) {
        double v;
        if (pos_[a] >= 0 && pos_[b] >= 0)
          v = x(q_var(pos_[a], pos_[b]));
        else if (pos_[a] >= 0)
          v = fixed_(b) * pt.p(a);
        else if (pos_[b] >= 0)
          v = fixed_(a) * pt.p(b);
        else
          v = fixed_(a) * fixed_(b);
        pt.Q(a, b) = v;
        pt.Q(b, a) = v;
      }
    return pt;
  }

  Vector encode(const LiftedPoint& pt) const {
    Vector x(n_vars_);
    const int nf = n_free();
    for (int ia = 0; ia < nf; ++ia) {
      for (int ib = ia; ib < nf; ++ib) x(q_var(ia, ib)) = pt.Q(free_[ia], free_[ib]);
      if (with_p_) x(p_var(ia)) = pt.p(free_[ia]);
    }
    return x;
  }

  /// tr(M Q(x)) = c0 + coef . x
  std::pair<double, Vector> linear(const Matrix& M) const {
    double c0 = 0.0;
    Vector coef = Vector::Zero(n_vars_);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        const double m = M(a, b);
        if (m == 0.0) continue;
        const int ia = pos_[a], ib = pos_[b];
        if (ia >= 0 && ib >= 0)
          coef(q_var(ia, ib)) += m;
        else if (ia >= 0) {
          if (with_p_) coef(p_var(ia)) += m * fixed_(b);
        } else if (ib >= 0) {
          if (with_p_) coef(p_var(ib)) += m * fixed_(a);
        } else {
          c0 += m * fixed_(a) * fixed_(b);
        }
      }
    return {c0, coef};
  }

 private:
  int n_;
  bool with_p_;
  std::vector<int> free_;
  std::vector<int> pos_;
  Vector fixed_;
  int n_q_ = 0;
  int n_vars_ = 0;
};

namespace detail {

inline SparseRow dense_row(const Vector& coef, double rhs) {
  SparseRow r;
  for (Eigen::Index k = 0; k < coef.size(); ++k)
    if (coef(k) != 0.0) r.terms.emplace_back(static_cast<int>(k), coef(k));
  r.rhs = rhs;
  return r;
}

/// Trace budgets tr(M Q) <= b as rows over x.
inline std::vector<SparseRow> budget_rows(const LiftedParam& par, const LiftedQuadratics& q) {
  std::vector<SparseRow> rows;
  for (const auto& [m, budget] : q.constraints()) {
    auto [c0, coef] = par.linear(*m);
    rows.push_back(dense_row(coef, budget - c0));
  }
  return rows;
}

/// Box and the three product families of S(B) over free coordinates.
inline std::vector<SparseRow> box_rows(const LiftedParam& par, const Box& box) {
  std::vector<SparseRow> rows;
  const auto& fr = par.free_coords();
  const int nf = par.n_free();
  const Vector& l = box.lower;
  const Vector& u = box.upper;
  for (int ia = 0; ia < nf; ++ia) {
    const int a = fr[ia];
    rows.push_back({{{par.p_var(ia), 1.0}}, u(a)});
    rows.push_back({{{par.p_var(ia), -1.0}}, -l(a)});
  }
  auto add = [&rows](SparseRow r) {
    // merge duplicate indices (diagonal pairs)
    std::sort(r.terms.begin(), r.terms.end());
    SparseRow m;
    m.rhs = r.rhs;
    for (const auto& t : r.terms) {
      if (!m.terms.empty() && m.terms.back().first == t.first)
        m.terms.back().second += t.second;
      else
        m.terms.push_back(t);
    }
    rows.push_back(std::move(m));
  };
  for (int ia = 0; ia < nf; ++ia)
    for (int ib = 0; ib < nf; ++ib) {
      const int a = fr[ia], b = fr[ib];
      const int qv = par.q_var(ia, ib), pa = par.p_var(ia), pb = par.p_var(ib);
      if (ia <= ib) {
        // (p - l)(p - l)^T >= 0 and (p - u)(p - u)^T >= 0
        add({{{qv, -1.0}, {pb, l(a)}, {pa, l(b)}}, l(a) * l(b)});
        add({{{qv, -1.0}, {pb, u(a)}, {pa, u(b)}}, u(a) * u(b)});
      }
      // (p - l)(p - u)^T <= 0
      add({{{qv, 1.0}, {pb, -l(a)}, {pa, -u(b)}}, -l(a) * u(b)});
    }
  return rows;
}

/// [[Q_FF, p_F], [p_F^T, 1]] > 0, or Q_FF > 0 without p.
inline AffineLmi lifted_lmi(const LiftedParam& par) {
  const int nf = par.n_free();
  const int dim = par.with_p() ? nf + 1 : nf;
  AffineLmi lmi;
  lmi.base = Matrix::Zero(dim, dim);
  if (par.with_p()) lmi.base(nf, nf) = 1.0;
  lmi.terms.resize(par.n_vars());
  for (int ia = 0; ia < nf; ++ia) {
    for (int ib = ia; ib < nf; ++ib) lmi.terms[par.q_var(ia, ib)].push_back({ia, ib, ia == ib ? 0.5 : 1.0});
    if (par.with_p()) lmi.terms[par.p_var(ia)].push_back({ia, nf, 1.0});
  }
  return lmi;
}

inline Matrix reduced_map(const LiftedParam& par, const std::vector<Matrix>& basis, Vector& offset) {
  Matrix K(basis.size(), par.n_vars());
  offset.resize(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    auto [c0, coef] = par.linear(basis[r]);
    K.row(r) = coef.transpose();
    offset(r) = c0;
  }
  return K;
}

/// Tangent surrogate F(Qc) + <grad F(Qc), Q - Qc> - G(Q) expressed over x.
struct SurrogateObjective {
  const LiftedQuadratics* q = nullptr;
  Matrix KA, KB;
  Vector kA0, kB0;
  Vector gradB;     // reduced gradient of F at Qc
  double c = 0.0;   // F(Qc) - gradB . kB(Qc)

  ObjectiveEval operator()(const Vector& x, int order) const {
    ObjectiveEval out;
    const Vector kA = kA0 + KA * x;
    const SideEval e = evaluate_side(*q, Side::Legitimate, kA, order);
    if (!e.ok) {
      out.ok = false;
      return out;
    }
    out.value = c + gradB.dot(kB0 + KB * x) - e.value;
    if (order >= 1) out.grad = KB.transpose() * gradB - KA.transpose() * e.grad;
    if (order >= 2) out.hess = -(KA.transpose() * e.hess * KA);
    return out;
  }
};

inline SurrogateObjective make_surrogate(const LiftedParam& par, const LiftedQuadratics& q, const Matrix& Qc) {
  SurrogateObjective s;
  s.q = &q;
  s.KA = reduced_map(par, q.basis_a, s.kA0);
  s.KB = reduced_map(par, q.basis_b, s.kB0);
  const Vector kc = reduced_from_Q(q, Side::Eavesdropper, Qc);
  const SideEval fe = evaluate_side(q, Side::Eavesdropper, kc, 1);
  if (!fe.ok) throw Error("solve_concave_subproblem: linearization point outside the domain of F");
  s.gradB = fe.grad;
  s.c = fe.value - fe.grad.dot(kc);
  return s;
}

struct PhaseOne {
  bool feasible = false;
  double relax = 0.0;  // amount added to every budget
  Vector x;
  int newton_iterations = 0;
};

/// Finds a strictly feasible point of the budget rows starting from x0, which
/// must satisfy every other row and LMI strictly.
inline PhaseOne phase_one(const BarrierProblem& base, std::size_t n_budget_rows, const Vector& x0,
                          const SubsolverSettings& cfg) {
  PhaseOne out;
  out.x = x0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_budget_rows; ++i) worst = std::max(worst, -base.rows[i].slack(x0));
  if (worst < 0.0) {
    out.feasible = true;
    return out;
  }
  const int nv = base.n_vars;
  BarrierProblem pb;
  pb.n_vars = nv + 1;
  pb.rows = base.rows;
  for (std::size_t i = 0; i < n_budget_rows; ++i) pb.rows[i].terms.emplace_back(nv, -1.0);
  for (const AffineLmi& l : base.lmis) {
    AffineLmi e = l;
    e.terms.emplace_back();
    pb.lmis.push_back(std::move(e));
  }
  pb.objective = [nv](const Vector& x, int order) {
    ObjectiveEval ev;
    ev.value = -x(nv);
    if (order >= 1) {
      ev.grad = Vector::Zero(nv + 1);
      ev.grad(nv) = -1.0;
    }
    if (order >= 2) ev.hess = Matrix::Zero(nv + 1, nv + 1);
    return ev;
  };
  const double target = -1e-8;
  pb.stop_early = [nv, target](const Vector& x) { return x(nv) < target; };
  Vector z(nv + 1);
  z.head(nv) = x0;
  z(nv) = worst + 1.0;
  SubsolverSettings c1 = cfg;
  c1.gap_tol = std::min(cfg.gap_tol, 1e-10);
  const BarrierResult r = barrier_maximize(pb, z, c1);
  out.newton_iterations = r.newton_iterations;
  out.x = r.x.head(nv);
  const double s = r.x(nv);
  if (s < 0.0) {
    out.feasible = true;
  } else if (s <= 1e-9) {
    out.feasible = true;
    out.relax = s + 2e-9;
  }
  return out;
}

inline SolveOutcome finish_outcome(const BarrierResult& r, const LiftedParam& par, const SurrogateObjective& obj,
                                   int extra_newton) {
  SolveOutcome out;
  out.point = par.point(r.x);
  out.value = obj(r.x, 0).value;
  out.kkt_residual = r.kkt_residual;
  out.feasibility_margin = r.min_slack;
  out.newton_iterations = r.newton_iterations + extra_newton;
  out.status = r.status == BarrierResult::Status::Optimal ? SolveOutcome::Status::Optimal
                                                          : SolveOutcome::Status::MaxIterations;
  return out;
}

}  // namespace detail

/// Maximizes surrogate_value(., Qc) over C(B).
inline SolveOutcome solve_concave_subproblem(const LiftedQuadratics& q, const Box& box, const Matrix& Qc,
                                             const SubsolverSettings& cfg = {}) {
  if (box.dim() != q.n) throw Error("solve_concave_subproblem: box dimension mismatch");
  if (((box.upper - box.lower).array() < 0.0).any()) throw Error("solve_concave_subproblem: box has lower > upper");
  const LiftedParam par(box, true);
  const detail::SurrogateObjective obj = detail::make_surrogate(par, q, Qc);

  // Fully pinned box: the only candidate is (c c^T, c).
  if (par.n_vars() == 0) {
    SolveOutcome out;
    const Vector x;
    out.point = par.point(x);
    const MembershipReport rep = membership_C(out.point, box, q, 1e-9);
    if (!rep.member) return out;
    out.status = SolveOutcome::Status::Optimal;
    out.value = obj(x, 0).value;
    out.kkt_residual = 0.0;
    out.feasibility_margin = rep.worst_margin;
    return out;
  }

  BarrierProblem pb;
  pb.n_vars = par.n_vars();
  pb.rows = detail::budget_rows(par, q);
  const std::size_t n_budget = pb.rows.size();
  for (SparseRow& r : detail::box_rows(par, box)) pb.rows.push_back(std::move(r));
  pb.lmis.push_back(detail::lifted_lmi(par));
  pb.objective = [&obj](const Vector& x, int order) { return obj(x, order); };

  // Interior start: p at the box center, Q = p p^T + delta I.
  const Vector c = box.center();
  double half = std::numeric_limits<double>::infinity();
  for (int i : par.free_coords()) half = std::min(half, 0.5 * (box.upper(i) - box.lower(i)));
  const double delta = 0.25 * half * half;
  LiftedPoint start = LiftedPoint::rank_one(c);
  for (int i : par.free_coords()) start.Q(i, i) += delta;
  Vector x0 = par.encode(start);

  const detail::PhaseOne ph = detail::phase_one(pb, n_budget, x0, cfg);
  if (!ph.feasible) {
    SolveOutcome out;
    out.newton_iterations = ph.newton_iterations;
    return out;
  }
  for (std::size_t i = 0; i < n_budget; ++i) pb.rows[i].rhs += ph.relax;
  const BarrierResult r = barrier_maximize(pb, ph.x, cfg);
  if (r.status == BarrierResult::Status::NotStrictlyFeasible) {
    SolveOutcome out;
    out.newton_iterations = ph.newton_iterations;
    return out;
  }
  SolveOutcome out = detail::finish_outcome(r, par, obj, ph.newton_iterations);
  out.feasibility_margin = std::min(out.feasibility_margin, membership_C(out.point, box, q).worst_margin);
  return out;
}

/// Maximizes surrogate_value(., Qc) over {Q >= 0, trace budgets}.
inline SolveOutcome solve_sdr_subproblem(const LiftedQuadratics& q, const Matrix& Qc, const SubsolverSettings& cfg = {}) {
  const Box outer = initial_box(q);
  const LiftedParam par(outer, false);
  const detail::SurrogateObjective obj = detail::make_surrogate(par, q, Qc);
  if (par.n_vars() == 0) {
    SolveOutcome out;
    const Vector x;
    out.point = par.point(x);
    out.status = SolveOutcome::Status::Optimal;
    out.value = obj(x, 0).value;
    out.kkt_residual = 0.0;
    out.feasibility_margin = 0.0;
    return out;
  }
  BarrierProblem pb;
  pb.n_vars = par.n_vars();
  pb.rows = detail::budget_rows(par, q);
  pb.lmis.push_back(detail::lifted_lmi(par));
  pb.objective = [&obj](const Vector& x, int order) { return obj(x, order); };

  // delta I with half of the tightest budget.
  double delta = std::numeric_limits<double>::infinity();
  LiftedPoint unit{Matrix::Zero(q.n, q.n), Vector::Zero(q.n)};
  for (int i : par.free_coords()) unit.Q(i, i) = 1.0;
  const Vector xu = par.encode(unit);
  for (const SparseRow& r : pb.rows) {
    const double used = r.rhs - r.slack(xu);
    if (used > 0.0) delta = std::min(delta, 0.5 * r.rhs / used);
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error("solve_sdr_subproblem: relaxation has an empty interior");
  const BarrierResult r = barrier_maximize(pb, delta * xu, cfg);
  if (r.status == BarrierResult::Status::NotStrictlyFeasible) return {};
  SolveOutcome out = detail::finish_outcome(r, par, obj, 0);
  out.feasibility_margin = std::min(out.feasibility_margin, membership_sdr(out.point.Q, q).worst_margin);
  return out;
}

}  // namespace cmacwt

#endif  // CMACWT_SUBSOLVER_HPP
