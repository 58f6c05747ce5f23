// SPDX-License-Identifier: Apache-2.0
//
// Log-barrier Newton method for small dense problems of the form
//
//   maximize    obj(x)                    (concave, twice differentiable)
//   subject to  a_i^T x <= b_i            (sparse rows)
//               X_l(x) = X_l0 + sum_k x_k X_lk  >  0   (affine LMIs)
//
// starting from a strictly feasible point.

#ifndef CMACWT_BARRIER_HPP
#define CMACWT_BARRIER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "cmacwt/linalg.hpp"
#include "cmacwt/scenario.hpp"

namespace cmacwt {

struct SparseRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;

  double slack(const Vector& x) const {
    double s = rhs;
    for (const auto& [k, a] : terms) s -= a * x(k);
    return s;
  }
  double dot(const Vector& d) const {
    double s = 0.0;
    for (const auto& [k, a] : terms) s += a * d(k);
    return s;
  }
};

/// c (e_i e_j^T + e_j e_i^T); a diagonal entry v is therefore {i, i, v / 2}.
struct SymEntry {
  int i = 0, j = 0;
  double c = 0.0;
};

struct AffineLmi {
  Matrix base;
  std::vector<std::vector<SymEntry>> terms;  // per variable

  Matrix at(const Vector& x) const {
    Matrix m = base;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (x(k) == 0.0) continue;
      for (const SymEntry& e : terms[k]) {
        m(e.i, e.j) += e.c * x(k);
        m(e.j, e.i) += e.c * x(k);
      }
    }
    return m;
  }
  /// Directional part sum_k d_k X_k.
  Matrix direction(const Vector& d) const {
    Matrix m = Matrix::Zero(base.rows(), base.cols());
    for (std::size_t k = 0; k < terms.size(); ++k)
      for (const SymEntry& e : terms[k]) {
        m(e.i, e.j) += e.c * d(k);
        m(e.j, e.i) += e.c * d(k);
      }
    return m;
  }
};

struct ObjectiveEval {
  bool ok = true;  // false when x lies outside the objective's domain
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

struct BarrierProblem {
  int n_vars = 0;
  std::vector<SparseRow> rows;
  std::vector<AffineLmi> lmis;
  std::function<ObjectiveEval(const Vector&, int)> objective;  // order 0, 1 or 2
  std::function<bool(const Vector&)> stop_early;                // optional
};

struct BarrierResult {
  enum class Status { Optimal, MaxIterations, StoppedEarly, NotStrictlyFeasible };
  Status status = Status::NotStrictlyFeasible;
  Vector x;
  double value = -std::numeric_limits<double>::infinity();
  double duality_gap = std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::infinity();
  double min_slack = 0.0;  // smallest linear slack or LMI eigenvalue at x
  int newton_iterations = 0;
};

namespace detail {

struct BarrierState {
  bool ok = false;
  double psi = 0.0;  // -t obj - sum log s - sum logdet X
  double obj = 0.0;
};

inline bool lmi_logdet(const AffineLmi& lmi, const Vector& x, double& logdet, Matrix* inverse) {
  const Matrix m = lmi.at(x);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) return false;
  logdet = 2.0 * diag.array().log().sum();
  if (inverse) *inverse = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return std::isfinite(logdet);
}

inline BarrierState barrier_value(const BarrierProblem& pb, const Vector& x, double t) {
  BarrierState st;
  double psi = 0.0;
  for (const SparseRow& r : pb.rows) {
    const double s = r.slack(x);
    if (!(s > 0.0)) return st;
    psi -= std::log(s);
  }
  for (const AffineLmi& l : pb.lmis) {
    double ld;
    if (!lmi_logdet(l, x, ld, nullptr)) return st;
    psi -= ld;
  }
  const ObjectiveEval ev = pb.objective(x, 0);
  if (!ev.ok || !std::isfinite(ev.value)) return st;
  st.ok = true;
  st.obj = ev.value;
  st.psi = psi - t * ev.value;
  return st;
}

inline double min_margin(const BarrierProblem& pb, const Vector& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const SparseRow& r : pb.rows) m = std::min(m, r.slack(x));
  for (const AffineLmi& l : pb.lmis) m = std::min(m, min_eigenvalue(l.at(x)));
  return m;
}

}  // namespace detail

inline double barrier_weight(const BarrierProblem& pb) {
  double m = static_cast<double>(pb.rows.size());
  for (const AffineLmi& l : pb.lmis) m += static_cast<double>(l.base.rows());
  return m;
}

/// Maximizes pb.objective from the strictly feasible x0.
inline BarrierResult barrier_maximize(const BarrierProblem& pb, const Vector& x0, const SubsolverSettings& cfg) {
  BarrierResult res;
  res.x = x0;
  const int nv = pb.n_vars;
  double t = cfg.t0;
  if (!detail::barrier_value(pb, x0, t).ok) return res;

  const double m = barrier_weight(pb);
  Vector x = x0;
  bool capped = false;
  double last_decrement = 0.0;

  while (true) {
    int steps = 0;
    while (true) {
      // Gradient and Hessian of psi_t.
      ObjectiveEval ev = pb.objective(x, 2);
      Vector grad = -t * ev.grad;
      Matrix hess = -t * ev.hess;
      for (const SparseRow& r : pb.rows) {
        const double s = r.slack(x);
        for (const auto& [k, a] : r.terms) grad(k) += a / s;
        for (const auto& [k, a] : r.terms)
          for (const auto& [l, b] : r.terms) hess(k, l) += a * b / (s * s);
      }
      for (const AffineLmi& lmi : pb.lmis) {
        double ld;
        Matrix Y;
        detail::lmi_logdet(lmi, x, ld, &Y);
        // d/dx_k (-logdet X) = -tr(Y X_k); d2 = tr(Y X_k Y X_l).
        std::vector<int> active;
        for (int k = 0; k < nv; ++k) {
          if (lmi.terms[k].empty()) continue;
          active.push_back(k);
          double g = 0.0;
          for (const SymEntry& e : lmi.terms[k]) g += 2.0 * e.c * Y(e.i, e.j);
          grad(k) -= g;
        }
        for (std::size_t ia = 0; ia < active.size(); ++ia) {
          const int k = active[ia];
          for (std::size_t ib = ia; ib < active.size(); ++ib) {
            const int l = active[ib];
            double h = 0.0;
            for (const SymEntry& e : lmi.terms[k])
              for (const SymEntry& f : lmi.terms[l])
                h += 2.0 * e.c * f.c * (Y(e.i, f.i) * Y(e.j, f.j) + Y(e.i, f.j) * Y(e.j, f.i));
            hess(k, l) += h;
            if (k != l) hess(l, k) += h;
          }
        }
      }

      // Newton direction, with a growing ridge when the Hessian is singular.
      Vector dx;
      double ridge = 0.0;
      const double scale = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 12; ++attempt) {
        Matrix h = hess;
        if (ridge > 0.0) h.diagonal().array() += ridge;
        Eigen::LLT<Matrix> llt(h);
        if (llt.info() == Eigen::Success) {
          dx = -llt.solve(grad);
          if (dx.allFinite()) break;
        }
        ridge = ridge == 0.0 ? 1e-14 * scale : ridge * 100.0;
        dx.resize(0);
      }
      if (dx.size() == 0) break;
      const double lambda2 = -grad.dot(dx);
      last_decrement = lambda2;
      // Relative floor: psi_t carries t * obj, so rounding noise grows with t.
      if (!(lambda2 > 0.0) || lambda2 / 2.0 <= cfg.newton_tol + 1e-14 * t) break;
      if (steps >= cfg.max_newton) {
        capped = true;
        break;
      }

      // Largest step keeping linear rows strictly feasible.
      double step = 1.0;
      for (const SparseRow& r : pb.rows) {
        const double ad = r.dot(dx);
        if (ad > 0.0) step = std::min(step, 0.99 * r.slack(x) / ad);
      }
      const detail::BarrierState cur = detail::barrier_value(pb, x, t);
      bool moved = false;
      while (step > 1e-14) {
        const Vector xn = x + step * dx;
        const detail::BarrierState nx = detail::barrier_value(pb, xn, t);
        if (nx.ok && nx.psi <= cur.psi + cfg.ls_alpha * step * grad.dot(dx)) {
          x = xn;
          moved = true;
          break;
        }
        step *= cfg.ls_beta;
      }
      ++steps;
      ++res.newton_iterations;
      if (pb.stop_early && pb.stop_early(x)) {
        res.status = BarrierResult::Status::StoppedEarly;
        res.x = x;
        res.value = pb.objective(x, 0).value;
        res.min_slack = detail::min_margin(pb, x);
        return res;
      }
      if (!moved) break;  // numerical floor: no further decrease representable
    }
    if (capped) break;
    if (m / t < cfg.gap_tol) break;
    t *= cfg.mu;
  }

  res.x = x;
  res.value = pb.objective(x, 0).value;
  res.duality_gap = m / t;
  res.kkt_residual = m / t + std::sqrt(std::max(last_decrement, 0.0)) / t;
  res.min_slack = detail::min_margin(pb, x);
  res.status = capped ? BarrierResult::Status::MaxIterations : BarrierResult::Status::Optimal;
  return res;
}

}  // namespace cmacwt

#endif  // CMACWT_BARRIER_HPP
