// SPDX-License-Identifier: Apache-2.0
//
// Comparison designs: covariance optimization under Gaussian signaling
// (sample-average rates, solved by CCP), scaled identity precoding, and the
// effective power bound implied by the interference constraints.

#ifndef CMACWT_BASELINES_HPP
#define CMACWT_BASELINES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "cmacwt/barrier.hpp"
#include "cmacwt/channel.hpp"
#include "cmacwt/rng.hpp"
#include "cmacwt/scenario.hpp"
#include "cmacwt/subsolver.hpp"

namespace cmacwt {

struct GaussianDesign {
  std::array<CMatrix, 2> Q;
  std::array<CMatrix, 2> precoders;  // Hermitian square roots of Q
  std::vector<double> trace;         // objective per CCP step, bits
  bool converged = false;
};

namespace detail {

/// Hermitian basis per transmitter, stacked: parameters of Q1 then Q2.
struct CovarianceParam {
  int nt[2];
  std::vector<CMatrix> basis[2];
  int offset[2];
  int n_vars;

  explicit CovarianceParam(int nt1, int nt2) : nt{nt1, nt2} {
    basis[0] = hermitian_basis(nt1);
    basis[1] = hermitian_basis(nt2);
    offset[0] = 0;
    offset[1] = static_cast<int>(basis[0].size());
    n_vars = offset[1] + static_cast<int>(basis[1].size());
  }

  std::array<CMatrix, 2> covariances(const Vector& x) const {
    std::array<CMatrix, 2> q;
    for (int i = 0; i < 2; ++i) {
      q[i] = CMatrix::Zero(nt[i], nt[i]);
      for (std::size_t r = 0; r < basis[i].size(); ++r) q[i] += x(offset[i] + r) * basis[i][r];
    }
    return q;
  }

  Vector encode(const std::array<CMatrix, 2>& q) const {
    Vector x(n_vars);
    for (int i = 0; i < 2; ++i) x.segment(offset[i], basis[i].size()) = hermitian_coordinates(q[i]);
    return x;
  }

  /// tr(M_i Q_i) as a coefficient vector.
  Vector trace_coefficients(int i, const CMatrix& m) const {
    Vector c = Vector::Zero(n_vars);
    for (std::size_t r = 0; r < basis[i].size(); ++r) c(offset[i] + r) = (m * basis[i][r]).trace().real();
    return c;
  }

  /// real_embedding(Q_i) > 0.
  AffineLmi lmi(int i) const {
    const int n = nt[i];
    AffineLmi l;
    l.base = Matrix::Zero(2 * n, 2 * n);
    l.terms.resize(n_vars);
    int r = offset[i];
    for (int a = 0; a < n; ++a) l.terms[r++] = {{a, a, 0.5}, {a + n, a + n, 0.5}};
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        l.terms[r++] = {{a, b, 1.0}, {a + n, b + n, 1.0}};
        l.terms[r++] = {{a, b + n, -1.0}, {b, a + n, 1.0}};
      }
    return l;
  }
};

/// Per-sample log det(I + sum_r x_r K_r) pieces, K_r = H_i E_r H_i^H / sigma2.
struct LogDetSet {
  std::vector<std::vector<CMatrix>> K;  // [sample][var]

  static LogDetSet build(const CovarianceParam& par, const std::vector<std::array<CMatrix, 2>>& channels, double sigma2) {
    LogDetSet s;
    for (const auto& h : channels) {
      std::vector<CMatrix> ks;
      for (int i = 0; i < 2; ++i)
        for (const CMatrix& e : par.basis[i]) ks.push_back(h[i] * e * h[i].adjoint() / sigma2);
      s.K.push_back(std::move(ks));
    }
    return s;
  }

  /// Mean over samples, in bits.
  ObjectiveEval eval(const Vector& x, int order) const {
    ObjectiveEval out;
    const int nv = static_cast<int>(x.size());
    if (order >= 1) out.grad = Vector::Zero(nv);
    if (order >= 2) out.hess = Matrix::Zero(nv, nv);
    const double scale = 1.0 / (K.size() * std::log(2.0));
    for (const auto& ks : K) {
      const Eigen::Index d = ks[0].rows();
      CMatrix m = CMatrix::Identity(d, d);
      for (int k = 0; k < nv; ++k) m += x(k) * ks[k];
      m = 0.5 * (m + m.adjoint());
      Eigen::LLT<CMatrix> llt(m);
      if (llt.info() != Eigen::Success) {
        out.ok = false;
        return out;
      }
      out.value += 2.0 * llt.matrixLLT().diagonal().real().array().log().sum() * scale;
      if (order >= 1) {
        const CMatrix inv = llt.solve(CMatrix::Identity(d, d));
        std::vector<CMatrix> ik(nv);
        for (int k = 0; k < nv; ++k) {
          ik[k] = inv * ks[k];
          out.grad(k) += ik[k].trace().real() * scale;
        }
        if (order >= 2)
          for (int k = 0; k < nv; ++k)
            for (int l = k; l < nv; ++l) {
              const double h = -(ik[k].cwiseProduct(ik[l].transpose())).sum().real() * scale;
              out.hess(k, l) += h;
              if (k != l) out.hess(l, k) += h;
            }
      }
    }
    return out;
  }
};

}  // namespace detail

/// Sample-average covariance design: maximize mean R1 - mean R2 over the power
/// and interference constraints; -R2 is linearized at each CCP step.
inline GaussianDesign gaussian_precoding(const Scenario& sc, int n_channel_samples, Rng& rng) {
  if (n_channel_samples < 1) throw Error("gaussian_precoding: sample count must be >= 1");
  const detail::CovarianceParam par(sc.nt1, sc.nt2);
  GaussianDesign out;

  std::vector<SparseRow> rows;
  for (int i = 0; i < 2; ++i)
    rows.push_back(detail::dense_row(par.trace_coefficients(i, CMatrix::Identity(par.nt[i], par.nt[i])), sc.beta[i]));
  for (int j = 0; j < sc.n_primary(); ++j) {
    const double tr_phi = sc.corr.phi_f[j].trace().real();
    const Vector c = tr_phi * (par.trace_coefficients(0, sc.corr.psi_f[j][0]) + par.trace_coefficients(1, sc.corr.psi_f[j][1]));
    rows.push_back(detail::dense_row(c, sc.gamma[j]));
  }

  // Interior start delta I (half the tightest budget); zero budgets force Q = 0.
  Vector unit = par.encode({CMatrix::Identity(sc.nt1, sc.nt1), CMatrix::Identity(sc.nt2, sc.nt2)});
  double delta = std::numeric_limits<double>::infinity();
  for (const SparseRow& r : rows) {
    const double used = r.rhs - r.slack(unit);
    if (used > 0.0) delta = std::min(delta, 0.5 * r.rhs / used);
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    out.Q = {CMatrix::Zero(sc.nt1, sc.nt1), CMatrix::Zero(sc.nt2, sc.nt2)};
    out.precoders = out.Q;
    out.trace = {0.0};
    out.converged = true;
    return out;
  }

  ChannelSampler sampler(sc.corr);
  const std::uint64_t base = rng();
  std::vector<std::array<CMatrix, 2>> hs, gs;
  for (int s = 0; s < n_channel_samples; ++s) {
    Rng r = make_rng(base, static_cast<std::uint64_t>(s));
    const ChannelDraw d = sampler(r);
    hs.push_back(d.h);
    gs.push_back(d.g);
  }
  const detail::LogDetSet r1 = detail::LogDetSet::build(par, hs, sc.sigma2_r);
  const detail::LogDetSet r2 = detail::LogDetSet::build(par, gs, sc.sigma2_e);

  BarrierProblem pb;
  pb.n_vars = par.n_vars;
  pb.rows = rows;
  pb.lmis = {par.lmi(0), par.lmi(1)};
  Vector x = delta * unit;
  const Vector x_start = x;
  auto objective = [&](const Vector& v) { return r1.eval(v, 0).value - r2.eval(v, 0).value; };
  double prev = objective(x);
  out.trace.push_back(prev);
  const int max_it = sc.solver.baseline.max_iterations;
  for (int it = 0; it < max_it; ++it) {
    const ObjectiveEval lin = r2.eval(x, 1);
    const Vector xc = x;
    pb.objective = [&](const Vector& v, int order) {
      ObjectiveEval e = r1.eval(v, order);
      if (!e.ok) return e;
      e.value -= lin.value + lin.grad.dot(v - xc);
      if (order >= 1) e.grad -= lin.grad;
      return e;
    };
    const BarrierResult res = barrier_maximize(pb, x_start, sc.solver.subsolver);
    if (res.status == BarrierResult::Status::NotStrictlyFeasible) throw Error("gaussian_precoding: subproblem start infeasible");
    x = res.x;
    out.trace.push_back(res.value);
    if (std::abs(res.value - prev) <= sc.solver.baseline.ccp_epsilon) {
      out.converged = true;
      break;
    }
    prev = res.value;
  }
  out.Q = par.covariances(x);
  for (int i = 0; i < 2; ++i) {
    out.Q[i] = 0.5 * (out.Q[i] + out.Q[i].adjoint());
    if (hermitian_eigenvalues(out.Q[i])(0) < -1e-8) throw Error("gaussian_precoding: covariance iterate is not PSD");
    out.precoders[i] = matrix_sqrt(out.Q[i]);
  }
  return out;
}

/// Scales a Gaussian design's covariances by `scale` in [0, 1] (manual power
/// back-off); the result stays feasible.
inline std::array<CMatrix, 2> scaled_precoders(const GaussianDesign& d, double scale) {
  if (!(scale >= 0.0 && scale <= 1.0)) throw Error("power scale must lie in [0, 1]");
  return {std::sqrt(scale) * d.precoders[0], std::sqrt(scale) * d.precoders[1]};
}

/// (beta_i / N_Ti) I, scaled down so no interference threshold is exceeded.
/// The factor is clipped at 1 so the power budget still holds.
inline std::array<CMatrix, 2> no_precoding(const Scenario& sc) {
  std::array<CMatrix, 2> p = {(sc.beta[0] / sc.nt1) * CMatrix::Identity(sc.nt1, sc.nt1),
                              (sc.beta[1] / sc.nt2) * CMatrix::Identity(sc.nt2, sc.nt2)};
  double worst = 0.0;
  for (int j = 0; j < sc.n_primary(); ++j) {
    const double load = interference_closed_form(p[0], p[1], sc.corr.phi_f[j], sc.corr.psi_f[j][0], sc.corr.psi_f[j][1]);
    worst = std::max(worst, load / sc.gamma[j]);
  }
  for (int i = 0; i < 2; ++i) {
    const double power = (p[i].adjoint() * p[i]).trace().real();
    if (power > 0.0) worst = std::max(worst, power / sc.beta[i]);
  }
  const double factor = worst > 1.0 ? 1.0 / std::sqrt(worst) : 1.0;
  return {factor * p[0], factor * p[1]};
}

struct PowerBound {
  std::array<double, 2> beta_bar{0.0, 0.0};
  std::array<bool, 2> vacuous{false, false};  // some Psi_f singular: bound falls back to beta_i
};

inline PowerBound effective_power_bound(const Scenario& sc) {
  PowerBound out;
  for (int i = 0; i < 2; ++i) {
    double b = sc.beta[i];
    for (int j = 0; j < sc.n_primary(); ++j) {
      const double lmin = hermitian_eigenvalues(sc.corr.psi_f[j][i])(0);
      const double tr_phi = sc.corr.phi_f[j].trace().real();
      if (lmin <= 1e-14 || tr_phi <= 0.0) {
        out.vacuous[i] = true;
        continue;
      }
      b = std::min(b, sc.gamma[j] / (tr_phi * lmin));
    }
    out.beta_bar[i] = b;
  }
  return out;
}

}  // namespace cmacwt

#endif  // CMACWT_BASELINES_HPP
