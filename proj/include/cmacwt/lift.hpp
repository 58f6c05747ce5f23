// SPDX-License-Identifier: Apache-2.0
//
// Real vectorized representation of the secrecy-rate problem.
//
// A precoder pair (P1, P2) is flattened into p = [Re p^; Im p^] with
// p^ = [vec(P1); vec(P2)]. Every quadratic form of the problem becomes
// p^T M p for a real symmetric PSD matrix M:
//
//   A_c  legitimate-link matrix of difference class c
//   B_c  eavesdropper-link matrix of difference class c
//   C_i  transmit power of transmitter i
//   D_j  average interference power at primary receiver j
//
// The lifted objective F(Q) - G(Q) replaces p p^T by a symmetric matrix Q.
// F depends on Q only through tr(B_c Q), and each B_c is a fixed linear
// combination of r = N_T1^2 + N_T2^2 basis matrices (one per real parameter
// of the Hermitian matrices (e e^H)^T). Evaluators therefore work in that
// r-dimensional "reduced" space, which makes value, gradient and Hessian
// cheap even with thousands of classes.

#ifndef CMACWT_LIFT_HPP
#define CMACWT_LIFT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cmacwt/constellation.hpp"
#include "cmacwt/linalg.hpp"
#include "cmacwt/scenario.hpp"

namespace cmacwt {

enum class Side { Legitimate, Eavesdropper };

// --- vectorization ---------------------------------------------------------

inline Vector vectorize(const CMatrix& p1, const CMatrix& p2) {
  if (p1.rows() != p1.cols() || p2.rows() != p2.cols()) throw Error("vectorize: precoders must be square");
  const Eigen::Index n1 = p1.size(), n2 = p2.size(), nc = n1 + n2;
  Vector p(2 * nc);
  for (Eigen::Index i = 0; i < n1; ++i) {
    p(i) = p1.data()[i].real();
    p(nc + i) = p1.data()[i].imag();
  }
  for (Eigen::Index i = 0; i < n2; ++i) {
    p(n1 + i) = p2.data()[i].real();
    p(nc + n1 + i) = p2.data()[i].imag();
  }
  return p;
}

inline std::pair<CMatrix, CMatrix> devectorize(const Vector& p, int nt1, int nt2) {
  const int n1 = nt1 * nt1, n2 = nt2 * nt2, nc = n1 + n2;
  if (p.size() != 2 * nc) throw Error("devectorize: vector length does not match the antenna counts");
  CMatrix p1(nt1, nt1), p2(nt2, nt2);
  for (int i = 0; i < n1; ++i) p1.data()[i] = Complex(p(i), p(nc + i));
  for (int i = 0; i < n2; ++i) p2.data()[i] = Complex(p(n1 + i), p(nc + n1 + i));
  return {p1, p2};
}

// --- geometry --------------------------------------------------------------

struct Box {
  Vector lower;
  Vector upper;

  Eigen::Index dim() const { return lower.size(); }
  Vector center() const { return 0.5 * (lower + upper); }
  Vector width() const { return upper - lower; }
  bool contains(const Vector& p, double tol = 0.0) const {
    return ((p - lower).array() >= -tol).all() && ((upper - p).array() >= -tol).all();
  }
  double volume() const { return width().prod(); }
};

struct LiftedPoint {
  Matrix Q;
  Vector p;

  static LiftedPoint rank_one(const Vector& p) { return {p * p.transpose(), p}; }
};

// --- quadratic forms -------------------------------------------------------

struct LiftedQuadratics {
  int nt1 = 0, nt2 = 0;
  int n = 0;  // real dimension
  int n_vectors = 0;
  std::shared_ptr<const DifferenceClasses> classes;

  std::vector<Matrix> A, B;  // one per difference class
  std::array<Matrix, 2> C;
  std::vector<Matrix> D;
  Vector h, g;  // eigenvalues of the receive correlations
  double sigma2_r = 1.0, sigma2_e = 1.0;
  std::array<double, 2> beta{0.0, 0.0};
  std::vector<double> gamma;

  // Reduced representation: M_c = sum_r theta(c, r) * basis[r].
  std::vector<Matrix> basis_a, basis_b;
  Matrix theta;    // classes x r
  Matrix theta_t;  // r x classes, column access for the evaluators

  int n_classes() const { return classes ? classes->size() : 0; }
  int reduced_dim() const { return static_cast<int>(theta.cols()); }
  int n_primary() const { return static_cast<int>(D.size()); }
  const std::vector<Matrix>& basis(Side s) const { return s == Side::Legitimate ? basis_a : basis_b; }
  const std::vector<Matrix>& class_matrices(Side s) const { return s == Side::Legitimate ? A : B; }
  /// lambda_q / sigma^2 for the requested link.
  Vector gains(Side s) const { return s == Side::Legitimate ? Vector(h / sigma2_r) : Vector(g / sigma2_e); }

  /// All (matrix, budget) pairs of the feasible set P, power first.
  std::vector<std::pair<const Matrix*, double>> constraints() const {
    std::vector<std::pair<const Matrix*, double>> out{{&C[0], beta[0]}, {&C[1], beta[1]}};
    for (int j = 0; j < n_primary(); ++j) out.emplace_back(&D[j], gamma[j]);
    return out;
  }
};

namespace detail {

/// Real parameters of an N x N Hermitian matrix: diagonal entries, then for
/// every a < b the real and imaginary parts of entry (a, b).
inline std::vector<CMatrix> hermitian_basis(int dim) {
  std::vector<CMatrix> out;
  for (int a = 0; a < dim; ++a) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(a, a) = 1.0;
    out.push_back(e);
  }
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      CMatrix re = CMatrix::Zero(dim, dim);
      re(a, b) = 1.0;
      re(b, a) = 1.0;
      out.push_back(re);
      CMatrix im = CMatrix::Zero(dim, dim);
      im(a, b) = Complex(0, 1);
      im(b, a) = Complex(0, -1);
      out.push_back(im);
    }
  return out;
}

inline Vector hermitian_coordinates(const CMatrix& m) {
  const int dim = static_cast<int>(m.rows());
  Vector out(dim * dim);
  int r = 0;
  for (int a = 0; a < dim; ++a) out(r++) = m(a, a).real();
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      out(r++) = m(a, b).real();
      out(r++) = m(a, b).imag();
    }
  return out;
}

/// Embeds per-transmitter Kronecker blocks kron(E1, Psi1) and kron(E2, Psi2)
/// (either may be empty) into the real n x n representation.
inline Matrix embed_blocks(const CMatrix& blk1, const CMatrix& blk2, int nt1, int nt2, double scale) {
  const int n1 = nt1 * nt1, n2 = nt2 * nt2;
  CMatrix hat = CMatrix::Zero(n1 + n2, n1 + n2);
  if (blk1.size()) hat.topLeftCorner(n1, n1) = blk1;
  if (blk2.size()) hat.bottomRightCorner(n2, n2) = blk2;
  Matrix out = real_embedding(scale * hat);
  return 0.5 * (out + out.transpose());
}

}  // namespace detail

/// Memory needed to hold the explicit per-class matrices.
inline std::int64_t estimate_quadratics_bytes(int n_classes, int n, int n_vectors) {
  return std::int64_t{2} * n_classes * n * n * 8 + std::int64_t{n_vectors} * n_vectors * 8;
}

inline LiftedQuadratics build_quadratics(const Scenario& sc, std::shared_ptr<const DifferenceClasses> classes) {
  if (std::string e = sc.check(); !e.empty()) throw Error("build_quadratics: invalid scenario: " + e);
  if (!classes || classes->nt1 != sc.nt1 || classes->nt2 != sc.nt2)
    throw Error("build_quadratics: difference classes do not match the scenario");
  LiftedQuadratics q;
  q.nt1 = sc.nt1;
  q.nt2 = sc.nt2;
  q.n = sc.real_dim();
  q.n_vectors = classes->n_vectors;
  const std::int64_t bytes = estimate_quadratics_bytes(classes->size(), q.n, q.n_vectors);
  if (bytes > sc.max_quadratics_bytes)
    throw Error("build_quadratics: estimated " + std::to_string(bytes / (1 << 20)) + " MiB exceeds the cap of " +
                std::to_string(sc.max_quadratics_bytes / (1 << 20)) + " MiB");
  q.classes = classes;
  q.sigma2_r = sc.sigma2_r;
  q.sigma2_e = sc.sigma2_e;
  q.beta = sc.beta;
  q.gamma = sc.gamma;
  q.h = hermitian_eigenvalues(sc.corr.phi_h);
  q.g = hermitian_eigenvalues(sc.corr.phi_g);

  const int nt1 = sc.nt1, nt2 = sc.nt2;
  const CMatrix none;

  // Per-class matrices from (e e^H)^T = conj(e) e^T.
  q.A.reserve(classes->size());
  q.B.reserve(classes->size());
  const int r1 = nt1 * nt1, r2 = nt2 * nt2;
  q.theta.resize(classes->size(), r1 + r2);
  for (int c = 0; c < classes->size(); ++c) {
    const CVector& e = classes->classes[c].e;
    const CVector e1 = e.head(nt1), e2 = e.tail(nt2);
    const CMatrix E1 = e1.conjugate() * e1.transpose();
    const CMatrix E2 = e2.conjugate() * e2.transpose();
    q.A.push_back(detail::embed_blocks(kron(E1, sc.corr.psi_h[0]), kron(E2, sc.corr.psi_h[1]), nt1, nt2, 0.5));
    q.B.push_back(detail::embed_blocks(kron(E1, sc.corr.psi_g[0]), kron(E2, sc.corr.psi_g[1]), nt1, nt2, 0.5));
    q.theta.row(c).head(r1) = detail::hermitian_coordinates(E1).transpose();
    q.theta.row(c).tail(r2) = detail::hermitian_coordinates(E2).transpose();
  }
  q.theta_t = q.theta.transpose();
  for (const CMatrix& eb : detail::hermitian_basis(nt1)) {
    q.basis_a.push_back(detail::embed_blocks(kron(eb, sc.corr.psi_h[0]), none, nt1, nt2, 0.5));
    q.basis_b.push_back(detail::embed_blocks(kron(eb, sc.corr.psi_g[0]), none, nt1, nt2, 0.5));
  }
  for (const CMatrix& eb : detail::hermitian_basis(nt2)) {
    q.basis_a.push_back(detail::embed_blocks(none, kron(eb, sc.corr.psi_h[1]), nt1, nt2, 0.5));
    q.basis_b.push_back(detail::embed_blocks(none, kron(eb, sc.corr.psi_g[1]), nt1, nt2, 0.5));
  }

  const CMatrix I1 = CMatrix::Identity(r1, r1), I2 = CMatrix::Identity(r2, r2);
  q.C[0] = detail::embed_blocks(I1, CMatrix::Zero(r2, r2), nt1, nt2, 1.0);
  q.C[1] = detail::embed_blocks(CMatrix::Zero(r1, r1), I2, nt1, nt2, 1.0);
  for (int j = 0; j < sc.n_primary(); ++j) {
    const double tr_phi = sc.corr.phi_f[j].trace().real();
    q.D.push_back(detail::embed_blocks(kron(CMatrix::Identity(nt1, nt1), sc.corr.psi_f[j][0]),
                                       kron(CMatrix::Identity(nt2, nt2), sc.corr.psi_f[j][1]), nt1, nt2, tr_phi));
  }
  return q;
}

inline LiftedQuadratics build_quadratics(const Scenario& sc) {
  auto classes = std::make_shared<const DifferenceClasses>(difference_classes(sc.enumeration()));
  return build_quadratics(sc, std::move(classes));
}

// --- objective evaluation ----------------------------------------------------

/// Reduced coordinates k_r = tr(basis_r Q).
inline Vector reduced_from_Q(const LiftedQuadratics& q, Side s, const Matrix& Q) {
  const auto& basis = q.basis(s);
  Vector k(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) k(r) = basis[r].cwiseProduct(Q).sum();
  return k;
}

/// Reduced coordinates k_r = p^T basis_r p.
inline Vector reduced_from_p(const LiftedQuadratics& q, Side s, const Vector& p) {
  const auto& basis = q.basis(s);
  Vector k(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) k(r) = p.dot(basis[r] * p);
  return k;
}

/// Value (in bits) of (1/N) sum_m log2 sum_k prod_q (1 + a_q t_mk)^-1 with its
/// gradient and Hessian in reduced coordinates.
struct SideEval {
  bool ok = true;
  int bad_class = -1;
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

inline SideEval evaluate_side(const LiftedQuadratics& q, Side s, const Vector& k, int order = 0) {
  const DifferenceClasses& dc = *q.classes;
  const Vector a = q.gains(s);
  const int nc = dc.size();
  const int r = q.reduced_dim();
  const Vector t = q.theta * k;
  SideEval out;

  std::vector<double> phi(nc), d1(nc), d2(nc);
  for (int c = 0; c < nc; ++c) {
    double lp = 0, g1 = 0, g2 = 0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const double f = 1.0 + a(j) * t(c);
      if (!(f > 0.0)) {
        out.ok = false;
        out.bad_class = c;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      lp -= std::log(f);
      g1 -= a(j) / f;
      g2 += (a(j) / f) * (a(j) / f);
    }
    phi[c] = lp;
    d1[c] = g1;
    d2[c] = g2;
  }

  // Every row holds the zero class (phi = 0), so one global shift keeps all
  // row sums in a safe range unless phi turns large and positive.
  double shift = 0.0;
  for (int c = 0; c < nc; ++c) shift = std::max(shift, phi[c]);
  std::vector<double> ex(nc);
  for (int c = 0; c < nc; ++c) ex[c] = std::exp(phi[c] - shift);

  std::vector<double> weight_total;
  if (order >= 1) {
    out.grad = Vector::Zero(r);
    weight_total.assign(nc, 0.0);
  }
  if (order >= 2) out.hess = Matrix::Zero(r, r);
  Vector gm(r);
  double total = 0.0;
  for (const auto& row : dc.rows) {
    double sum = 0.0;
    for (const auto& [c, cnt] : row) sum += cnt * ex[c];
    if (!(sum > 0.0)) {
      out.ok = false;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    total += shift + std::log(sum);
    if (order >= 1) {
      const double inv = 1.0 / sum;
      if (order >= 2) gm.setZero();
      for (const auto& [c, cnt] : row) {
        const double w = cnt * ex[c] * inv;
        weight_total[c] += w;
        if (order >= 2) gm.noalias() += (w * d1[c]) * q.theta_t.col(c);
      }
      if (order >= 2) out.hess.noalias() -= gm * gm.transpose();
    }
  }
  const double scale = 1.0 / (dc.n_vectors * std::log(2.0));
  out.value = total * scale;
  if (order >= 1) {
    for (int c = 0; c < nc; ++c) {
      if (weight_total[c] == 0.0) continue;
      out.grad.noalias() += (weight_total[c] * d1[c]) * q.theta_t.col(c);
      if (order >= 2) {
        const double dd = weight_total[c] * (d2[c] + d1[c] * d1[c]);
        out.hess.noalias() += dd * q.theta_t.col(c) * q.theta_t.col(c).transpose();
      }
    }
    out.grad *= scale;
    if (order >= 2) {
      out.hess *= scale;
      out.hess = 0.5 * (out.hess + out.hess.transpose());
    }
  }
  return out;
}

namespace detail {
inline double checked_value(const LiftedQuadratics& q, Side s, const Vector& k, const char* what) {
  SideEval e = evaluate_side(q, s, k, 0);
  if (!e.ok)
    throw Error(std::string(what) + ": term 1 + a*tr(M Q) <= 0 for difference class " + std::to_string(e.bad_class) +
                " (point outside the PSD-consistent region)");
  return e.value;
}
}  // namespace detail

/// f(p): eavesdropper-link term, so that f(p) - g(p) is the approximated
/// secrecy sum rate. f(0) = log2 N.
inline double f_of_p(const Vector& p, const LiftedQuadratics& q) {
  return detail::checked_value(q, Side::Eavesdropper, reduced_from_p(q, Side::Eavesdropper, p), "f_of_p");
}
/// g(p): legitimate-link term.
inline double g_of_p(const Vector& p, const LiftedQuadratics& q) {
  return detail::checked_value(q, Side::Legitimate, reduced_from_p(q, Side::Legitimate, p), "g_of_p");
}
inline double F_of_Q(const Matrix& Q, const LiftedQuadratics& q) {
  return detail::checked_value(q, Side::Eavesdropper, reduced_from_Q(q, Side::Eavesdropper, Q), "F_of_Q");
}
inline double G_of_Q(const Matrix& Q, const LiftedQuadratics& q) {
  return detail::checked_value(q, Side::Legitimate, reduced_from_Q(q, Side::Legitimate, Q), "G_of_Q");
}
inline double dc_objective(const Matrix& Q, const LiftedQuadratics& q) { return F_of_Q(Q, q) - G_of_Q(Q, q); }

/// Maps a reduced-space gradient back to the symmetric n x n gradient.
inline Matrix lift_gradient(const LiftedQuadratics& q, Side s, const Vector& grad_k) {
  Matrix out = Matrix::Zero(q.n, q.n);
  const auto& basis = q.basis(s);
  for (std::size_t r = 0; r < basis.size(); ++r) out += grad_k(r) * basis[r];
  return out;
}

/// Analytic gradient of F at Qc (symmetric n x n).
inline Matrix grad_F(const Matrix& Qc, const LiftedQuadratics& q) {
  SideEval e = evaluate_side(q, Side::Eavesdropper, reduced_from_Q(q, Side::Eavesdropper, Qc), 1);
  if (!e.ok) throw Error("grad_F: linearization point outside the domain of F (class " + std::to_string(e.bad_class) + ")");
  return lift_gradient(q, Side::Eavesdropper, e.grad);
}

/// Tangent lower bound F(Qc) + <grad F(Qc), Q - Qc> - G(Q).
inline double surrogate_value(const Matrix& Q, const Matrix& Qc, const LiftedQuadratics& q) {
  const Matrix grad = grad_F(Qc, q);
  return F_of_Q(Qc, q) + grad.cwiseProduct(Q - Qc).sum() - G_of_Q(Q, q);
}

// --- feasible sets -----------------------------------------------------------

/// Tight per-constraint outer box of P: u_i = min over constraints of
/// sqrt(budget * (M^+)_ii), the exact maximum of p_i under that constraint
/// alone. Coordinates outside the range of every constraint are unbounded.
inline Box initial_box(const LiftedQuadratics& q) {
  Vector u = Vector::Constant(q.n, std::numeric_limits<double>::infinity());
  for (const auto& [m, budget] : q.constraints()) {
    if (budget < 0) throw Error("initial_box: negative budget");
    Eigen::SelfAdjointEigenSolver<Matrix> es(*m);
    const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Matrix pinv = Matrix::Zero(q.n, q.n);
    Matrix range_proj = Matrix::Zero(q.n, q.n);
    for (int i = 0; i < q.n; ++i) {
      const double lam = es.eigenvalues()(i);
      if (lam > tol) {
        pinv += (1.0 / lam) * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
        range_proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
      }
    }
    for (int i = 0; i < q.n; ++i) {
      if (std::abs(range_proj(i, i) - 1.0) > 1e-9) continue;  // e_i not in range(M)
      u(i) = std::min(u(i), std::sqrt(budget * pinv(i, i)));
    }
  }
  for (int i = 0; i < q.n; ++i)
    if (!std::isfinite(u(i))) throw Error("initial_box: coordinate " + std::to_string(i) + " is not bounded by any constraint");
  return {-u, u};
}

struct MembershipReport {
  bool member = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst;
  std::vector<std::pair<std::string, double>> margins;  // per constraint family

  void add(const std::string& name, double margin, const std::string& detail_msg = {}) {
    margins.emplace_back(name, margin);
    if (margin < worst_margin) {
      worst_margin = margin;
      worst = detail_msg.empty() ? name : name + ": " + detail_msg;
    }
  }
  void finish(double tol) { member = worst_margin >= -tol; }
};

/// Checks (Q, p) against S(B): the box plus the three elementwise product
/// inequalities implied by (p - l)(p - l)^T >= 0, (p - u)(p - u)^T >= 0 and
/// (p - l)(p - u)^T <= 0.
inline MembershipReport membership_S(const LiftedPoint& x, const Box& box, double tol = 1e-9) {
  MembershipReport rep;
  const Eigen::Index n = box.dim();
  const Vector& p = x.p;
  const Vector& l = box.lower;
  const Vector& u = box.upper;
  double box_margin = std::numeric_limits<double>::infinity();
  std::string box_msg;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = p(i) - l(i), hi = u(i) - p(i);
    if (lo < box_margin) {
      box_margin = lo;
      box_msg = "p[" + std::to_string(i) + "] below lower bound";
    }
    if (hi < box_margin) {
      box_margin = hi;
      box_msg = "p[" + std::to_string(i) + "] above upper bound";
    }
  }
  rep.add("box", box_margin, box_msg);
  double m_ll = INFINITY, m_uu = INFINITY, m_lu = INFINITY;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      m_ll = std::min(m_ll, x.Q(i, j) - l(i) * p(j) - p(i) * l(j) + l(i) * l(j));
      m_uu = std::min(m_uu, x.Q(i, j) - u(i) * p(j) - p(i) * u(j) + u(i) * u(j));
      m_lu = std::min(m_lu, -(x.Q(i, j) - l(i) * p(j) - p(i) * u(j) + l(i) * u(j)));
    }
  rep.add("rlt_lower", m_ll);
  rep.add("rlt_upper", m_uu);
  rep.add("rlt_mixed", m_lu);
  rep.finish(tol);
  return rep;
}

/// Smallest eigenvalue of [[Q, p], [p^T, 1]]; non-negative iff Q >= p p^T.
inline double bordered_min_eigenvalue(const Matrix& Q, const Vector& p) {
  const Eigen::Index n = Q.rows();
  Matrix m(n + 1, n + 1);
  m.topLeftCorner(n, n) = Q;
  m.topRightCorner(n, 1) = p;
  m.bottomLeftCorner(1, n) = p.transpose();
  m(n, n) = 1.0;
  return min_eigenvalue(m);
}

inline void add_budget_margins(MembershipReport& rep, const Matrix& Q, const LiftedQuadratics& q) {
  for (int i = 0; i < 2; ++i) rep.add("power[" + std::to_string(i) + "]", q.beta[i] - q.C[i].cwiseProduct(Q).sum());
  for (int j = 0; j < q.n_primary(); ++j)
    rep.add("interference[" + std::to_string(j) + "]", q.gamma[j] - q.D[j].cwiseProduct(Q).sum());
}

inline MembershipReport membership_C(const LiftedPoint& x, const Box& box, const LiftedQuadratics& q, double tol = 1e-9) {
  MembershipReport rep = membership_S(x, box, tol);
  rep.add("psd", bordered_min_eigenvalue(x.Q, x.p));
  add_budget_margins(rep, x.Q, q);
  rep.finish(tol);
  return rep;
}

/// Membership of Q in the semidefinite relaxation {Q >= 0, trace budgets}.
inline MembershipReport membership_sdr(const Matrix& Q, const LiftedQuadratics& q, double tol = 1e-9) {
  MembershipReport rep;
  rep.add("psd", min_eigenvalue(Q));
  add_budget_margins(rep, Q, q);
  rep.finish(tol);
  return rep;
}

/// Membership of p in the original feasible set P.
inline MembershipReport membership_P(const Vector& p, const LiftedQuadratics& q, double tol = 1e-9) {
  MembershipReport rep;
  add_budget_margins(rep, p * p.transpose(), q);
  rep.finish(tol);
  return rep;
}

/// Convexifying shift k: f + k |p|^2 and g + k |p|^2 are convex for any k at
/// least this large. Kept for reference and property tests only.
inline double dc_shift_k(const LiftedQuadratics& q, const Scenario& sc) {
  double alpha = 0.0;
  for (const DifferenceClass& c : q.classes->classes) alpha += c.total_multiplicity() * c.e.squaredNorm();
  auto side = [](const CMatrix& phi, const std::array<CMatrix, 2>& psi) {
    const double lmax = std::max(hermitian_eigenvalues(psi[0]).maxCoeff(), hermitian_eigenvalues(psi[1]).maxCoeff());
    return phi.trace().real() * lmax;
  };
  return alpha * std::max(side(sc.corr.phi_h, sc.corr.psi_h), side(sc.corr.phi_g, sc.corr.psi_g));
}

}  // namespace cmacwt

#endif  // CMACWT_LIFT_HPP
