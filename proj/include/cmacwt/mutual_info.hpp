// SPDX-License-Identifier: Apache-2.0
//
// Average constellation-constrained mutual information: a Monte-Carlo
// estimator of the exact expectation and the closed-form approximation.
// Rates are in bits.

#ifndef CMACWT_MUTUAL_INFO_HPP
#define CMACWT_MUTUAL_INFO_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "cmacwt/channel.hpp"
#include "cmacwt/constellation.hpp"
#include "cmacwt/lift.hpp"
#include "cmacwt/rng.hpp"

namespace cmacwt {

struct MiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_channel_samples = 0;
  int n_noise_samples = 0;
};

/// Worker count from CMACWT_WORKERS (default 1). Results never depend on it.
inline int worker_count() {
  if (const char* s = std::getenv("CMACWT_WORKERS")) {
    const int w = std::atoi(s);
    if (w >= 1) return std::min(w, 256);
  }
  return 1;
}

/// Runs body(i) for i in [0, n) on worker_count() threads. body must only
/// write to slot i of caller-owned storage.
template <class Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min(worker_count(), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Monte-Carlo estimate of
///   log2 N - (1/N) sum_m E log2 sum_k exp[(-|H P e_mk + n|^2 + |n|^2) / sigma2]
/// for the link described by `side`. Each channel draw uses its own stream
/// derived from a base seed taken from rng, so the result does not depend on
/// the worker count.
inline MiEstimate mi_exact_mc(const CMatrix& p1, const CMatrix& p2, const LinkSide& side, double sigma2,
                              const SymbolEnumeration& en, int channel_samples, int noise_samples, Rng& rng) {
  if (!(sigma2 > 0.0)) throw Error("mi_exact_mc: sigma2 must be positive");
  if (channel_samples < 1 || noise_samples < 1) throw Error("mi_exact_mc: sample counts must be >= 1");
  if (p1.rows() != en.nt1 || p2.rows() != en.nt2 || p1.cols() != en.nt1 || p2.cols() != en.nt2)
    throw Error("mi_exact_mc: precoder shapes do not match the enumeration");
  const CMatrix phi_sqrt = matrix_sqrt(side.phi);
  const CMatrix psi_sqrt[2] = {matrix_sqrt(side.psi[0]), matrix_sqrt(side.psi[1])};
  const std::uint64_t base = rng();
  const int n = en.count();
  const int nt1 = en.nt1, nt2 = en.nt2;
  const Eigen::Index nrx = side.phi.rows();
  const double noise_std = std::sqrt(sigma2);
  const double log_n = std::log(static_cast<double>(n));

  std::vector<double> per_draw(channel_samples);
  parallel_for(channel_samples, [&](int d) {
    Rng r = make_rng(base, static_cast<std::uint64_t>(d));
    CMatrix hp(nrx, nt1 + nt2);
    hp.leftCols(nt1) = sample_kronecker(phi_sqrt, psi_sqrt[0], r) * p1;
    hp.rightCols(nt2) = sample_kronecker(phi_sqrt, psi_sqrt[1], r) * p2;
    std::vector<CVector> x(n);
    for (int m = 0; m < n; ++m) x[m] = hp * en.vectors[m];
    std::vector<double> expo(n);
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
      for (int s = 0; s < noise_samples; ++s) {
        CVector noise(nrx);
        for (Eigen::Index i = 0; i < nrx; ++i) noise(i) = noise_std * complex_gaussian(r);
        const double nn = noise.squaredNorm();
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
          expo[k] = (nn - (x[m] - x[k] + noise).squaredNorm()) / sigma2;
          mx = std::max(mx, expo[k]);
        }
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += std::exp(expo[k] - mx);
        const double lse = mx + std::log(sum);
        if (!std::isfinite(lse))
          throw Error("mi_exact_mc: non-finite log-sum at channel sample " + std::to_string(d) + ", row " +
                      std::to_string(m) + ", noise sample " + std::to_string(s));
        acc += lse - log_n;
      }
    }
    per_draw[d] = -acc / (n * noise_samples * std::log(2.0));
  });

  double mean = 0.0;
  for (double v : per_draw) mean += v;
  mean /= channel_samples;
  double var = 0.0;
  for (double v : per_draw) var += (v - mean) * (v - mean);
  var = channel_samples > 1 ? var / (channel_samples - 1) : 0.0;
  return {mean, std::sqrt(var / channel_samples), channel_samples, noise_samples};
}

/// Closed-form approximation
///   log2 N - (1/N) sum_m log2 sum_k prod_q (1 + (lambda_q / sigma2) p^T M_mk p)^-1
/// evaluated directly from the stored per-class matrices.
inline double mi_approx(const Vector& p, const LiftedQuadratics& q, Side side, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error("mi_approx: sigma2 must be positive");
  if (p.size() != q.n) throw Error("mi_approx: vector length does not match the quadratics");
  const auto& mats = q.class_matrices(side);
  const Vector lam = side == Side::Legitimate ? q.h : q.g;
  const DifferenceClasses& dc = *q.classes;
  std::vector<double> logt(dc.size());
  for (int c = 0; c < dc.size(); ++c) {
    double t = p.dot(mats[c] * p);
    if (t < -1e-9 * std::max(1.0, p.squaredNorm()))
      throw Error("mi_approx: negative quadratic form " + std::to_string(t) + " for class " + std::to_string(c));
    t = std::max(t, 0.0);
    double s = 0.0;
    for (Eigen::Index j = 0; j < lam.size(); ++j) s -= std::log1p(std::max(lam(j), 0.0) / sigma2 * t);
    logt[c] = s;
  }
  double total = 0.0;
  for (const auto& row : dc.rows) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& [c, cnt] : row) mx = std::max(mx, logt[c]);
    double sum = 0.0;
    for (const auto& [c, cnt] : row) sum += cnt * std::exp(logt[c] - mx);
    total += mx + std::log(sum);
  }
  return std::log2(static_cast<double>(dc.n_vectors)) - total / (dc.n_vectors * std::log(2.0));
}

/// Approximated secrecy sum rate before clamping: legitimate minus eavesdropper.
inline double secrecy_rate_approx(const Vector& p, const LiftedQuadratics& q, double sigma2_r, double sigma2_e) {
  return mi_approx(p, q, Side::Legitimate, sigma2_r) - mi_approx(p, q, Side::Eavesdropper, sigma2_e);
}

inline double secrecy_rate_approx(const Vector& p, const LiftedQuadratics& q) {
  return secrecy_rate_approx(p, q, q.sigma2_r, q.sigma2_e);
}

}  // namespace cmacwt

#endif  // CMACWT_MUTUAL_INFO_HPP
