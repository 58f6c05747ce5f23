// SPDX-License-Identifier: Apache-2.0
//
// Kronecker-correlated Rayleigh fading: correlation matrices, channel draws
// for the Monte-Carlo oracles, and the closed-form average interference power.

#ifndef CMACWT_CHANNEL_HPP
#define CMACWT_CHANNEL_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cmacwt/linalg.hpp"
#include "cmacwt/rng.hpp"

namespace cmacwt {

/// Exponential correlation model, entry (i, j) = rho^|i-j|.
inline CMatrix exp_correlation(double rho, int n) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error("exp_correlation: rho must lie in [0, 1), got " + std::to_string(rho));
  if (n < 1) throw Error("exp_correlation: dimension must be >= 1");
  CMatrix c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = std::pow(rho, std::abs(i - j));
  return c;
}

/// Receive correlation, transmit correlations and noise of one receiving link.
/// Used for the legitimate receiver and the eavesdropper alike.
struct LinkSide {
  CMatrix phi;                 // receive correlation
  std::array<CMatrix, 2> psi;  // transmit correlation per transmitter
  double sigma2 = 1.0;
};

struct CorrelationSet {
  CMatrix phi_h, phi_g;
  std::array<CMatrix, 2> psi_h, psi_g;
  std::vector<CMatrix> phi_f;                 // per primary receiver j
  std::vector<std::array<CMatrix, 2>> psi_f;  // psi_f[j][i]

  int n_primary() const { return static_cast<int>(phi_f.size()); }

  /// Checks the Hermitian/PSD invariants; returns an empty string when valid.
  std::string check() const {
    auto check_one = [](const CMatrix& m, const std::string& name) -> std::string {
      if (m.rows() == 0 || m.rows() != m.cols()) return name + " must be a non-empty square matrix";
      if (hermitian_defect(m) > 1e-12) return name + " is not Hermitian";
      if (hermitian_eigenvalues(m)(0) < -1e-10) return name + " is not positive semidefinite";
      return {};
    };
    std::string err;
    auto add = [&](const CMatrix& m, const std::string& name) {
      if (err.empty()) err = check_one(m, name);
    };
    add(phi_h, "phi_h");
    add(phi_g, "phi_g");
    for (int i = 0; i < 2; ++i) {
      add(psi_h[i], "psi_h[" + std::to_string(i) + "]");
      add(psi_g[i], "psi_g[" + std::to_string(i) + "]");
    }
    if (psi_f.size() != phi_f.size() && err.empty()) err = "psi_f and phi_f sizes differ";
    for (std::size_t j = 0; j < phi_f.size() && err.empty(); ++j) {
      add(phi_f[j], "phi_f[" + std::to_string(j) + "]");
      for (int i = 0; i < 2; ++i) add(psi_f[j][i], "psi_f[" + std::to_string(j) + "][" + std::to_string(i) + "]");
    }
    return err;
  }
};

struct ChannelDraw {
  std::array<CMatrix, 2> h, g;
  std::vector<std::array<CMatrix, 2>> f;  // f[j][i]
};

/// One correlated draw Phi^{1/2} W Psi^{1/2} with W i.i.d. CN(0, 1).
inline CMatrix sample_kronecker(const CMatrix& phi_sqrt, const CMatrix& psi_sqrt, Rng& rng) {
  return phi_sqrt * complex_gaussian_matrix(phi_sqrt.rows(), psi_sqrt.rows(), rng) * psi_sqrt;
}

/// Precomputed square roots, so repeated draws cost only the Gaussian matrix.
class ChannelSampler {
 public:
  explicit ChannelSampler(const CorrelationSet& corr) {
    const std::string err = corr.check();
    if (!err.empty()) throw Error("sample_channel: " + err);
    phi_h_ = matrix_sqrt(corr.phi_h);
    phi_g_ = matrix_sqrt(corr.phi_g);
    for (int i = 0; i < 2; ++i) {
      psi_h_[i] = matrix_sqrt(corr.psi_h[i]);
      psi_g_[i] = matrix_sqrt(corr.psi_g[i]);
    }
    for (std::size_t j = 0; j < corr.phi_f.size(); ++j) {
      phi_f_.push_back(matrix_sqrt(corr.phi_f[j]));
      psi_f_.push_back({matrix_sqrt(corr.psi_f[j][0]), matrix_sqrt(corr.psi_f[j][1])});
    }
  }

  ChannelDraw operator()(Rng& rng) const {
    ChannelDraw d;
    for (int i = 0; i < 2; ++i) d.h[i] = sample_kronecker(phi_h_, psi_h_[i], rng);
    for (int i = 0; i < 2; ++i) d.g[i] = sample_kronecker(phi_g_, psi_g_[i], rng);
    for (std::size_t j = 0; j < phi_f_.size(); ++j)
      d.f.push_back({sample_kronecker(phi_f_[j], psi_f_[j][0], rng), sample_kronecker(phi_f_[j], psi_f_[j][1], rng)});
    return d;
  }

 private:
  CMatrix phi_h_, phi_g_;
  std::array<CMatrix, 2> psi_h_, psi_g_;
  std::vector<CMatrix> phi_f_;
  std::vector<std::array<CMatrix, 2>> psi_f_;
};

inline ChannelDraw sample_channel(const CorrelationSet& corr, Rng& rng) { return ChannelSampler(corr)(rng); }

/// Average interference power tr(Phi_f) * sum_i tr(P_i^H Psi_fi P_i) at one
/// primary receiver.
inline double interference_closed_form(const CMatrix& p1, const CMatrix& p2, const CMatrix& phi_f,
                                       const CMatrix& psi_f1, const CMatrix& psi_f2) {
  if (psi_f1.rows() != p1.rows() || psi_f2.rows() != p2.rows())
    throw Error("interference_closed_form: precoder/correlation dimension mismatch");
  const double tr_phi = phi_f.trace().real();
  const double s = (p1.adjoint() * psi_f1 * p1).trace().real() + (p2.adjoint() * psi_f2 * p2).trace().real();
  return tr_phi * s;
}

}  // namespace cmacwt

#endif  // CMACWT_CHANNEL_HPP
