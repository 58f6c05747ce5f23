// SPDX-License-Identifier: Apache-2.0

#ifndef CMACWT_RNG_HPP
#define CMACWT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "cmacwt/linalg.hpp"

namespace cmacwt {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer). Used wherever work is split into numbered units so
/// results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) { return Rng(derive_seed(base, stream)); }

/// Zero-mean unit-variance circularly symmetric complex Gaussian sample.
inline Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return Complex(re, im) * M_SQRT1_2;
}

inline CMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian(rng);
  return m;
}

inline Vector gaussian_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace cmacwt

#endif  // CMACWT_RNG_HPP
