// SPDX-License-Identifier: Apache-2.0
//
// Finite input alphabets, composite transmit-vector enumeration and the
// deduplicated difference-vector classes that every mutual-information
// evaluation iterates over.

#ifndef CMACWT_CONSTELLATION_HPP
#define CMACWT_CONSTELLATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cmacwt/linalg.hpp"

namespace cmacwt {

enum class ConstellationKind { BPSK, QPSK, PSK8, QAM16 };

inline std::string to_string(ConstellationKind k) {
  switch (k) {
    case ConstellationKind::BPSK: return "BPSK";
    case ConstellationKind::QPSK: return "QPSK";
    case ConstellationKind::PSK8: return "PSK8";
    case ConstellationKind::QAM16: return "QAM16";
  }
  return "?";
}

inline ConstellationKind parse_constellation_kind(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (u == "BPSK") return ConstellationKind::BPSK;
  if (u == "QPSK" || u == "4PSK") return ConstellationKind::QPSK;
  if (u == "PSK8" || u == "8PSK") return ConstellationKind::PSK8;
  if (u == "QAM16" || u == "16QAM") return ConstellationKind::QAM16;
  throw Error("unsupported constellation '" + s + "' (expected BPSK, QPSK, 8PSK or 16QAM)");
}

struct Constellation {
  ConstellationKind kind;
  std::vector<Complex> points;

  int order() const { return static_cast<int>(points.size()); }
};

/// Unit-energy, zero-mean point sets. Coordinates are drawn from a small
/// canonical table of reals so equal differences are produced bit-exactly.
inline Constellation make_constellation(ConstellationKind kind) {
  Constellation c{kind, {}};
  switch (kind) {
    case ConstellationKind::BPSK:
      c.points = {Complex(1, 0), Complex(-1, 0)};
      break;
    case ConstellationKind::QPSK: {
      const double r = std::sqrt(0.5);
      c.points = {Complex(r, r), Complex(-r, r), Complex(-r, -r), Complex(r, -r)};
      break;
    }
    case ConstellationKind::PSK8: {
      const double r = std::sqrt(0.5);
      c.points = {Complex(1, 0),  Complex(r, r),   Complex(0, 1),  Complex(-r, r),
                  Complex(-1, 0), Complex(-r, -r), Complex(0, -1), Complex(r, -r)};
      break;
    }
    case ConstellationKind::QAM16: {
      const double a = 1.0 / std::sqrt(10.0);
      const std::array<double, 4> levels{-3 * a, -a, a, 3 * a};
      for (double re : levels)
        for (double im : levels) c.points.emplace_back(re, im);
      break;
    }
  }
  Complex sum = 0;
  double energy = 0;
  for (const auto& x : c.points) {
    sum += x;
    energy += std::norm(x);
  }
  const double m = static_cast<double>(c.points.size());
  if (std::abs(energy / m - 1.0) > 1e-12 || std::abs(sum) > 1e-12 * m)
    throw Error("constellation " + to_string(kind) + " violates the unit-energy/zero-mean invariant");
  return c;
}

/// All composite transmit vectors d_m = [s_1; s_2], lexicographic with the
/// first antenna of transmitter 1 most significant.
struct SymbolEnumeration {
  int nt1 = 0;
  int nt2 = 0;
  std::vector<CVector> vectors;

  int count() const { return static_cast<int>(vectors.size()); }
  int dim() const { return nt1 + nt2; }
};

inline constexpr std::int64_t kDefaultMaxVectors = 4096;

inline SymbolEnumeration enumerate_vectors(const Constellation& c1, const Constellation& c2, int nt1, int nt2,
                                           std::int64_t max_vectors = kDefaultMaxVectors) {
  if (nt1 < 1 || nt2 < 1) throw Error("enumerate_vectors: antenna counts must be >= 1");
  double n_real = std::pow(c1.order(), nt1) * std::pow(c2.order(), nt2);
  if (n_real > static_cast<double>(max_vectors))
    throw Error("enumerate_vectors: N = " + std::to_string(static_cast<long long>(n_real)) +
                " composite vectors exceeds the cap of " + std::to_string(max_vectors));
  const int n = static_cast<int>(n_real);
  const int dim = nt1 + nt2;
  SymbolEnumeration out{nt1, nt2, {}};
  out.vectors.reserve(n);
  std::vector<int> digit(dim, 0);
  auto radix = [&](int pos) { return pos < nt1 ? c1.order() : c2.order(); };
  for (int idx = 0; idx < n; ++idx) {
    CVector d(dim);
    for (int pos = 0; pos < dim; ++pos) d(pos) = pos < nt1 ? c1.points[digit[pos]] : c2.points[digit[pos]];
    out.vectors.push_back(std::move(d));
    for (int pos = dim - 1; pos >= 0; --pos) {
      if (++digit[pos] < radix(pos)) break;
      digit[pos] = 0;
    }
  }
  return out;
}

/// One distinct value of d_m - d_k together with the rows it occurs in.
struct DifferenceClass {
  CVector e;
  std::vector<std::pair<int, int>> multiplicity_by_row;  // (row m, count of k)

  CVector e1(int nt1) const { return e.head(nt1); }
  CVector e2(int nt1) const { return e.tail(e.size() - nt1); }
  int total_multiplicity() const {
    int s = 0;
    for (const auto& [m, c] : multiplicity_by_row) s += c;
    return s;
  }
};

/// Classes plus the row view used by evaluators: rows[m] lists (class, count)
/// for every distinct difference d_m - d_k.
struct DifferenceClasses {
  int n_vectors = 0;
  int nt1 = 0;
  int nt2 = 0;
  std::vector<DifferenceClass> classes;
  std::vector<std::vector<std::pair<int, int>>> rows;
  int zero_class = -1;

  int size() const { return static_cast<int>(classes.size()); }
};

inline DifferenceClasses difference_classes(const SymbolEnumeration& en) {
  using Key = std::vector<std::int64_t>;
  auto key_of = [](const CVector& e) {
    Key k(2 * e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      k[2 * i] = std::llround(e(i).real() * 1e12);
      k[2 * i + 1] = std::llround(e(i).imag() * 1e12);
    }
    return k;
  };
  DifferenceClasses out;
  out.n_vectors = en.count();
  out.nt1 = en.nt1;
  out.nt2 = en.nt2;
  out.rows.resize(en.count());
  std::map<Key, int> index;
  for (int m = 0; m < en.count(); ++m) {
    std::map<int, int> row_counts;
    for (int k = 0; k < en.count(); ++k) {
      CVector e = en.vectors[m] - en.vectors[k];
      Key key = key_of(e);
      auto it = index.find(key);
      int cls;
      if (it == index.end()) {
        cls = static_cast<int>(out.classes.size());
        index.emplace(std::move(key), cls);
        out.classes.push_back({std::move(e), {}});
      } else {
        cls = it->second;
      }
      ++row_counts[cls];
    }
    for (const auto& [cls, cnt] : row_counts) {
      out.rows[m].emplace_back(cls, cnt);
      out.classes[cls].multiplicity_by_row.emplace_back(m, cnt);
    }
  }
  for (int c = 0; c < out.size(); ++c)
    if (out.classes[c].e.cwiseAbs().maxCoeff() == 0.0) out.zero_class = c;
  return out;
}

}  // namespace cmacwt

#endif  // CMACWT_CONSTELLATION_HPP
