#pragma once

// Brute-force reference implementations used only by the tests. They follow
// the textbook definitions directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "artkit/core.hpp"

namespace oracle {

using artkit::TestCase;

inline double dist(const TestCase& a, const TestCase& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.dims(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

inline std::vector<double> nn_distances(const std::vector<TestCase>& t) {
  std::vector<double> out(t.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (i != j) out[i] = std::min(out[i], dist(t[i], t[j]));
    }
  }
  return out;
}

inline double dispersion(const std::vector<TestCase>& t) {
  const auto nn = nn_distances(t);
  return *std::max_element(nn.begin(), nn.end());
}

inline double diversity(const std::vector<TestCase>& t) {
  const auto nn = nn_distances(t);
  return std::accumulate(nn.begin(), nn.end(), 0.0);
}

// Sum over all ordered pairs, self-pairs included (they add zero).
inline double divergence(const std::vector<TestCase>& t) {
  double s = 0.0;
  for (const auto& a : t) {
    for (const auto& b : t) s += dist(a, b);
  }
  return s;
}

inline double min_pair(const std::vector<TestCase>& t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) best = std::min(best, dist(t[i], t[j]));
  }
  return best;
}

// Radical inverse by explicit digit list: digits d_0 d_1 ... of i map to
// sum d_k / b^(k+1).
inline double radical_inverse(std::uint64_t i, std::uint32_t b) {
  std::vector<std::uint32_t> digits;
  while (i > 0) {
    digits.push_back(static_cast<std::uint32_t>(i % b));
    i /= b;
  }
  double x = 0.0;
  for (std::size_t k = digits.size(); k-- > 0;) x = (x + digits[k]) / b;
  return x;
}

// Sobol coordinate from the Bratley-Fox recurrence on explicit polynomial
// bits. Dimensions 1..4 of the Joe-Kuo table, written out by hand.
struct SobolDim {
  unsigned s;
  std::vector<unsigned> a;  // a_1 .. a_{s-1}
  std::vector<std::uint64_t> m;
};

inline const std::vector<SobolDim>& sobol_dims() {
  static const std::vector<SobolDim> dims = {
      {0, {}, {}},           // x: all m_k = 1
      {1, {}, {1}},          // x + 1
      {2, {1}, {1, 3}},      // x^2 + x + 1
      {3, {0, 1}, {1, 3, 1}},  // x^3 + x + 1
  };
  return dims;
}

inline double sobol(std::uint64_t i, std::size_t dim) {
  const auto& spec = sobol_dims().at(dim);
  constexpr unsigned kBits = 32;
  std::vector<std::uint64_t> m(kBits + 1, 1);  // m[1..32]
  if (spec.s > 0) {
    for (unsigned k = 1; k <= spec.s; ++k) m[k] = spec.m[k - 1];
    for (unsigned k = spec.s + 1; k <= kBits; ++k) {
      std::uint64_t v = m[k - spec.s] ^ (m[k - spec.s] << spec.s);
      for (unsigned j = 1; j < spec.s; ++j) {
        if (spec.a[j - 1]) v ^= m[k - j] << j;
      }
      m[k] = v;
    }
  }
  // x = XOR over set bits k of i of m_k / 2^k, kept as an integer over 2^32.
  std::uint64_t x = 0;
  for (unsigned k = 1; k <= kBits; ++k) {
    if ((i >> (k - 1)) & 1u) x ^= m[k] << (kBits - k);
  }
  return static_cast<double>(x) / 4294967296.0;
}

// Mann-Whitney U of `a` by enumerating every pair.
inline double mw_u(const std::vector<double>& a, const std::vector<double>& b) {
  double score = 0.0;
  for (double x : a) {
    for (double y : b) score += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return score;
}

inline double a12(const std::vector<double>& a, const std::vector<double>& b) {
  return mw_u(a, b) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// Exact two-sided Mann-Whitney p-value: enumerate every way of choosing
// which |A| of the pooled observations belong to A.
inline double mw_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t k = a.size();
  const double centre = 0.5 * static_cast<double>(a.size() * b.size());
  const double observed = std::abs(mw_u(a, b) - centre);
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  std::size_t hits = 0, total = 0;
  do {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    ++total;
    if (std::abs(mw_u(x, y) - centre) >= observed - 1e-9) ++hits;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
