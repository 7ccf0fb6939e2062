#pragma once

// Test-only reference computations. Nothing here goes through ProductTensor,
// SkewBracket, or the identity checkers; they work from the defining formulas.

#include <vector>

#include "tpnl/corpus.hpp"
#include "tpnl/core.hpp"

namespace oracle {

using tpnl::ElementVector;
using tpnl::Rational;

/// Product in Q[t]/(t^m) by schoolbook multiplication of coefficient lists.
inline ElementVector poly_mul_trunc(const ElementVector& x, const ElementVector& y) {
  const std::size_t m = x.size();
  ElementVector out(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; i + j < m; ++j) out[i + j] += x[i] * y[j];
  }
  return out;
}

/// Witt-type rule [e_i, e_j] = (j - i) e_{i+j}, zero once i + j >= m, extended bilinearly.
inline ElementVector witt_bracket(const ElementVector& x, const ElementVector& y) {
  const std::size_t m = x.size();
  ElementVector out(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; i + j < m; ++j) {
      out[i + j] += x[i] * y[j] * Rational(static_cast<long>(j) - static_cast<long>(i));
    }
  }
  return out;
}

/// Exponents (i, j) of the monomial s^i t^j stored at `index` in Q[s]/(s^a) (x) Q[t]/(t^b).
inline std::pair<int, int> tensor_exponents(int index, int a) { return {index % a, index / a}; }

/// mu_3 of three monomials built from s d/ds then t d/dt: det[[i2-i1, i3-i1], [j2-j1, j3-j1]]
/// times the product monomial (zero when truncated).
inline ElementVector monomial_mu3(int p, int q, int r, int a, int b) {
  const auto [i1, j1] = tensor_exponents(p, a);
  const auto [i2, j2] = tensor_exponents(q, a);
  const auto [i3, j3] = tensor_exponents(r, a);
  ElementVector out(static_cast<std::size_t>(a * b));
  const int det = (i2 - i1) * (j3 - j1) - (i3 - i1) * (j2 - j1);
  const int si = i1 + i2 + i3, sj = j1 + j2 + j3;
  if (si < a && sj < b) out[static_cast<std::size_t>(sj * a + si)] = det;
  return out;
}

/// Uniform rational with numerator in [-9, 9] and denominator in [1, 5].
inline Rational random_rational(tpnl::SeededDraws& draws) {
  Rational r(mpz_class(draws.uniform(-9, 9)), mpz_class(draws.uniform(1, 5)));
  r.canonicalize();
  return r;
}

inline ElementVector random_vector(std::size_t d, tpnl::SeededDraws& draws) {
  ElementVector v(d);
  for (std::size_t k = 0; k < d; ++k) v[k] = random_rational(draws);
  return v;
}

}  // namespace oracle
