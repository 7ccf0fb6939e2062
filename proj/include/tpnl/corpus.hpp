#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tpnl/axioms.hpp"
#include "tpnl/core.hpp"

namespace tpnl {

/// Q[t]/(t^m) with basis e_k = t^k, the Euler derivation "euler" (e_k -> k e_k)
/// and the bracket "b1" = derivation_bracket(product, euler).
AlgebraSystem make_truncated_poly(int m);

/// Formal derivative on Q[t]/(t^m): e_k -> k e_{k-1}. Not a derivation of
/// the truncated product; kept as a negative control.
DerivationMatrix formal_derivative(int m);

/// Q[s]/(s^a) (x) Q[t]/(t^b), basis s^i t^j at index j*a + i, derivations
/// "d1" = s d/ds and "d2" = t d/dt, bracket "b_d1" = derivation_bracket(product, d1).
AlgebraSystem make_tensor_trunc(int a, int b);

/// The given product with the identically zero n-bracket named "zero".
AlgebraSystem make_zero_bracket_system(const ProductTensor& p, int n);

/// Deterministic stream of small integers built on mt19937_64. Draws are
/// reduced by rejection so the output does not depend on the standard
/// library's distribution implementations.
class SeededDraws {
 public:
  explicit SeededDraws(std::uint64_t seed);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  /// True with probability `p` (0 <= p <= 1).
  bool bernoulli(const Rational& p);
  /// Numerator uniform in {-3..3}, denominator 1.
  Rational small_rational();

 private:
  std::mt19937_64 engine_;
};

/// Random commutative product (constants drawn for i <= j and mirrored),
/// random skew bracket "b" of the given entry density and random candidate
/// derivation "d". No axiom is promised. Pure function of its arguments.
AlgebraSystem random_system(int dim, int arity, const Rational& density, std::uint64_t seed, int max_dim = 12);

/// Rewrites every structure in the basis f_j = sum_i change[i][j] e_i
/// (`change` is row-major d x d). Throws InputError if `change` is singular.
AlgebraSystem change_basis(const AlgebraSystem& sys, const std::vector<Rational>& change);

/// A random invertible d x d matrix with small integer entries.
std::vector<Rational> random_invertible(std::size_t dim, SeededDraws& draws);

/// Seeded transposed Poisson system built from commuting derivations of a
/// truncated two-variable polynomial algebra, then moved to a random basis.
/// Bracket "b" has the requested arity (2..4) and "d" is a derivation of
/// both the product and "b".
AlgebraSystem random_structured_system(int arity, std::uint64_t seed);

struct Finding {
  std::uint64_t trial = 0;
  std::uint64_t trial_seed = 0;
  /// Holds bracket "b", derivation "d" and the extension "b_ext".
  AlgebraSystem system;
  /// ASSOC, NL, TP, DER_MUL, DER_BRK (all pass) then STRONG (fails).
  std::vector<CheckReport> premise_reports;
  /// The NL or TP report of "b_ext" that failed.
  CheckReport failing_report;
};

struct HuntStats {
  std::uint64_t trials = 0;
  std::uint64_t premises_held = 0;  // NL, TP, ASSOC, DER_MUL, DER_BRK all pass
  std::uint64_t strong_failed = 0;  // ...and STRONG fails
};

struct HuntResult {
  std::optional<Finding> finding;
  HuntStats stats;
};

/// Draws random systems looking for a transposed Poisson n-Lie algebra with
/// a derivation that violates STRONG and whose extension breaks NL or TP.
/// Requires arity >= 3. The finding with the smallest trial index wins.
HuntResult hunt_counterexample(int dim, int arity, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

/// Recomputes the premise checks of a finding; true when they all hold as reported.
bool verify_finding(const Finding& finding);

}  // namespace tpnl
