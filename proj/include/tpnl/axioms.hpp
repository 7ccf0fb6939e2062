#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpnl/core.hpp"

namespace tpnl {

/// Every identity the workbench can verify. Declaration order is the
/// canonical report order.
enum class IdentityId {
  NL,       // Filippov (fundamental) identity
  TP,       // transposed Leibniz rule
  NP1,      // alternating sum x_i [.. x^_i ..] vanishes
  NP2,      // h[..] moved through the Filippov identity
  NP3,      // alternating products of brackets vanish
  NP4,      // double transposed Leibniz
  STRONG,   // strong condition
  SCALE,    // scaling identity implied by STRONG
  DER_MUL,  // D is a derivation of the product
  DER_BRK,  // D is a derivation of the bracket
  LEM1,     // first auxiliary derivation identity
  LEM2,     // second auxiliary derivation identity
  COMM,     // commutativity of the structure constants
  ASSOC,    // associativity of the structure constants
};

inline constexpr std::array<IdentityId, 14> kAllIdentities = {
    IdentityId::NL,      IdentityId::TP,      IdentityId::NP1,  IdentityId::NP2,    IdentityId::NP3,
    IdentityId::NP4,     IdentityId::STRONG,  IdentityId::SCALE, IdentityId::DER_MUL, IdentityId::DER_BRK,
    IdentityId::LEM1,    IdentityId::LEM2,    IdentityId::COMM, IdentityId::ASSOC};

std::string_view identity_name(IdentityId id);
/// Accepts the names printed by identity_name; throws InputError otherwise.
IdentityId parse_identity(std::string_view name);

bool needs_derivation(IdentityId id);
bool needs_bracket(IdentityId id);

struct Counterexample {
  IndexTuple tuple;        // basis indices in quantifier order (plus output index for COMM/ASSOC)
  ElementVector residual;  // LHS - RHS at that tuple, never zero

  friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

struct CheckReport {
  IdentityId identity = IdentityId::NL;
  bool passed = true;
  /// Full tuple count on a pass; 1-based lexicographic position of the
  /// failing tuple otherwise. Independent of threading.
  std::uint64_t tuples_checked = 0;
  std::optional<Counterexample> counterexample;
  std::chrono::duration<double> elapsed{};

  /// Equality of everything except timing.
  bool same_outcome(const CheckReport& other) const {
    return identity == other.identity && passed == other.passed && tuples_checked == other.tuples_checked &&
           counterexample == other.counterexample;
  }
};

struct CheckOptions {
  /// Restrict each skew-symmetric argument block to non-decreasing index tuples.
  bool prune = false;
  /// Worker threads used to split the tuple range; 1 means sequential.
  unsigned threads = 1;
};

/// The operations an identity is evaluated against. Pointers may be null when
/// the identity does not need that component.
struct IdentityContext {
  const ProductTensor* product = nullptr;
  const SkewBracket* bracket = nullptr;
  const DerivationMatrix* derivation = nullptr;
};

/// Number of quantified elements of `id` for a bracket of the given arity.
std::size_t element_count(IdentityId id, int arity);

/// LHS - RHS of the identity evaluated at arbitrary elements, given in the
/// quantifier order used for basis enumeration.
ElementVector residual(IdentityId id, const IdentityContext& ctx, std::span<const ElementVector> elements);

/// Exhaustive basis-tuple verification of one identity.
CheckReport check_identity(IdentityId id, const IdentityContext& ctx, const CheckOptions& options = {});

std::array<CheckReport, 2> check_commutative_associative(const ProductTensor& p, const CheckOptions& options = {});
CheckReport check_filippov(const SkewBracket& b, const CheckOptions& options = {});
CheckReport check_transposed_leibniz(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options = {});
/// `which` must be one of NP1..NP4.
CheckReport check_np_identity(const ProductTensor& p, const SkewBracket& b, IdentityId which,
                              const CheckOptions& options = {});
CheckReport check_strong(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options = {});
CheckReport check_scale_identity(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options = {});
/// {DER_MUL, DER_BRK}
std::array<CheckReport, 2> check_derivation(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d,
                                            const CheckOptions& options = {});
/// `which` must be LEM1 or LEM2.
CheckReport check_lemma_identity(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d,
                                 IdentityId which, const CheckOptions& options = {});

/// Runs the requested identities in canonical order.
std::vector<CheckReport> run_suite(const AlgebraSystem& sys, const std::string& bracket_name,
                                   const std::optional<std::string>& derivation_name, const std::set<IdentityId>& ids,
                                   const CheckOptions& options = {});

inline bool all_passed(std::span<const CheckReport> reports) {
  for (const auto& r : reports) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace tpnl
