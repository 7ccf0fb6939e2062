#pragma once

#include <string>
#include <vector>

#include "tpnl/axioms.hpp"
#include "tpnl/core.hpp"

namespace tpnl {

/// (n+1)-ary bracket mu(x_1..x_{n+1}) = sum_k (-1)^(k-1) D(x_k) [x_1..^x_k..x_{n+1}],
/// stored on increasing tuples. No axiom is verified here.
SkewBracket extend_bracket(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d);

/// Binary bracket [x, y] = x D(y) - y D(x). This is the negative of the
/// formal one-step reading of extend_bracket with an identity 1-bracket.
SkewBracket derivation_bracket(const ProductTensor& p, const DerivationMatrix& d);

struct TowerLevel {
  int step = 0;  // 1-based
  std::string derivation;
  SkewBracket bracket;
  /// Empty unless verification was requested. Holds the structure suite
  /// (NL, TP, NP1-NP4, STRONG, SCALE) of this level and, when a further
  /// step follows, DER_MUL/DER_BRK of that step's derivation against it.
  std::vector<CheckReport> reports;
};

/// The identities checked on every tower level.
std::set<IdentityId> structure_suite();

/// Iterates extend_bracket, one derivation per step. Failing checks are
/// recorded, not raised.
std::vector<TowerLevel> build_tower(const AlgebraSystem& sys, const std::string& seed_bracket,
                                    const std::vector<std::string>& derivation_names, bool verify,
                                    const CheckOptions& options = {});

}  // namespace tpnl
