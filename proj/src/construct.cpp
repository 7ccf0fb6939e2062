#include "tpnl/construct.hpp"

namespace tpnl {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw InputError("component dimensions do not match");
}

/// All strictly increasing tuples of length `len` over [0, dim), lexicographic.
std::vector<IndexTuple> increasing_tuples(std::size_t dim, std::size_t len) {
  std::vector<IndexTuple> out;
  if (len > dim) return out;
  IndexTuple t(len);
  for (std::size_t k = 0; k < len; ++k) t[k] = static_cast<int>(k);
  for (;;) {
    out.push_back(t);
    std::size_t p = len;
    while (p > 0 && t[p - 1] == static_cast<int>(dim - len + p - 1)) --p;
    if (p == 0) return out;
    ++t[p - 1];
    for (std::size_t q = p; q < len; ++q) t[q] = t[q - 1] + 1;
  }
}

}  // namespace

SkewBracket extend_bracket(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d) {
  require_same_dim(p.dim(), b.dim());
  require_same_dim(p.dim(), d.dim());
  const std::size_t dim = p.dim();
  const std::size_t n = static_cast<std::size_t>(b.arity());

  std::vector<ElementVector> columns;
  for (std::size_t j = 0; j < dim; ++j) columns.push_back(d.apply(ElementVector::basis(dim, j)));

  std::vector<SkewBracket::Entry> entries;
  IndexTuple rest(n);
  for (const IndexTuple& t : increasing_tuples(dim, n + 1)) {
    ElementVector value(dim);
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t a = 0, w = 0; a <= n; ++a) {
        if (a != k) rest[w++] = t[a];
      }
      const ElementVector* inner = b.find(rest);
      if (!inner) continue;
      ElementVector term = multiply(p, columns[t[k]], *inner);
      value.add_scaled(term, Rational(k % 2 == 0 ? 1 : -1));
    }
    if (!value.is_zero()) entries.emplace_back(t, std::move(value));
  }
  return SkewBracket(dim, static_cast<int>(n + 1), std::move(entries));
}

SkewBracket derivation_bracket(const ProductTensor& p, const DerivationMatrix& d) {
  require_same_dim(p.dim(), d.dim());
  const std::size_t dim = p.dim();
  std::vector<SkewBracket::Entry> entries;
  for (std::size_t i = 0; i < dim; ++i) {
    const ElementVector ei = ElementVector::basis(dim, i);
    const ElementVector dei = d.apply(ei);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const ElementVector ej = ElementVector::basis(dim, j);
      ElementVector value = multiply(p, ei, d.apply(ej)) - multiply(p, ej, dei);
      if (!value.is_zero()) entries.emplace_back(IndexTuple{static_cast<int>(i), static_cast<int>(j)}, std::move(value));
    }
  }
  return SkewBracket(dim, 2, std::move(entries));
}

std::set<IdentityId> structure_suite() {
  return {IdentityId::NL,  IdentityId::TP,  IdentityId::NP1,    IdentityId::NP2,
          IdentityId::NP3, IdentityId::NP4, IdentityId::STRONG, IdentityId::SCALE};
}

std::vector<TowerLevel> build_tower(const AlgebraSystem& sys, const std::string& seed_bracket,
                                    const std::vector<std::string>& derivation_names, bool verify,
                                    const CheckOptions& options) {
  const SkewBracket* current = &sys.bracket(seed_bracket);
  for (const auto& name : derivation_names) sys.derivation(name);  // unknown names fail before any work

  std::vector<TowerLevel> levels;
  levels.reserve(derivation_names.size());
  for (std::size_t k = 0; k < derivation_names.size(); ++k) {
    TowerLevel level;
    level.step = static_cast<int>(k + 1);
    level.derivation = derivation_names[k];
    level.bracket = extend_bracket(sys.product, *current, sys.derivation(derivation_names[k]));
    if (verify) {
      const IdentityContext ctx{&sys.product, &level.bracket, nullptr};
      for (IdentityId id : structure_suite()) level.reports.push_back(check_identity(id, ctx, options));
      if (k + 1 < derivation_names.size()) {
        const auto der = check_derivation(sys.product, level.bracket, sys.derivation(derivation_names[k + 1]), options);
        level.reports.insert(level.reports.end(), der.begin(), der.end());
      }
    }
    levels.push_back(std::move(level));
    current = &levels.back().bracket;
  }
  return levels;
}

}  // namespace tpnl
