#include "tpnl/core.hpp"

#include <algorithm>

namespace tpnl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

/// Sorts `idx` in place and returns the parity of the permutation (+1/-1).
/// Assumes no repeated entries.
int sort_with_sign(std::span<int> idx) {
  int sign = 1;
  for (std::size_t a = 1; a < idx.size(); ++a) {
    for (std::size_t b = a; b > 0 && idx[b - 1] > idx[b]; --b) {
      std::swap(idx[b - 1], idx[b]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace

// ---------------------------------------------------------------------------
// ElementVector

ElementVector ElementVector::basis(std::size_t dim, std::size_t k) {
  require(k < dim, "basis index " + std::to_string(k) + " out of range for dimension " + std::to_string(dim));
  ElementVector v(dim);
  v.coords_[k] = 1;
  return v;
}

bool ElementVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& r) { return sgn(r) == 0; });
}

std::vector<int> ElementVector::support() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (sgn(coords_[k]) != 0) out.push_back(static_cast<int>(k));
  }
  return out;
}

void ElementVector::add_scaled(const ElementVector& other, const Rational& scale) {
  require(other.size() == size(), "vector length mismatch");
  if (sgn(scale) == 0) return;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (sgn(other.coords_[k]) != 0) coords_[k] += scale * other.coords_[k];
  }
}

ElementVector& ElementVector::operator+=(const ElementVector& other) {
  require(other.size() == size(), "vector length mismatch");
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] += other.coords_[k];
  return *this;
}

ElementVector& ElementVector::operator-=(const ElementVector& other) {
  require(other.size() == size(), "vector length mismatch");
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] -= other.coords_[k];
  return *this;
}

ElementVector& ElementVector::operator*=(const Rational& scale) {
  for (auto& c : coords_) c *= scale;
  return *this;
}

// ---------------------------------------------------------------------------
// ProductTensor

ProductTensor::ProductTensor(std::size_t dim, std::vector<Rational> flat) : dim_(dim), c_(std::move(flat)) {
  for (auto& c : c_) c.canonicalize();
  require(dim > 0, "dimension must be positive");
  require(c_.size() == dim * dim * dim, "product tensor must hold d^3 constants");
  support_.resize(dim * dim);
  for (std::size_t ij = 0; ij < dim * dim; ++ij) {
    for (std::size_t k = 0; k < dim; ++k) {
      if (sgn(c_[ij * dim + k]) != 0) support_[ij].push_back(static_cast<int>(k));
    }
  }
}

ProductTensor ProductTensor::zero(std::size_t dim) {
  return ProductTensor(dim, std::vector<Rational>(dim * dim * dim));
}

ElementVector multiply(const ProductTensor& product, const ElementVector& x, const ElementVector& y) {
  const std::size_t d = product.dim();
  require(x.size() == d && y.size() == d, "multiply: vector length does not match dimension");
  ElementVector out(d);
  Rational xy, term;
  for (int i : x.support()) {
    for (int j : y.support()) {
      const auto& ks = product.support(i, j);
      if (ks.empty()) continue;
      mpq_mul(xy.get_mpq_t(), x[i].get_mpq_t(), y[j].get_mpq_t());
      for (int k : ks) {
        mpq_mul(term.get_mpq_t(), xy.get_mpq_t(), product.coefficient(i, j, k).get_mpq_t());
        mpq_add(out[k].get_mpq_t(), out[k].get_mpq_t(), term.get_mpq_t());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DerivationMatrix

DerivationMatrix::DerivationMatrix(std::size_t dim, std::vector<Rational> flat) : dim_(dim), m_(std::move(flat)) {
  for (auto& m : m_) m.canonicalize();
  require(dim > 0, "dimension must be positive");
  require(m_.size() == dim * dim, "derivation matrix must be d x d");
}

DerivationMatrix DerivationMatrix::zero(std::size_t dim) {
  return DerivationMatrix(dim, std::vector<Rational>(dim * dim));
}

DerivationMatrix DerivationMatrix::diagonal(const std::vector<Rational>& diag) {
  const std::size_t d = diag.size();
  std::vector<Rational> flat(d * d);
  for (std::size_t k = 0; k < d; ++k) flat[k * d + k] = diag[k];
  return DerivationMatrix(d, std::move(flat));
}

ElementVector DerivationMatrix::apply(const ElementVector& x) const {
  require(x.size() == dim_, "derivation: vector length does not match dimension");
  ElementVector out(dim_);
  for (int j : x.support()) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Rational& m = m_[k * dim_ + j];
      if (sgn(m) != 0) out[k] += m * x[j];
    }
  }
  return out;
}

DerivationMatrix DerivationMatrix::scaled(const Rational& s) const {
  std::vector<Rational> flat = m_;
  for (auto& v : flat) v *= s;
  return DerivationMatrix(dim_, std::move(flat));
}

// ---------------------------------------------------------------------------
// canonicalize

std::pair<IndexTuple, int> canonicalize(const IndexTuple& indices, std::size_t dim) {
  for (int i : indices) {
    require(i >= 0 && static_cast<std::size_t>(i) < dim,
            "index " + std::to_string(i) + " out of range for dimension " + std::to_string(dim));
  }
  IndexTuple sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {sorted, 0};
  IndexTuple work = indices;
  const int sign = sort_with_sign(work);
  return {work, sign};
}

// ---------------------------------------------------------------------------
// SkewBracket

SkewBracket::SkewBracket(std::size_t dim, int arity) : SkewBracket(dim, arity, {}) {}

SkewBracket::SkewBracket(std::size_t dim, int arity, std::vector<Entry> entries) : dim_(dim), arity_(arity) {
  require(dim > 0, "dimension must be positive");
  require(arity >= 2, "bracket arity must be at least 2");
  for (auto& [key, value] : entries) {
    require(key.size() == static_cast<std::size_t>(arity),
            "bracket key has " + std::to_string(key.size()) + " indices, expected " + std::to_string(arity));
    for (std::size_t a = 0; a < key.size(); ++a) {
      require(key[a] >= 0 && static_cast<std::size_t>(key[a]) < dim, "bracket index out of range");
      require(a == 0 || key[a - 1] < key[a], "indices not strictly increasing");
    }
    require(value.size() == dim, "bracket value length does not match dimension");
    for (std::size_t k = 0; k < dim; ++k) value[k].canonicalize();
    if (!value.is_zero()) entries_.emplace_back(std::move(key), std::move(value));
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t e = 1; e < entries_.size(); ++e) {
    require(entries_[e - 1].first != entries_[e].first, "duplicate bracket key");
  }
  build_table();
}

void SkewBracket::build_table() {
  const std::size_t n = static_cast<std::size_t>(arity_);
  binom_.assign(dim_ + 1, std::vector<std::size_t>(n + 2, 0));
  for (std::size_t a = 0; a <= dim_; ++a) {
    binom_[a][0] = 1;
    for (std::size_t b = 1; b <= std::min(a, n + 1); ++b) {
      binom_[a][b] = binom_[a - 1][b - 1] + (b <= a - 1 ? binom_[a - 1][b] : 0);
    }
  }
  const std::size_t count = n <= dim_ ? binom_[dim_][n] : 0;
  table_.assign(count, -1);
  for (std::size_t e = 0; e < entries_.size(); ++e) table_[rank(entries_[e].first)] = static_cast<int>(e);
}

std::size_t SkewBracket::rank(std::span<const int> increasing) const {
  std::size_t r = 0;
  for (std::size_t k = 0; k < increasing.size(); ++k) r += binom_[increasing[k]][k + 1];
  return r;
}

const ElementVector* SkewBracket::find(std::span<const int> increasing) const {
  if (table_.empty()) return nullptr;
  const int e = table_[rank(increasing)];
  return e < 0 ? nullptr : &entries_[e].second;
}

SkewBracket SkewBracket::scaled(const Rational& s) const {
  std::vector<Entry> out = entries_;
  for (auto& [key, value] : out) value *= s;
  return SkewBracket(dim_, arity_, std::move(out));
}

namespace {

struct BracketExpansion {
  const SkewBracket& bracket;
  std::span<const ElementVector> args;
  std::vector<std::vector<int>> supports;
  std::vector<int> idx;
  std::vector<char> used;
  std::vector<Rational> coef;  // coef[p] = product of arg coordinates chosen before position p
  ElementVector out;
  std::vector<int> sorted;
  Rational term;

  void run(std::size_t pos) {
    const std::size_t n = args.size();
    if (pos == n) {
      std::copy(idx.begin(), idx.end(), sorted.begin());
      const int sign = sort_with_sign(sorted);
      const ElementVector* v = bracket.find(sorted);
      if (!v) return;
      for (std::size_t k = 0; k < v->size(); ++k) {
        const Rational& c = (*v)[k];
        if (sgn(c) == 0) continue;
        mpq_mul(term.get_mpq_t(), coef[n].get_mpq_t(), c.get_mpq_t());
        if (sign > 0) {
          mpq_add(out[k].get_mpq_t(), out[k].get_mpq_t(), term.get_mpq_t());
        } else {
          mpq_sub(out[k].get_mpq_t(), out[k].get_mpq_t(), term.get_mpq_t());
        }
      }
      return;
    }
    for (int k : supports[pos]) {
      if (used[k]) continue;
      used[k] = 1;
      idx[pos] = k;
      mpq_mul(coef[pos + 1].get_mpq_t(), coef[pos].get_mpq_t(), args[pos][k].get_mpq_t());
      run(pos + 1);
      used[k] = 0;
    }
  }
};

}  // namespace

ElementVector bracket_apply(const SkewBracket& bracket, std::span<const ElementVector> args) {
  const std::size_t d = bracket.dim();
  require(args.size() == static_cast<std::size_t>(bracket.arity()),
          "bracket_apply: expected " + std::to_string(bracket.arity()) + " arguments, got " +
              std::to_string(args.size()));
  for (const auto& a : args) require(a.size() == d, "bracket_apply: vector length does not match dimension");
  if (bracket.empty()) return ElementVector(d);

  BracketExpansion ex{bracket, args, {}, std::vector<int>(args.size()), std::vector<char>(d, 0),
                      std::vector<Rational>(args.size() + 1), ElementVector(d), std::vector<int>(args.size()), {}};
  ex.supports.reserve(args.size());
  for (const auto& a : args) {
    ex.supports.push_back(a.support());
    if (ex.supports.back().empty()) return ElementVector(d);
  }
  ex.coef[0] = 1;
  ex.run(0);
  return std::move(ex.out);
}

// ---------------------------------------------------------------------------
// AlgebraSystem

void AlgebraSystem::validate() const {
  require(dim > 0, "dimension must be positive");
  require(product.dim() == dim, "product dimension does not match system dimension");
  for (const auto& [name, b] : brackets) {
    require(b.dim() == dim, "bracket \"" + name + "\" dimension does not match system dimension");
  }
  for (const auto& [name, d] : derivations) {
    require(d.dim() == dim, "derivation \"" + name + "\" dimension does not match system dimension");
  }
  require(basis_labels.empty() || basis_labels.size() == dim, "basis label count does not match dimension");
}

const SkewBracket& AlgebraSystem::bracket(const std::string& name) const {
  auto it = brackets.find(name);
  if (it == brackets.end()) throw InputError("unknown bracket \"" + name + "\"");
  return it->second;
}

const DerivationMatrix& AlgebraSystem::derivation(const std::string& name) const {
  auto it = derivations.find(name);
  if (it == derivations.end()) throw InputError("unknown derivation \"" + name + "\"");
  return it->second;
}

}  // namespace tpnl
