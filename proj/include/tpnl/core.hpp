#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tpnl/rational.hpp"

namespace tpnl {

using IndexTuple = std::vector<int>;

/// Coordinates of an element of L in the fixed basis e_0..e_{d-1}.
class ElementVector {
 public:
  ElementVector() = default;
  explicit ElementVector(std::size_t dim) : coords_(dim) {}
  explicit ElementVector(std::vector<Rational> coords) : coords_(std::move(coords)) {}

  static ElementVector basis(std::size_t dim, std::size_t k);

  std::size_t size() const { return coords_.size(); }
  const Rational& operator[](std::size_t k) const { return coords_[k]; }
  Rational& operator[](std::size_t k) { return coords_[k]; }
  const std::vector<Rational>& coords() const { return coords_; }

  bool is_zero() const;
  /// Indices of nonzero coordinates, ascending.
  std::vector<int> support() const;

  /// this += scale * other
  void add_scaled(const ElementVector& other, const Rational& scale);

  ElementVector& operator+=(const ElementVector& other);
  ElementVector& operator-=(const ElementVector& other);
  ElementVector& operator*=(const Rational& scale);

  friend ElementVector operator+(ElementVector a, const ElementVector& b) { return a += b; }
  friend ElementVector operator-(ElementVector a, const ElementVector& b) { return a -= b; }
  friend ElementVector operator*(const Rational& s, ElementVector a) { return a *= s; }
  friend ElementVector operator-(ElementVector a) { return a *= Rational(-1); }
  friend bool operator==(const ElementVector&, const ElementVector&) = default;

 private:
  std::vector<Rational> coords_;
};

/// Structure constants of the commutative associative product:
/// coefficient(i, j, k) is the e_k coordinate of e_i * e_j.
class ProductTensor {
 public:
  ProductTensor() = default;
  /// `flat` holds d^3 values in (i, j, k) row-major order.
  ProductTensor(std::size_t dim, std::vector<Rational> flat);

  static ProductTensor zero(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const Rational& coefficient(std::size_t i, std::size_t j, std::size_t k) const {
    return c_[(i * dim_ + j) * dim_ + k];
  }
  /// Output indices k with coefficient(i, j, k) != 0.
  const std::vector<int>& support(std::size_t i, std::size_t j) const { return support_[i * dim_ + j]; }
  const std::vector<Rational>& flat() const { return c_; }

  friend bool operator==(const ProductTensor& a, const ProductTensor& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Rational> c_;
  std::vector<std::vector<int>> support_;
};

/// Linear map D with entry(k, j) the e_k coordinate of D(e_j).
class DerivationMatrix {
 public:
  DerivationMatrix() = default;
  /// `flat` holds d^2 values, row k then column j.
  DerivationMatrix(std::size_t dim, std::vector<Rational> flat);

  static DerivationMatrix zero(std::size_t dim);
  static DerivationMatrix diagonal(const std::vector<Rational>& diag);

  std::size_t dim() const { return dim_; }
  const Rational& entry(std::size_t k, std::size_t j) const { return m_[k * dim_ + j]; }
  const std::vector<Rational>& flat() const { return m_; }

  ElementVector apply(const ElementVector& x) const;
  DerivationMatrix scaled(const Rational& s) const;

  friend bool operator==(const DerivationMatrix& a, const DerivationMatrix& b) {
    return a.dim_ == b.dim_ && a.m_ == b.m_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Rational> m_;
};

/// Sorted copy of `indices` plus the sign of the sorting permutation,
/// or sign 0 when an index repeats. Throws InputError on an index outside [0, dim).
std::pair<IndexTuple, int> canonicalize(const IndexTuple& indices, std::size_t dim);

/// Skew-symmetric n-ary bracket, stored only on strictly increasing index
/// tuples. Absent tuples are zero, and zero values are never stored.
class SkewBracket {
 public:
  using Entry = std::pair<IndexTuple, ElementVector>;

  SkewBracket() = default;
  SkewBracket(std::size_t dim, int arity);
  /// Validates keys (strictly increasing, in range, unique) and value lengths.
  SkewBracket(std::size_t dim, int arity, std::vector<Entry> entries);

  std::size_t dim() const { return dim_; }
  int arity() const { return arity_; }
  /// Nonzero entries in lexicographic key order.
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Stored value for a strictly increasing tuple; nullptr when zero.
  const ElementVector* find(std::span<const int> increasing) const;

  SkewBracket scaled(const Rational& s) const;

  friend bool operator==(const SkewBracket& a, const SkewBracket& b) {
    return a.dim_ == b.dim_ && a.arity_ == b.arity_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rank(std::span<const int> increasing) const;
  void build_table();

  std::size_t dim_ = 0;
  int arity_ = 2;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<int> table_;  // colex rank -> index into entries_, or -1
};

/// Bilinear product x * y.
ElementVector multiply(const ProductTensor& product, const ElementVector& x, const ElementVector& y);

/// Multilinear skew extension of the stored basis values to arbitrary arguments.
ElementVector bracket_apply(const SkewBracket& bracket, std::span<const ElementVector> args);

/// The triple (L, *, brackets) together with candidate derivations.
struct AlgebraSystem {
  std::size_t dim = 0;
  ProductTensor product;
  std::map<std::string, SkewBracket> brackets;
  std::map<std::string, DerivationMatrix> derivations;
  std::vector<std::string> basis_labels;  // empty or exactly dim labels

  /// Throws InputError if any component disagrees with `dim`.
  void validate() const;

  const SkewBracket& bracket(const std::string& name) const;
  const DerivationMatrix& derivation(const std::string& name) const;

  friend bool operator==(const AlgebraSystem&, const AlgebraSystem&) = default;
};

}  // namespace tpnl
