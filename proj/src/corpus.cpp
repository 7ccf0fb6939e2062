#include "tpnl/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "tpnl/construct.hpp"

namespace tpnl {

namespace {

std::string power_label(const char* var, int exp) {
  if (exp == 0) return "";
  if (exp == 1) return var;
  return std::string(var) + "^" + std::to_string(exp);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Gauss-Jordan inverse of a row-major d x d matrix; nullopt when singular.
std::optional<std::vector<Rational>> invert(std::size_t d, std::vector<Rational> a) {
  std::vector<Rational> inv(d * d);
  for (std::size_t k = 0; k < d; ++k) inv[k * d + k] = 1;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    while (pivot < d && sgn(a[pivot * d + col]) == 0) ++pivot;
    if (pivot == d) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < d; ++c) {
        std::swap(a[pivot * d + c], a[col * d + c]);
        std::swap(inv[pivot * d + c], inv[col * d + c]);
      }
    }
    const Rational scale = 1 / a[col * d + col];
    for (std::size_t c = 0; c < d; ++c) {
      a[col * d + c] *= scale;
      inv[col * d + c] *= scale;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col || sgn(a[r * d + col]) == 0) continue;
      const Rational f = a[r * d + col];
      for (std::size_t c = 0; c < d; ++c) {
        a[r * d + c] -= f * a[col * d + c];
        inv[r * d + c] -= f * inv[col * d + c];
      }
    }
  }
  return inv;
}

ElementVector mat_vec(std::size_t d, const std::vector<Rational>& m, const ElementVector& v) {
  ElementVector out(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (sgn(m[r * d + c]) != 0 && sgn(v[c]) != 0) out[r] += m[r * d + c] * v[c];
    }
  }
  return out;
}

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

DerivationMatrix add(const DerivationMatrix& a, const DerivationMatrix& b) {
  std::vector<Rational> flat = a.flat();
  for (std::size_t k = 0; k < flat.size(); ++k) flat[k] += b.flat()[k];
  return DerivationMatrix(a.dim(), std::move(flat));
}

}  // namespace

// ---------------------------------------------------------------------------
// constructive families

AlgebraSystem make_truncated_poly(int m) {
  if (m < 2) throw InputError("truncated polynomial ring needs m >= 2");
  const std::size_t d = static_cast<std::size_t>(m);
  std::vector<Rational> c(d * d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; i + j < d; ++j) c[(i * d + j) * d + i + j] = 1;
  }
  AlgebraSystem sys;
  sys.dim = d;
  sys.product = ProductTensor(d, std::move(c));
  std::vector<Rational> weights;
  for (int k = 0; k < m; ++k) {
    weights.emplace_back(k);
    sys.basis_labels.push_back(k == 0 ? "1" : power_label("t", k));
  }
  sys.derivations["euler"] = DerivationMatrix::diagonal(weights);
  sys.brackets["b1"] = derivation_bracket(sys.product, sys.derivations["euler"]);
  return sys;
}

DerivationMatrix formal_derivative(int m) {
  if (m < 2) throw InputError("truncated polynomial ring needs m >= 2");
  const std::size_t d = static_cast<std::size_t>(m);
  std::vector<Rational> flat(d * d);
  for (std::size_t k = 1; k < d; ++k) flat[(k - 1) * d + k] = static_cast<long>(k);
  return DerivationMatrix(d, std::move(flat));
}

AlgebraSystem make_tensor_trunc(int a, int b) {
  if (a < 2 || b < 2) throw InputError("tensor truncation needs a >= 2 and b >= 2");
  const std::size_t d = static_cast<std::size_t>(a * b);
  // s^i t^j lives at index j*a + i: 1, s, .., t, st, ..
  auto index = [a](int i, int j) { return static_cast<std::size_t>(j * a + i); };
  std::vector<Rational> c(d * d * d);
  std::vector<Rational> w1(d), w2(d);
  AlgebraSystem sys;
  sys.dim = d;
  sys.basis_labels.resize(d);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < a; ++i) {
      const std::size_t p = index(i, j);
      w1[p] = i;
      w2[p] = j;
      const std::string label = power_label("s", i) + power_label("t", j);
      sys.basis_labels[p] = label.empty() ? "1" : label;
      for (int j2 = 0; j + j2 < b; ++j2) {
        for (int i2 = 0; i + i2 < a; ++i2) c[(p * d + index(i2, j2)) * d + index(i + i2, j + j2)] = 1;
      }
    }
  }
  sys.product = ProductTensor(d, std::move(c));
  sys.derivations["d1"] = DerivationMatrix::diagonal(w1);
  sys.derivations["d2"] = DerivationMatrix::diagonal(w2);
  sys.brackets["b_d1"] = derivation_bracket(sys.product, sys.derivations["d1"]);
  return sys;
}

AlgebraSystem make_zero_bracket_system(const ProductTensor& p, int n) {
  if (n < 2) throw InputError("bracket arity must be at least 2");
  AlgebraSystem sys;
  sys.dim = p.dim();
  sys.product = p;
  sys.brackets["zero"] = SkewBracket(p.dim(), n);
  return sys;
}

// ---------------------------------------------------------------------------
// random draws

SeededDraws::SeededDraws(std::uint64_t seed) : engine_(seed) {}

std::int64_t SeededDraws::uniform(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

bool SeededDraws::bernoulli(const Rational& p) {
  if (sgn(p) <= 0) return false;
  if (p >= 1) return true;
  if (!p.get_den().fits_slong_p()) throw InputError("probability denominator too large");
  const long den = p.get_den().get_si();
  return uniform(0, den - 1) < p.get_num().get_si();
}

Rational SeededDraws::small_rational() { return Rational(uniform(-3, 3)); }

AlgebraSystem random_system(int dim, int arity, const Rational& density, std::uint64_t seed, int max_dim) {
  if (dim < 1) throw InputError("dimension must be positive");
  if (dim > max_dim) throw InputError("dimension " + std::to_string(dim) + " exceeds the limit " + std::to_string(max_dim));
  if (arity < 2) throw InputError("bracket arity must be at least 2");
  if (density < 0 || density > 1) throw InputError("density must lie in [0, 1]");

  const std::size_t d = static_cast<std::size_t>(dim);
  SeededDraws draws(seed);
  std::vector<Rational> c(d * d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        c[(i * d + j) * d + k] = draws.small_rational();
        c[(j * d + i) * d + k] = c[(i * d + j) * d + k];
      }
    }
  }
  std::vector<SkewBracket::Entry> entries;
  for (const IndexTuple& t : increasing_tuples(d, static_cast<std::size_t>(arity))) {
    if (!draws.bernoulli(density)) continue;
    ElementVector v(d);
    for (std::size_t k = 0; k < d; ++k) v[k] = draws.small_rational();
    entries.emplace_back(t, std::move(v));
  }
  std::vector<Rational> m(d * d);
  for (auto& x : m) x = draws.small_rational();

  AlgebraSystem sys;
  sys.dim = d;
  sys.product = ProductTensor(d, std::move(c));
  sys.brackets["b"] = SkewBracket(d, arity, std::move(entries));
  sys.derivations["d"] = DerivationMatrix(d, std::move(m));
  return sys;
}

AlgebraSystem change_basis(const AlgebraSystem& sys, const std::vector<Rational>& change) {
  const std::size_t d = sys.dim;
  if (change.size() != d * d) throw InputError("basis change must be d x d");
  const auto inverse = invert(d, change);
  if (!inverse) throw InputError("basis change is singular");

  std::vector<ElementVector> f;  // new basis vectors in old coordinates
  for (std::size_t j = 0; j < d; ++j) {
    ElementVector col(d);
    for (std::size_t i = 0; i < d; ++i) col[i] = change[i * d + j];
    f.push_back(std::move(col));
  }
  auto to_new = [&](const ElementVector& v) { return mat_vec(d, *inverse, v); };

  AlgebraSystem out;
  out.dim = d;
  std::vector<Rational> c(d * d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const ElementVector v = to_new(multiply(sys.product, f[a], f[b]));
      for (std::size_t k = 0; k < d; ++k) c[(a * d + b) * d + k] = v[k];
    }
  }
  out.product = ProductTensor(d, std::move(c));

  for (const auto& [name, br] : sys.brackets) {
    std::vector<SkewBracket::Entry> entries;
    for (const IndexTuple& t : increasing_tuples(d, static_cast<std::size_t>(br.arity()))) {
      std::vector<ElementVector> args;
      for (int i : t) args.push_back(f[i]);
      entries.emplace_back(t, to_new(bracket_apply(br, args)));
    }
    out.brackets[name] = SkewBracket(d, br.arity(), std::move(entries));
  }
  for (const auto& [name, der] : sys.derivations) {
    std::vector<Rational> m(d * d);
    for (std::size_t j = 0; j < d; ++j) {
      const ElementVector v = to_new(der.apply(f[j]));
      for (std::size_t k = 0; k < d; ++k) m[k * d + j] = v[k];
    }
    out.derivations[name] = DerivationMatrix(d, std::move(m));
  }
  return out;
}

std::vector<Rational> random_invertible(std::size_t dim, SeededDraws& draws) {
  for (;;) {
    std::vector<Rational> m(dim * dim);
    for (auto& x : m) x = draws.uniform(-2, 2);
    if (invert(dim, m)) return m;
  }
}

AlgebraSystem random_structured_system(int arity, std::uint64_t seed) {
  if (arity < 2 || arity > 4) throw InputError("structured systems are generated for arity 2..4");
  SeededDraws draws(seed);
  // Keep the exhaustive checks cheap: dim <= 9 at arity 2, <= 6 above.
  const int a = static_cast<int>(draws.uniform(2, 3));
  const int b = arity == 2 ? static_cast<int>(draws.uniform(2, 3)) : (a == 3 ? 2 : static_cast<int>(draws.uniform(2, 3)));
  const AlgebraSystem base = make_tensor_trunc(a, b);
  const std::size_t d = base.dim;
  auto index = [a](int i, int j) { return static_cast<std::size_t>(j * a + i); };

  // p(s) d/ds and q(t) d/dt with p(0) = q(0) = 0 preserve both truncation ideals and commute.
  auto vector_field = [&](bool in_s) {
    const int top = in_s ? a : b;
    std::vector<Rational> coeff(top);
    coeff[1] = draws.uniform(0, 1) == 0 ? -1 - draws.uniform(0, 1) : 1 + draws.uniform(0, 1);
    for (int k = 2; k < top; ++k) coeff[k] = draws.uniform(-2, 2);
    std::vector<Rational> m(d * d);
    for (int j = 0; j < b; ++j) {
      for (int i = 0; i < a; ++i) {
        const int exp = in_s ? i : j;
        for (int k = 1; k < top; ++k) {
          const int e = exp - 1 + k;
          if (exp == 0 || e >= top) continue;
          const std::size_t target = in_s ? index(e, j) : index(i, e);
          m[target * d + index(i, j)] += coeff[k] * exp;
        }
      }
    }
    return DerivationMatrix(d, std::move(m));
  };
  const DerivationMatrix d1 = vector_field(true);
  const DerivationMatrix d2 = vector_field(false);
  auto combo = [&] {
    return add(d1.scaled(Rational(draws.uniform(-2, 2))), d2.scaled(Rational(draws.uniform(-2, 2))));
  };

  SkewBracket bracket = derivation_bracket(base.product, d1);
  DerivationMatrix candidate = add(d1.scaled(Rational(draws.uniform(-2, 2))), d2);
  if (arity >= 3) {
    bracket = extend_bracket(base.product, bracket, d2);
    candidate = combo();
  }
  if (arity == 4) {
    bracket = extend_bracket(base.product, bracket, candidate);
    candidate = combo();
  }
  static const Rational kScales[] = {Rational(1), Rational(-1), Rational(2), Rational(-2), Rational(1, 2)};
  bracket = bracket.scaled(kScales[draws.uniform(0, 4)]);

  AlgebraSystem sys;
  sys.dim = d;
  sys.product = base.product;
  sys.brackets["b"] = std::move(bracket);
  sys.derivations["d"] = std::move(candidate);
  return change_basis(sys, random_invertible(d, draws));
}

// ---------------------------------------------------------------------------
// counterexample hunting

namespace {

constexpr IdentityId kPremiseOrder[] = {IdentityId::ASSOC, IdentityId::NL, IdentityId::TP, IdentityId::DER_MUL,
                                        IdentityId::DER_BRK};

/// Premise reports in the documented order, or nullopt as soon as one fails.
std::optional<std::vector<CheckReport>> premises(const AlgebraSystem& sys) {
  const IdentityContext ctx{&sys.product, &sys.bracket("b"), &sys.derivation("d")};
  // cheapest first, reported in kPremiseOrder
  constexpr IdentityId kCheapFirst[] = {IdentityId::ASSOC, IdentityId::DER_MUL, IdentityId::TP, IdentityId::DER_BRK,
                                        IdentityId::NL};
  std::map<IdentityId, CheckReport> done;
  for (IdentityId id : kCheapFirst) {
    CheckReport r = check_identity(id, ctx);
    if (!r.passed) return std::nullopt;
    done.emplace(id, std::move(r));
  }
  std::vector<CheckReport> out;
  for (IdentityId id : kPremiseOrder) out.push_back(done.at(id));
  return out;
}

Rational trial_density(std::uint64_t trial) {
  static const Rational kDensities[] = {Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};
  return kDensities[trial % 4];
}

}  // namespace

HuntResult hunt_counterexample(int dim, int arity, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (arity < 3) throw InputError("hunting needs arity >= 3: the strong condition is automatic for binary brackets");
  if (dim < 1) throw InputError("dimension must be positive");
  random_system(dim, arity, Rational(0), seed);  // validates the size limits up front

  std::vector<std::optional<Finding>> found(threads == 0 ? 1 : threads);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::atomic<std::uint64_t> held{0}, strong_failed{0};

  auto worker = [&](std::size_t slot) {
    for (;;) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= trials || t > best.load()) return;
      const std::uint64_t trial_seed = splitmix64(seed + t * 0x9E3779B97F4A7C15ULL);
      AlgebraSystem sys = random_system(dim, arity, trial_density(t), trial_seed);
      auto prem = premises(sys);
      if (!prem) continue;
      held.fetch_add(1);
      CheckReport strong = check_strong(sys.product, sys.bracket("b"));
      if (strong.passed) continue;
      strong_failed.fetch_add(1);
      prem->push_back(std::move(strong));

      SkewBracket ext = extend_bracket(sys.product, sys.bracket("b"), sys.derivation("d"));
      CheckReport nl = check_filippov(ext);
      CheckReport tp = check_transposed_leibniz(sys.product, ext);
      if (nl.passed && tp.passed) continue;

      Finding f;
      f.trial = t;
      f.trial_seed = trial_seed;
      f.premise_reports = std::move(*prem);
      f.failing_report = nl.passed ? std::move(tp) : std::move(nl);
      sys.brackets["b_ext"] = std::move(ext);
      f.system = std::move(sys);
      if (!verify_finding(f)) continue;
      if (!found[slot] || found[slot]->trial > t) found[slot] = std::move(f);
      std::uint64_t prev = best.load();
      while (t < prev && !best.compare_exchange_weak(prev, t)) {
      }
    }
  };

  if (found.size() == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < found.size(); ++w) pool.emplace_back(worker, w);
  }

  HuntResult result;
  for (auto& f : found) {
    if (f && (!result.finding || f->trial < result.finding->trial)) result.finding = std::move(f);
  }
  // Counters past the winning trial depend on scheduling; report them only for exhausted hunts.
  result.stats.trials = result.finding ? result.finding->trial + 1 : trials;
  result.stats.premises_held = held.load();
  result.stats.strong_failed = strong_failed.load();
  return result;
}

bool verify_finding(const Finding& f) {
  const auto prem = premises(f.system);
  if (!prem || f.premise_reports.size() != prem->size() + 1) return false;
  for (std::size_t k = 0; k < prem->size(); ++k) {
    if (!(*prem)[k].same_outcome(f.premise_reports[k])) return false;
  }
  const CheckReport strong = check_strong(f.system.product, f.system.bracket("b"));
  if (strong.passed || !strong.same_outcome(f.premise_reports.back())) return false;
  const SkewBracket ext = extend_bracket(f.system.product, f.system.bracket("b"), f.system.derivation("d"));
  if (!(ext == f.system.bracket("b_ext"))) return false;
  const CheckReport again = f.failing_report.identity == IdentityId::NL
                                ? check_filippov(ext)
                                : check_transposed_leibniz(f.system.product, ext);
  return !again.passed && again.same_outcome(f.failing_report);
}

}  // namespace tpnl
