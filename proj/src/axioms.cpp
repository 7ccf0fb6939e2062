#include "tpnl/axioms.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

namespace tpnl {

namespace {

constexpr std::array<std::string_view, 14> kNames = {"NL",      "TP",      "NP1",  "NP2",  "NP3",  "NP4",  "STRONG",
                                                     "SCALE",   "DER_MUL", "DER_BRK", "LEM1", "LEM2", "COMM", "ASSOC"};

Rational alternating(std::size_t i) { return Rational(i % 2 == 0 ? 1 : -1); }

// -- small vector helpers ----------------------------------------------------

using Elements = std::vector<ElementVector>;

Elements slice(std::span<const ElementVector> v, std::size_t from, std::size_t count) {
  return Elements(v.begin() + from, v.begin() + from + count);
}

Elements omit(const Elements& v, std::size_t i) {
  Elements out;
  out.reserve(v.size() - 1);
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (a != i) out.push_back(v[a]);
  }
  return out;
}

Elements replaced(Elements v, std::size_t i, ElementVector value) {
  v[i] = std::move(value);
  return v;
}

Elements prepend(ElementVector head, const Elements& tail) {
  Elements out;
  out.reserve(tail.size() + 1);
  out.push_back(std::move(head));
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

// -- the residual of each identity ------------------------------------------

struct Ops {
  const IdentityContext& ctx;

  ElementVector mul(const ElementVector& x, const ElementVector& y) const { return multiply(*ctx.product, x, y); }
  ElementVector br(const Elements& args) const { return bracket_apply(*ctx.bracket, args); }
  ElementVector der(const ElementVector& x) const { return ctx.derivation->apply(x); }
  int n() const { return ctx.bracket->arity(); }
  std::size_t d() const { return ctx.product ? ctx.product->dim() : ctx.bracket->dim(); }
};

// [[y_1..y_n], x_1..x_{n-1}] - sum_i (-1)^(i-1) [[y_i, x_1..x_{n-1}], y_1..^y_i..y_n]
ElementVector residual_nl(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements y = slice(e, 0, n);
  const Elements x = slice(e, n, n - 1);
  ElementVector res = o.br(prepend(o.br(y), x));
  for (std::size_t i = 0; i < n; ++i) {
    ElementVector inner = o.br(prepend(y[i], x));
    res.add_scaled(o.br(prepend(std::move(inner), omit(y, i))), -alternating(i));
  }
  return res;
}

// n h [x_1..x_n] - sum_i [x_1.. h x_i ..x_n]
ElementVector residual_tp(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const ElementVector& h = e[0];
  const Elements x = slice(e, 1, n);
  ElementVector res = o.mul(h, o.br(x));
  res *= Rational(static_cast<long>(n));
  for (std::size_t i = 0; i < n; ++i) res -= o.br(replaced(x, i, o.mul(h, x[i])));
  return res;
}

// sum_i (-1)^(i-1) x_i [x_1..^x_i..x_{n+1}]
ElementVector residual_np1(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements x = slice(e, 0, n + 1);
  ElementVector res(o.d());
  for (std::size_t i = 0; i <= n; ++i) res.add_scaled(o.mul(x[i], o.br(omit(x, i))), alternating(i));
  return res;
}

// sum_i (-1)^(i-1) [h[y_i, x..], y_1..^y_i..y_n] - [h[y_1..y_n], x..]
ElementVector residual_np2(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const ElementVector& h = e[0];
  const Elements x = slice(e, 1, n - 1);
  const Elements y = slice(e, n, n);
  ElementVector res(o.d());
  for (std::size_t i = 0; i < n; ++i) {
    ElementVector inner = o.mul(h, o.br(prepend(y[i], x)));
    res.add_scaled(o.br(prepend(std::move(inner), omit(y, i))), alternating(i));
  }
  res -= o.br(prepend(o.mul(h, o.br(y)), x));
  return res;
}

// sum_i (-1)^(i-1) [y_i, x..] [y_1..^y_i..y_{n+1}]
ElementVector residual_np3(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements x = slice(e, 0, n - 1);
  const Elements y = slice(e, n - 1, n + 1);
  ElementVector res(o.d());
  for (std::size_t i = 0; i <= n; ++i) {
    res.add_scaled(o.mul(o.br(prepend(y[i], x)), o.br(omit(y, i))), alternating(i));
  }
  return res;
}

// sum_{i != j} [y_1.. y_i x_1 .. y_j x_2 ..y_n] - n(n-1) x_1 x_2 [y_1..y_n]
ElementVector residual_np4(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const ElementVector& x1 = e[0];
  const ElementVector& x2 = e[1];
  const Elements y = slice(e, 2, n);
  ElementVector res(o.d());
  for (std::size_t i = 0; i < n; ++i) {
    Elements yi = replaced(y, i, o.mul(y[i], x1));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      res += o.br(replaced(yi, j, o.mul(y[j], x2)));
    }
  }
  res.add_scaled(o.mul(o.mul(x1, x2), o.br(y)), Rational(-static_cast<long>(n * (n - 1))));
  return res;
}

// y_1[h y_2, x..] - y_2[h y_1, x..] + sum_i (-1)^(i-1) h x_i [y_1, y_2, x_1..^x_i..x_{n-1}]
ElementVector residual_strong(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const ElementVector& h = e[0];
  const ElementVector& y1 = e[1];
  const ElementVector& y2 = e[2];
  const Elements x = slice(e, 3, n - 1);
  ElementVector res = o.mul(y1, o.br(prepend(o.mul(h, y2), x)));
  res -= o.mul(y2, o.br(prepend(o.mul(h, y1), x)));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    res.add_scaled(o.mul(o.mul(h, x[i]), o.br(prepend(y1, prepend(y2, omit(x, i))))), alternating(i));
  }
  return res;
}

// (y_1[h y_2, x..] - h y_1[y_2, x..]) - (y_2[h y_1, x..] - h y_2[y_1, x..])
ElementVector residual_scale(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const ElementVector& h = e[0];
  const ElementVector& y1 = e[1];
  const ElementVector& y2 = e[2];
  const Elements x = slice(e, 3, n - 1);
  ElementVector res = o.mul(y1, o.br(prepend(o.mul(h, y2), x)));
  res -= o.mul(o.mul(h, y1), o.br(prepend(y2, x)));
  res -= o.mul(y2, o.br(prepend(o.mul(h, y1), x)));
  res += o.mul(o.mul(h, y2), o.br(prepend(y1, x)));
  return res;
}

// D(uv) - D(u)v - uD(v)
ElementVector residual_der_mul(const Ops& o, std::span<const ElementVector> e) {
  ElementVector res = o.der(o.mul(e[0], e[1]));
  res -= o.mul(o.der(e[0]), e[1]);
  res -= o.mul(e[0], o.der(e[1]));
  return res;
}

// D[x_1..x_n] - sum_k [x_1.. D x_k ..x_n]
ElementVector residual_der_brk(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements x = slice(e, 0, n);
  ElementVector res = o.der(o.br(x));
  for (std::size_t k = 0; k < n; ++k) res -= o.br(replaced(x, k, o.der(x[k])));
  return res;
}

// sum_i (-1)^(i-1) D(y_i) D[y_1..^y_i..y_{n+1}], shared left side of both lemma identities
ElementVector lemma_lhs(const Ops& o, const Elements& y) {
  ElementVector lhs(o.d());
  for (std::size_t i = 0; i < y.size(); ++i) {
    lhs.add_scaled(o.mul(o.der(y[i]), o.der(o.br(omit(y, i)))), alternating(i));
  }
  return lhs;
}

ElementVector residual_lem1(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements y = slice(e, 0, n + 1);
  ElementVector res = lemma_lhs(o, y);
  for (std::size_t i = 0; i <= n; ++i) {
    const ElementVector dyi = o.der(y[i]);
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == i) continue;
      res.add_scaled(o.mul(dyi, o.br(omit(replaced(y, j, o.der(y[j])), i))), -alternating(i));
    }
  }
  return res;
}

// The right side ranges over i, j != i, and k from j+1 with k != i; a lower
// bound past the upper bound is the empty sum. Its sign is (-1)^i, 1-based.
ElementVector residual_lem2(const Ops& o, std::span<const ElementVector> e) {
  const std::size_t n = o.n();
  const Elements y = slice(e, 0, n + 1);
  ElementVector res = lemma_lhs(o, y);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == i) continue;
      const Elements yj = replaced(y, j, o.der(y[j]));
      for (std::size_t k = j + 1; k <= n; ++k) {
        if (k == i) continue;
        ElementVector term = o.mul(y[i], o.br(omit(replaced(yj, k, o.der(y[k])), i)));
        // -(RHS term), RHS sign is -(-1)^(i0)
        res.add_scaled(term, alternating(i));
      }
    }
  }
  return res;
}

ElementVector residual_comm(const Ops& o, std::span<const ElementVector> e) {
  return o.mul(e[0], e[1]) - o.mul(e[1], e[0]);
}

ElementVector residual_assoc(const Ops& o, std::span<const ElementVector> e) {
  return o.mul(o.mul(e[0], e[1]), e[2]) - o.mul(e[0], o.mul(e[1], e[2]));
}

// -- enumeration layout ------------------------------------------------------

enum class Link { kFree, kNonDecreasing, kIncreasing };

struct Block {
  std::size_t length;
  bool skew;
};

/// Argument blocks in quantifier order. Skew blocks may be pruned.
std::vector<Block> layout(IdentityId id, std::size_t n) {
  switch (id) {
    case IdentityId::NL: return {{n, true}, {n - 1, true}};
    case IdentityId::TP: return {{1, false}, {n, true}};
    case IdentityId::NP1: return {{n + 1, true}};
    case IdentityId::NP2: return {{1, false}, {n - 1, true}, {n, true}};
    case IdentityId::NP3: return {{n - 1, true}, {n + 1, true}};
    case IdentityId::NP4: return {{1, false}, {1, false}, {n, true}};
    case IdentityId::STRONG:
    case IdentityId::SCALE: return {{1, false}, {2, true}, {n - 1, true}};
    case IdentityId::DER_MUL: return {{1, false}, {1, false}};
    case IdentityId::DER_BRK: return {{n, true}};
    case IdentityId::LEM1:
    case IdentityId::LEM2: return {{n + 1, true}};
    case IdentityId::COMM: return {{1, false}, {1, false}};
    case IdentityId::ASSOC: return {{1, false}, {1, false}, {1, false}};
  }
  return {};
}

bool per_coordinate(IdentityId id) { return id == IdentityId::COMM || id == IdentityId::ASSOC; }

/// Lexicographic odometer over index tuples where each position may be tied
/// to its predecessor (non-decreasing or strictly increasing).
class TupleRange {
 public:
  TupleRange(std::vector<Link> links, int dim) : links_(std::move(links)), dim_(dim) {}

  std::size_t size() const { return links_.size(); }

  /// Sets positions [from, end) to their smallest admissible values.
  bool reset_from(std::vector<int>& t, std::size_t from) const {
    for (std::size_t q = from; q < links_.size(); ++q) {
      t[q] = min_at(t, q);
      if (t[q] >= dim_) return false;
    }
    return true;
  }

  /// Advances positions [from, end) keeping [0, from) fixed.
  bool next(std::vector<int>& t, std::size_t from, std::size_t end) const {
    for (std::size_t p = end; p-- > from;) {
      if (t[p] + 1 >= dim_) continue;
      ++t[p];
      bool ok = true;
      for (std::size_t q = p + 1; q < end; ++q) {
        t[q] = min_at(t, q);
        if (t[q] >= dim_) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  }

 private:
  int min_at(const std::vector<int>& t, std::size_t q) const {
    switch (links_[q]) {
      case Link::kFree: return 0;
      case Link::kNonDecreasing: return t[q - 1];
      case Link::kIncreasing: return t[q - 1] + 1;
    }
    return 0;
  }

  std::vector<Link> links_;
  int dim_;
};

std::vector<Link> links_for(IdentityId id, std::size_t n, bool prune) {
  std::vector<Link> links;
  const bool strict = id == IdentityId::DER_BRK;
  for (const Block& b : layout(id, n)) {
    for (std::size_t k = 0; k < b.length; ++k) {
      if (k == 0 || !b.skew) {
        links.push_back(Link::kFree);
      } else if (strict) {
        links.push_back(Link::kIncreasing);
      } else {
        links.push_back(prune ? Link::kNonDecreasing : Link::kFree);
      }
    }
  }
  if (per_coordinate(id)) links.push_back(Link::kFree);  // output coordinate k
  return links;
}

struct TaskResult {
  std::uint64_t checked = 0;  // tuples examined, including the failing one
  std::optional<Counterexample> failure;
};

void validate_context(IdentityId id, const IdentityContext& ctx) {
  if (!ctx.product && id != IdentityId::DER_BRK && id != IdentityId::NL) {
    throw InputError(std::string(identity_name(id)) + " requires a product");
  }
  if (needs_bracket(id) && !ctx.bracket) throw InputError(std::string(identity_name(id)) + " requires a bracket");
  if (needs_derivation(id) && !ctx.derivation) {
    throw InputError(std::string(identity_name(id)) + " requires a derivation");
  }
  std::optional<std::size_t> dim;
  auto same = [&](std::size_t d) {
    if (dim && *dim != d) throw InputError("component dimensions do not match");
    dim = d;
  };
  if (ctx.product) same(ctx.product->dim());
  if (ctx.bracket && needs_bracket(id)) same(ctx.bracket->dim());
  if (ctx.derivation && needs_derivation(id)) same(ctx.derivation->dim());
}

}  // namespace

std::string_view identity_name(IdentityId id) { return kNames[static_cast<std::size_t>(id)]; }

IdentityId parse_identity(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    if (kNames[k] == name) return static_cast<IdentityId>(k);
  }
  throw InputError("unknown identity \"" + std::string(name) + "\"");
}

bool needs_derivation(IdentityId id) {
  return id == IdentityId::DER_MUL || id == IdentityId::DER_BRK || id == IdentityId::LEM1 || id == IdentityId::LEM2;
}

bool needs_bracket(IdentityId id) {
  return id != IdentityId::COMM && id != IdentityId::ASSOC && id != IdentityId::DER_MUL;
}

std::size_t element_count(IdentityId id, int arity) {
  std::size_t total = 0;
  for (const Block& b : layout(id, static_cast<std::size_t>(arity))) total += b.length;
  return total;
}

ElementVector residual(IdentityId id, const IdentityContext& ctx, std::span<const ElementVector> elements) {
  validate_context(id, ctx);
  const int arity = ctx.bracket ? ctx.bracket->arity() : 2;
  if (elements.size() != element_count(id, arity)) {
    throw InputError(std::string(identity_name(id)) + ": expected " + std::to_string(element_count(id, arity)) +
                     " elements");
  }
  const Ops o{ctx};
  switch (id) {
    case IdentityId::NL: return residual_nl(o, elements);
    case IdentityId::TP: return residual_tp(o, elements);
    case IdentityId::NP1: return residual_np1(o, elements);
    case IdentityId::NP2: return residual_np2(o, elements);
    case IdentityId::NP3: return residual_np3(o, elements);
    case IdentityId::NP4: return residual_np4(o, elements);
    case IdentityId::STRONG: return residual_strong(o, elements);
    case IdentityId::SCALE: return residual_scale(o, elements);
    case IdentityId::DER_MUL: return residual_der_mul(o, elements);
    case IdentityId::DER_BRK: return residual_der_brk(o, elements);
    case IdentityId::LEM1: return residual_lem1(o, elements);
    case IdentityId::LEM2: return residual_lem2(o, elements);
    case IdentityId::COMM: return residual_comm(o, elements);
    case IdentityId::ASSOC: return residual_assoc(o, elements);
  }
  throw InputError("unhandled identity");
}

CheckReport check_identity(IdentityId id, const IdentityContext& ctx, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate_context(id, ctx);

  const int arity = ctx.bracket ? ctx.bracket->arity() : 2;
  const std::size_t dim = ctx.product ? ctx.product->dim() : ctx.bracket->dim();
  const std::size_t elements = element_count(id, arity);
  const bool coord = per_coordinate(id);
  const TupleRange range(links_for(id, static_cast<std::size_t>(arity), options.prune), static_cast<int>(dim));
  const std::size_t width = range.size();

  std::vector<ElementVector> basis;
  for (std::size_t k = 0; k < dim; ++k) basis.push_back(ElementVector::basis(dim, k));

  // Tasks are the admissible prefixes of length `depth`, in lexicographic order.
  const std::size_t depth = std::min<std::size_t>(width, 2);
  std::vector<std::vector<int>> prefixes;
  {
    std::vector<int> t(width, 0);
    if (range.reset_from(t, 0)) {
      do {
        prefixes.emplace_back(t.begin(), t.begin() + depth);
      } while (range.next(t, 0, depth));
    }
  }

  std::vector<TaskResult> results(prefixes.size());
  std::atomic<std::size_t> next_task{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};

  auto worker = [&] {
    std::vector<ElementVector> args(elements, ElementVector(dim));
    std::vector<int> cached_elements;
    ElementVector cached_residual;
    for (;;) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= prefixes.size()) return;
      if (task > first_failure.load()) continue;
      std::vector<int> t(width, 0);
      std::copy(prefixes[task].begin(), prefixes[task].end(), t.begin());
      TaskResult& out = results[task];
      if (!range.reset_from(t, depth)) continue;
      do {
        ++out.checked;
        const bool fresh = cached_elements.empty() || !std::equal(t.begin(), t.begin() + elements, cached_elements.begin());
        if (fresh) {
          for (std::size_t p = 0; p < elements; ++p) args[p] = basis[t[p]];
          cached_residual = residual(id, ctx, args);
          cached_elements.assign(t.begin(), t.begin() + elements);
        }
        bool failed;
        ElementVector witness;
        if (coord) {
          const Rational& r = cached_residual[t.back()];
          failed = sgn(r) != 0;
          if (failed) {
            witness = ElementVector(dim);
            witness[t.back()] = r;
          }
        } else {
          failed = !cached_residual.is_zero();
          if (failed) witness = cached_residual;
        }
        if (failed) {
          out.failure = Counterexample{t, std::move(witness)};
          std::size_t prev = first_failure.load();
          while (task < prev && !first_failure.compare_exchange_weak(prev, task)) {
          }
          break;
        }
      } while (range.next(t, depth, width));
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(prefixes.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  CheckReport report;
  report.identity = id;
  for (auto& r : results) {
    report.tuples_checked += r.checked;
    if (r.failure) {
      report.passed = false;
      report.counterexample = std::move(r.failure);
      break;
    }
  }
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

std::array<CheckReport, 2> check_commutative_associative(const ProductTensor& p, const CheckOptions& options) {
  const IdentityContext ctx{&p, nullptr, nullptr};
  return {check_identity(IdentityId::COMM, ctx, options), check_identity(IdentityId::ASSOC, ctx, options)};
}

CheckReport check_filippov(const SkewBracket& b, const CheckOptions& options) {
  return check_identity(IdentityId::NL, {nullptr, &b, nullptr}, options);
}

CheckReport check_transposed_leibniz(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options) {
  return check_identity(IdentityId::TP, {&p, &b, nullptr}, options);
}

CheckReport check_np_identity(const ProductTensor& p, const SkewBracket& b, IdentityId which,
                              const CheckOptions& options) {
  if (which != IdentityId::NP1 && which != IdentityId::NP2 && which != IdentityId::NP3 && which != IdentityId::NP4) {
    throw InputError("check_np_identity expects NP1..NP4");
  }
  return check_identity(which, {&p, &b, nullptr}, options);
}

CheckReport check_strong(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options) {
  return check_identity(IdentityId::STRONG, {&p, &b, nullptr}, options);
}

CheckReport check_scale_identity(const ProductTensor& p, const SkewBracket& b, const CheckOptions& options) {
  return check_identity(IdentityId::SCALE, {&p, &b, nullptr}, options);
}

std::array<CheckReport, 2> check_derivation(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d,
                                            const CheckOptions& options) {
  const IdentityContext ctx{&p, &b, &d};
  return {check_identity(IdentityId::DER_MUL, ctx, options), check_identity(IdentityId::DER_BRK, ctx, options)};
}

CheckReport check_lemma_identity(const ProductTensor& p, const SkewBracket& b, const DerivationMatrix& d,
                                 IdentityId which, const CheckOptions& options) {
  if (which != IdentityId::LEM1 && which != IdentityId::LEM2) throw InputError("check_lemma_identity expects LEM1 or LEM2");
  return check_identity(which, {&p, &b, &d}, options);
}

std::vector<CheckReport> run_suite(const AlgebraSystem& sys, const std::string& bracket_name,
                                   const std::optional<std::string>& derivation_name, const std::set<IdentityId>& ids,
                                   const CheckOptions& options) {
  const SkewBracket& b = sys.bracket(bracket_name);
  const DerivationMatrix* d = derivation_name ? &sys.derivation(*derivation_name) : nullptr;
  for (IdentityId id : ids) {
    if (needs_derivation(id) && !d) {
      throw InputError(std::string(identity_name(id)) + " requires a derivation");
    }
  }
  const IdentityContext ctx{&sys.product, &b, d};
  std::vector<CheckReport> reports;
  for (IdentityId id : kAllIdentities) {
    if (ids.contains(id)) reports.push_back(check_identity(id, ctx, options));
  }
  return reports;
}

}  // namespace tpnl
