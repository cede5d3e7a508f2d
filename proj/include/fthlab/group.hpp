#pragma once

// Finite groups given by their multiplication table.
//
// Elements are indices 0..order-1 and element 0 is always the identity.
// Haar measure is counting measure and the modular function is identically 1.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace fthlab {

using Element = std::size_t;

inline constexpr std::size_t kDefaultMaxOrder = 64;

class FiniteGroup {
 public:
  /// Builds a group from a raw table. No axiom is checked here; use
  /// validate_group. Inverses are searched in the table; elements without
  /// one get themselves as a placeholder so that validation reports them.
  FiniteGroup(std::string spec, std::vector<Element> table, std::vector<std::string> labels,
              std::vector<Element> generators = {})
      : spec_(std::move(spec)),
        order_(labels.size()),
        mul_(std::move(table)),
        labels_(std::move(labels)),
        generators_(std::move(generators)) {
    if (order_ == 0) throw SpecError("group must have at least one element");
    if (mul_.size() != order_ * order_) throw SpecError("multiplication table has wrong size");
    for (Element v : mul_) {
      if (v >= order_) throw SpecError("multiplication table entry out of range");
    }
    inv_.resize(order_);
    for (Element x = 0; x < order_; ++x) {
      inv_[x] = x;
      for (Element y = 0; y < order_; ++y) {
        if (mul(x, y) == 0 && mul(y, x) == 0) {
          inv_[x] = y;
          break;
        }
      }
    }
  }

  const std::string& spec() const { return spec_; }
  std::size_t order() const { return order_; }
  static constexpr Element identity() { return 0; }

  Element mul(Element a, Element b) const { return mul_[a * order_ + b]; }
  Element inv(Element a) const { return inv_[a]; }

  /// Modular function; finite groups are unimodular.
  static constexpr double modular(Element) { return 1.0; }

  const std::string& label(Element a) const { return labels_.at(a); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<Element> find_label(std::string_view name) const {
    for (Element a = 0; a < order_; ++a) {
      if (labels_[a] == name) return a;
    }
    return std::nullopt;
  }

  /// A generating set (empty for the trivial group).
  const std::vector<Element>& generators() const { return generators_; }

  bool contains(Element a) const { return a < order_; }

  bool is_abelian() const {
    for (Element a = 0; a < order_; ++a) {
      for (Element b = a + 1; b < order_; ++b) {
        if (mul(a, b) != mul(b, a)) return false;
      }
    }
    return true;
  }

  std::size_t element_order(Element a) const {
    std::size_t k = 1;
    for (Element x = a; x != identity(); x = mul(x, a)) {
      if (++k > order_) return 0;  // not periodic: broken table
    }
    return k;
  }

 private:
  std::string spec_;
  std::size_t order_;
  std::vector<Element> mul_;
  std::vector<Element> inv_;
  std::vector<std::string> labels_;
  std::vector<Element> generators_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline bool same_group(const FiniteGroup& a, const FiniteGroup& b) {
  return &a == &b || (a.order() == b.order() && a.spec() == b.spec());
}

// ---------------------------------------------------------------------------
// Validation

struct GroupViolation {
  enum class Kind { associativity, unit, inverse };
  Kind kind;
  Element a = 0, b = 0, c = 0;
};

inline std::string to_string(GroupViolation::Kind k) {
  switch (k) {
    case GroupViolation::Kind::associativity: return "associativity";
    case GroupViolation::Kind::unit: return "unit";
    case GroupViolation::Kind::inverse: return "inverse";
  }
  return "?";
}

struct ValidationReport {
  std::vector<GroupViolation> violations;
  std::size_t triples_checked = 0;
  bool ok() const { return violations.empty(); }
};

/// Exhaustive axiom check. Violations are listed, never thrown.
inline ValidationReport validate_group(const FiniteGroup& g) {
  ValidationReport report;
  const std::size_t n = g.order();
  for (Element x = 0; x < n; ++x) {
    if (g.mul(0, x) != x || g.mul(x, 0) != x) {
      report.violations.push_back({GroupViolation::Kind::unit, x, 0, 0});
    }
    const Element y = g.inv(x);
    if (g.mul(x, y) != 0 || g.mul(y, x) != 0) {
      report.violations.push_back({GroupViolation::Kind::inverse, x, y, 0});
    }
  }
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      const Element ab = g.mul(a, b);
      for (Element c = 0; c < n; ++c) {
        ++report.triples_checked;
        if (g.mul(ab, c) != g.mul(a, g.mul(b, c))) {
          report.violations.push_back({GroupViolation::Kind::associativity, a, b, c});
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Constructions

namespace detail {

inline GroupPtr cyclic(std::size_t n) {
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = std::to_string(i);
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = (i + j) % n;
  }
  std::vector<Element> gens;
  if (n > 1) gens.push_back(1);
  return std::make_shared<const FiniteGroup>("C" + std::to_string(n), std::move(table),
                                             std::move(labels), std::move(gens));
}

// Order 2n; index k + n*j stands for r^k s^j, with s r s = r^{-1}.
inline GroupPtr dihedral(std::size_t n) {
  const std::size_t order = 2 * n;
  std::vector<Element> table(order * order);
  std::vector<std::string> labels(order);
  for (std::size_t x = 0; x < order; ++x) {
    const std::size_t a = x % n, b = x / n;
    labels[x] = (b == 0 ? "r" : "s") + std::to_string(a);
    for (std::size_t y = 0; y < order; ++y) {
      const std::size_t c = y % n, d = y / n;
      const std::size_t k = b == 0 ? (a + c) % n : (a + n - c) % n;
      table[x * order + y] = k + n * ((b + d) % 2);
    }
  }
  std::vector<Element> gens;
  if (n > 1) gens.push_back(1);
  gens.push_back(n);
  return std::make_shared<const FiniteGroup>("D" + std::to_string(n), std::move(table),
                                             std::move(labels), std::move(gens));
}

// Permutations in lexicographic order of their one-line notation; the
// product st applies t first.
inline GroupPtr symmetric(std::size_t n) {
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const std::size_t order = perms.size();
  auto index_of = [&](const std::vector<std::size_t>& q) {
    return static_cast<Element>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<Element> table(order * order);
  std::vector<std::string> labels(order);
  std::vector<std::size_t> prod(n);
  for (std::size_t x = 0; x < order; ++x) {
    for (std::size_t i = 0; i < n; ++i) labels[x] += static_cast<char>('0' + perms[x][i]);
    for (std::size_t y = 0; y < order; ++y) {
      for (std::size_t i = 0; i < n; ++i) prod[i] = perms[x][perms[y][i]];
      table[x * order + y] = index_of(prod);
    }
  }
  std::vector<Element> gens;
  if (n >= 2) {
    std::vector<std::size_t> swap01(n), cycle(n);
    std::iota(swap01.begin(), swap01.end(), 0);
    std::swap(swap01[0], swap01[1]);
    for (std::size_t i = 0; i < n; ++i) cycle[i] = (i + 1) % n;
    gens.push_back(index_of(swap01));
    if (n > 2) gens.push_back(index_of(cycle));
  }
  return std::make_shared<const FiniteGroup>("S" + std::to_string(n), std::move(table),
                                             std::move(labels), std::move(gens));
}

// Index 2*b + s encodes (-1)^s * e_b with e_0 = 1, e_1 = i, e_2 = j, e_3 = k.
inline GroupPtr quaternion() {
  // basis product e_a e_b = sign * e_c
  static constexpr int kBasis[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static constexpr int kSign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<Element> table(64);
  std::vector<std::string> labels = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  for (std::size_t x = 0; x < 8; ++x) {
    for (std::size_t y = 0; y < 8; ++y) {
      const std::size_t a = x / 2, b = y / 2;
      const std::size_t s = (x % 2 + y % 2 + kSign[a][b]) % 2;
      table[x * 8 + y] = 2 * kBasis[a][b] + s;
    }
  }
  return std::make_shared<const FiniteGroup>("Q8", std::move(table), std::move(labels),
                                             std::vector<Element>{2, 4});
}

inline std::size_t parse_index(std::string_view token, std::string_view whole) {
  if (token.empty() || token.size() > 6 ||
      !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw SpecError("unknown group spec '" + std::string(whole) + "'");
  }
  return static_cast<std::size_t>(std::stoul(std::string(token)));
}

inline void check_cap(std::size_t order, std::size_t max_order, std::string_view what) {
  if (order > max_order) {
    throw SpecError("group '" + std::string(what) + "' has order " + std::to_string(order) +
                    " above the size cap " + std::to_string(max_order));
  }
}

inline GroupPtr make_factor(std::string_view token, std::size_t max_order) {
  if (token == "Q8") {
    check_cap(8, max_order, token);
    return quaternion();
  }
  if (token.size() < 2) throw SpecError("unknown group spec '" + std::string(token) + "'");
  const char kind = token.front();
  if (kind != 'C' && kind != 'D' && kind != 'S') {
    throw SpecError("unknown group spec '" + std::string(token) + "'");
  }
  const std::size_t n = parse_index(token.substr(1), token);
  if (n < 1) throw SpecError("group spec '" + std::string(token) + "' needs n >= 1");
  switch (kind) {
    case 'C':
      check_cap(n, max_order, token);
      return cyclic(n);
    case 'D':
      check_cap(2 * n, max_order, token);
      return dihedral(n);
    default: {
      if (n > 5) throw SpecError("S" + std::to_string(n) + " exceeds the S<n> size guard (n <= 5)");
      std::size_t fact = 1;
      for (std::size_t i = 2; i <= n; ++i) fact *= i;
      check_cap(fact, max_order, token);
      return symmetric(n);
    }
  }
}

}  // namespace detail

/// Direct product with lexicographic indexing: (g, h) -> g*|H| + h.
inline GroupPtr group_product(const FiniteGroup& g, const FiniteGroup& h,
                              std::size_t max_order = kDefaultMaxOrder) {
  const std::size_t m = g.order(), n = h.order(), order = m * n;
  const std::string spec = g.spec() + "x" + h.spec();
  detail::check_cap(order, max_order, spec);
  std::vector<Element> table(order * order);
  std::vector<std::string> labels(order);
  for (std::size_t x = 0; x < order; ++x) {
    labels[x] = "(" + g.label(x / n) + "," + h.label(x % n) + ")";
    for (std::size_t y = 0; y < order; ++y) {
      table[x * order + y] = g.mul(x / n, y / n) * n + h.mul(x % n, y % n);
    }
  }
  std::vector<Element> gens;
  for (Element a : g.generators()) gens.push_back(a * n);
  for (Element b : h.generators()) gens.push_back(b);
  return std::make_shared<const FiniteGroup>(spec, std::move(table), std::move(labels),
                                             std::move(gens));
}

/// Parses `C<n> | D<n> | S<n> (n<=5) | Q8 | <spec>x<spec>`. D<n> has order 2n.
inline GroupPtr make_group(std::string_view spec, std::size_t max_order = kDefaultMaxOrder) {
  if (spec.empty()) throw SpecError("unknown group spec ''");
  GroupPtr result;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = spec.find('x', start);
    const std::string_view token =
        spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    GroupPtr factor = detail::make_factor(token, max_order);
    result = result ? group_product(*result, *factor, max_order) : factor;
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return result;
}

}  // namespace fthlab
