#pragma once

// Complex functions on a finite group, and the translation/inversion actions.
// A GroupFunction also stands for a bounded measure (its density against
// counting measure).

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "error.hpp"
#include "group.hpp"
#include "random.hpp"

namespace fthlab {

class GroupFunction {
 public:
  explicit GroupFunction(GroupPtr group)
      : group_(std::move(group)), values_(Eigen::VectorXcd::Zero(checked_order(group_))) {}

  GroupFunction(GroupPtr group, Eigen::VectorXcd values)
      : group_(std::move(group)), values_(std::move(values)) {
    if (values_.size() != static_cast<Eigen::Index>(checked_order(group_))) {
      throw SpecError("function length " + std::to_string(values_.size()) +
                      " does not match group order " + std::to_string(group_->order()));
    }
    if (!values_.allFinite()) throw SpecError("function has non-finite entries");
  }

  static GroupFunction delta(GroupPtr group, Element a, Complex weight = 1.0) {
    if (!group->contains(a)) throw GroupMismatch("element index out of range");
    GroupFunction f(std::move(group));
    f.values_[static_cast<Eigen::Index>(a)] = weight;
    return f;
  }

  static GroupFunction constant(GroupPtr group, Complex c) {
    const auto n = static_cast<Eigen::Index>(group->order());
    return GroupFunction(std::move(group), Eigen::VectorXcd::Constant(n, c));
  }

  static GroupFunction random(GroupPtr group, Rng& rng) {
    const auto n = static_cast<Eigen::Index>(group->order());
    return GroupFunction(std::move(group), complex_gaussian(n, rng));
  }

  const FiniteGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  std::size_t size() const { return group_->order(); }

  const Eigen::VectorXcd& values() const { return values_; }
  Complex operator[](Element x) const { return values_[static_cast<Eigen::Index>(x)]; }
  Complex& operator[](Element x) { return values_[static_cast<Eigen::Index>(x)]; }

  GroupFunction& operator+=(const GroupFunction& o) {
    require_same(o);
    values_ += o.values_;
    return *this;
  }
  GroupFunction& operator-=(const GroupFunction& o) {
    require_same(o);
    values_ -= o.values_;
    return *this;
  }
  GroupFunction& operator*=(Complex c) {
    values_ *= c;
    return *this;
  }

  friend GroupFunction operator+(GroupFunction a, const GroupFunction& b) { return a += b; }
  friend GroupFunction operator-(GroupFunction a, const GroupFunction& b) { return a -= b; }
  friend GroupFunction operator*(Complex c, GroupFunction a) { return a *= c; }
  friend GroupFunction operator*(GroupFunction a, Complex c) { return a *= c; }

  void require_same(const GroupFunction& o) const {
    if (!same_group(*group_, *o.group_)) {
      throw GroupMismatch("functions live on different groups (" + group_->spec() + " vs " +
                          o.group_->spec() + ")");
    }
  }

 private:
  static std::size_t checked_order(const GroupPtr& g) {
    if (!g) throw SpecError("null group");
    return g->order();
  }

  GroupPtr group_;
  Eigen::VectorXcd values_;
};

enum class Side { left, right };

/// left: x -> phi(a x); right: x -> phi(x a).
inline GroupFunction translate(const GroupFunction& phi, Element a, Side side) {
  const FiniteGroup& g = phi.group();
  if (!g.contains(a)) {
    throw GroupMismatch("element " + std::to_string(a) + " is not in " + g.spec());
  }
  GroupFunction out(phi.group_ptr());
  for (Element x = 0; x < g.order(); ++x) {
    out[x] = phi[side == Side::left ? g.mul(a, x) : g.mul(x, a)];
  }
  return out;
}

/// x -> phi(x^{-1})
inline GroupFunction invert_fn(const GroupFunction& phi) {
  const FiniteGroup& g = phi.group();
  GroupFunction out(phi.group_ptr());
  for (Element x = 0; x < g.order(); ++x) out[x] = phi[g.inv(x)];
  return out;
}

}  // namespace fthlab
