#pragma once

// Convolution operators as dense matrices. Entry (x, t) multiplies phi(t)
// and contributes to (T phi)(x).

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "exponents.hpp"
#include "funcspace.hpp"

namespace fthlab {

class OperatorMatrix {
 public:
  OperatorMatrix(GroupPtr group, Eigen::MatrixXcd entries, std::string provenance = "raw")
      : group_(std::move(group)), entries_(std::move(entries)), provenance_(std::move(provenance)) {
    if (!group_) throw SpecError("null group");
    const auto n = static_cast<Eigen::Index>(group_->order());
    if (entries_.rows() != n || entries_.cols() != n) {
      throw SpecError("operator must be square of dimension " + std::to_string(n));
    }
    if (!entries_.allFinite()) throw SpecError("operator has non-finite entries");
  }

  static OperatorMatrix identity(GroupPtr group) {
    const auto n = static_cast<Eigen::Index>(group->order());
    return OperatorMatrix(std::move(group), Eigen::MatrixXcd::Identity(n, n), "identity");
  }

  const FiniteGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::MatrixXcd& entries() { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string tag) { provenance_ = std::move(tag); }

  /// E_{p,q} constant attached by alpha: an upper bound on |||tau_p T tau_p|||_q.
  const std::optional<double>& certificate() const { return certificate_; }
  void set_certificate(double c) { certificate_ = c; }

  GroupFunction apply(const GroupFunction& phi) const {
    require_same(phi.group());
    return GroupFunction(phi.group_ptr(), entries_ * phi.values());
  }

  void require_same(const FiniteGroup& g) const {
    if (!same_group(*group_, g)) {
      throw GroupMismatch("operator on " + group_->spec() + " applied on " + g.spec());
    }
  }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    a.require_same(b.group());
    return OperatorMatrix(a.group_, a.entries_ * b.entries_, "product");
  }
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    a.require_same(b.group());
    return OperatorMatrix(a.group_, a.entries_ + b.entries_, "sum");
  }
  friend OperatorMatrix operator*(Complex c, const OperatorMatrix& a) {
    return OperatorMatrix(a.group_, c * a.entries_, a.provenance_);
  }

 private:
  GroupPtr group_;
  Eigen::MatrixXcd entries_;
  std::string provenance_;
  std::optional<double> certificate_;
};

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline std::string format_exponent(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

/// (L_a phi)(x) = phi(a x)
inline Eigen::MatrixXcd left_translation_matrix(const FiniteGroup& g, Element a) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Element x = 0; x < g.order(); ++x) {
    m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(g.mul(a, x))) = 1.0;
  }
  return m;
}

/// Matrix of tau_p; on a finite group this is the inversion permutation J.
inline Eigen::MatrixXcd tau_matrix(const FiniteGroup& g, double p) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Element x = 0; x < g.order(); ++x) {
    const Element xi = g.inv(x);
    m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xi)) =
        std::pow(FiniteGroup::modular(xi), 1.0 / p);
  }
  return m;
}

/// lambda_p(mu) phi = phi * (Delta^{1/p'} mu-check); entry (x, t) = mu(x^{-1} t).
inline OperatorMatrix lambda_op(const GroupFunction& mu, double p) {
  const FiniteGroup& g = mu.group();
  const double pc = conjugate_exponent(p);
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd m(n, n);
  for (Element x = 0; x < g.order(); ++x) {
    const Element xi = g.inv(x);
    for (Element t = 0; t < g.order(); ++t) {
      const double weight = std::pow(FiniteGroup::modular(g.mul(g.inv(t), x)), 1.0 / pc);
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) = weight * mu[g.mul(xi, t)];
    }
  }
  return OperatorMatrix(mu.group_ptr(), std::move(m), "lambda[p=" + format_exponent(p) + "]");
}

/// rho(mu) phi = mu * phi; entry (x, t) = mu(x t^{-1}). This is the operator
/// tau lambda(mu) tau, and commutes with right translations.
inline OperatorMatrix rho_op(const GroupFunction& mu) {
  const FiniteGroup& g = mu.group();
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd m(n, n);
  for (Element x = 0; x < g.order(); ++x) {
    for (Element t = 0; t < g.order(); ++t) {
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) = mu[g.mul(x, g.inv(t))];
    }
  }
  return OperatorMatrix(mu.group_ptr(), std::move(m), "rho");
}

inline constexpr double kCvTolerance = 1e-10;

struct CvCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Commutation with left translations by the stored generators.
inline CvCheck is_cv(const OperatorMatrix& t) {
  const FiniteGroup& g = t.group();
  double residual = 0.0;
  for (Element a : g.generators()) {
    const Eigen::MatrixXcd la = left_translation_matrix(g, a);
    residual = std::max(residual, max_abs_diff(t.entries() * la, la * t.entries()));
  }
  return {residual <= kCvTolerance, residual};
}

inline void require_cv(const OperatorMatrix& t, const std::string& where) {
  const CvCheck c = is_cv(t);
  if (!c.ok) throw NotConvolutionOperator(where + ": operator is not a convolution operator", c.residual);
}

/// Inverse of lambda_op: mu(t) = T(e, t).
inline GroupFunction operator_to_measure(const OperatorMatrix& t) {
  require_cv(t, "operator_to_measure");
  return GroupFunction(t.group_ptr(), t.entries().row(0).transpose());
}

/// Riesz-Thorin bound between the 1 and inf norms: |||M|||_q <= |M|_1^{1/q} |M|_inf^{1/q'}.
inline double schur_bound(const Eigen::MatrixXcd& m, double q) {
  const double col = m.cwiseAbs().colwise().sum().maxCoeff();
  const double row = m.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::isinf(q)) return row;
  if (q == 1.0) return col;
  return std::pow(col, 1.0 / q) * std::pow(row, 1.0 / conjugate_exponent(q));
}

namespace detail {
inline OperatorMatrix alpha_impl(const OperatorMatrix& t, const ExponentContext& ctx) {
  const FiniteGroup& g = t.group();
  const Eigen::MatrixXcd tp = tau_matrix(g, ctx.p);
  const Eigen::MatrixXcd tq = tau_matrix(g, ctx.q);
  const Eigen::MatrixXcd s = tp * t.entries() * tp;
  OperatorMatrix out(t.group_ptr(), tq * s * tq,
                     "alpha[p=" + format_exponent(ctx.p) + ",q=" + format_exponent(ctx.q) + "](" +
                         t.provenance() + ")");
  out.set_certificate(schur_bound(s, ctx.q));
  return out;
}
}  // namespace detail

/// alpha_{p,q}(T) = tau_q S tau_q with S = tau_p T tau_p, computed literally.
/// The attached certificate is an upper bound for |||S|||_q.
inline OperatorMatrix alpha(const OperatorMatrix& t, const ExponentContext& ctx) {
  require_cv(t, "alpha");
  return detail::alpha_impl(t, ctx);
}

/// Same computation without the CV precondition (used by negative controls).
inline OperatorMatrix alpha_unchecked(const OperatorMatrix& t, const ExponentContext& ctx) {
  return detail::alpha_impl(t, ctx);
}

}  // namespace fthlab
