#pragma once

// L^p norms, convolution, the involutions tau_p / tilde, the duality pairing
// and the elementary building blocks of A_p.
//
// Conventions (fixed once, everything else derives from them):
//   (phi * psi)(x) = sum_t phi(t) psi(t^{-1} x)
//   <f, g>         = sum_x f(x) conj(g(x))

#include <algorithm>
#include <cmath>
#include <limits>

#include "function.hpp"

namespace fthlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// p' = p / (p - 1), with 1' = inf and inf' = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline void require_exponent(double p) {
  if (!(p >= 1.0)) throw SpecError("exponent p must satisfy p >= 1 (got " + std::to_string(p) + ")");
}

/// Counting-measure L^p norm of a plain vector.
inline double lp_norm(const Eigen::VectorXcd& v, double p) {
  require_exponent(p);
  double peak = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) peak = std::max(peak, std::abs(v[i]));
  if (std::isinf(p) || peak == 0.0) return peak;
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  // scaled to avoid overflow for large p
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / peak, p);
  return peak * std::pow(s, 1.0 / p);
}

inline double lp_norm(const GroupFunction& phi, double p) { return lp_norm(phi.values(), p); }

inline GroupFunction convolve(const GroupFunction& phi, const GroupFunction& psi) {
  phi.require_same(psi);
  const FiniteGroup& g = phi.group();
  GroupFunction out(phi.group_ptr());
  for (Element t = 0; t < g.order(); ++t) {
    const Complex a = phi[t];
    if (a == Complex(0.0)) continue;
    const Element ti = g.inv(t);
    for (Element x = 0; x < g.order(); ++x) out[x] += a * psi[g.mul(ti, x)];
  }
  return out;
}

/// tau_p phi(x) = phi(x^{-1}) Delta(x^{-1})^{1/p}
inline GroupFunction tau(const GroupFunction& phi, double p) {
  const FiniteGroup& g = phi.group();
  GroupFunction out(phi.group_ptr());
  for (Element x = 0; x < g.order(); ++x) {
    const Element xi = g.inv(x);
    out[x] = phi[xi] * std::pow(FiniteGroup::modular(xi), 1.0 / p);
  }
  return out;
}

/// Pointwise complex conjugate (k-bar).
inline GroupFunction conj_fn(const GroupFunction& phi) {
  return GroupFunction(phi.group_ptr(), phi.values().conjugate());
}

/// phi~(x) = conj(phi(x^{-1}))
inline GroupFunction tilde(const GroupFunction& phi) { return conj_fn(invert_fn(phi)); }

/// <f, g> = sum_x f(x) conj(g(x)); linear in f, conjugate-linear in g.
inline Complex dual_pair(const GroupFunction& f, const GroupFunction& g) {
  f.require_same(g);
  return g.values().dot(f.values());  // Eigen's dot conjugates its left operand
}

/// Single A_p term k-bar * l-check: u(x) = sum_t conj(k(t)) l(x^{-1} t).
inline GroupFunction elementary_ap(const GroupFunction& k, const GroupFunction& l) {
  k.require_same(l);
  return convolve(conj_fn(k), invert_fn(l));
}

inline GroupFunction pointwise_mul(const GroupFunction& u, const GroupFunction& v) {
  u.require_same(v);
  return GroupFunction(u.group_ptr(), u.values().cwiseProduct(v.values()));
}

/// sum_x mu(x) u(x): a measure integrating a function.
inline Complex integrate(const GroupFunction& mu, const GroupFunction& u) {
  mu.require_same(u);
  return mu.values().cwiseProduct(u.values()).sum();
}

}  // namespace fthlab
