#pragma once

#include <cmath>
#include <string>

#include "funcspace.hpp"

namespace fthlab {

/// Exponent pair (p, q) with q between 2 and p, plus the Riesz-Thorin weight t:
///   p < 2:  1/q = (1-t)/p + t/2
///   p > 2:  1/q = (1-t)/2 + t/p
struct ExponentContext {
  double p = 0, q = 0;
  double p_conj = 0, q_conj = 0;
  double t = 0;
  /// q == 2 (or q == p): endpoint context, t is 1 or 0.
  bool degenerate = false;

  bool strict() const { return !degenerate; }
};

/// Builds the context. q may equal 2 or p (flagged degenerate); anything
/// outside the closed interval between 2 and p is rejected.
inline ExponentContext interp_exponent(double p, double q) {
  if (!(p > 1.0) || std::isinf(p)) {
    throw SpecError("p must be a finite exponent > 1 (got " + std::to_string(p) + ")");
  }
  if (p == 2.0) throw SpecError("p must differ from 2");
  const double lo = std::min(p, 2.0), hi = std::max(p, 2.0);
  if (!(q >= lo && q <= hi)) {
    throw SpecError("q must lie between 2 and p (got p=" + std::to_string(p) +
                    ", q=" + std::to_string(q) + ")");
  }
  ExponentContext ctx;
  ctx.p = p;
  ctx.q = q;
  ctx.p_conj = conjugate_exponent(p);
  ctx.q_conj = conjugate_exponent(q);
  ctx.t = p < 2.0 ? 2.0 * (q - p) / (q * (2.0 - p)) : (2.0 - q) * p / ((2.0 - p) * q);
  ctx.degenerate = (q == 2.0 || q == p);
  return ctx;
}

/// Same as interp_exponent but requires q strictly between 2 and p.
inline ExponentContext strict_exponent(double p, double q) {
  ExponentContext ctx = interp_exponent(p, q);
  if (ctx.degenerate) {
    throw SpecError("q must lie strictly between 2 and p (got p=" + std::to_string(p) +
                    ", q=" + std::to_string(q) + ")");
  }
  return ctx;
}

}  // namespace fthlab
