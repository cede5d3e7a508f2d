#pragma once

// p -> p operator norms of dense complex matrices.
//
// p in {1, 2, inf} is exact. Other p use a multistart generalized power
// iteration (Boyd's ascent)
//     x <- psi_{p'}(T^* psi_p(T x)),   psi_s(z) = |z|^{s-1} z/|z|
// normalized in L^p. Each step does not decrease |T x|_p / |x|_p, so every
// reported value is a lower bound attained by its witness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "convop.hpp"
#include "parallel.hpp"

namespace fthlab {

enum class NormKind { exact, lower_bound };
enum class NormMethod { special_case, power_iteration, grid_oracle };

inline std::string to_string(NormKind k) { return k == NormKind::exact ? "exact" : "lower_bound"; }
inline std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::special_case: return "special_case";
    case NormMethod::power_iteration: return "power_iteration";
    case NormMethod::grid_oracle: return "grid_oracle";
  }
  return "?";
}

struct OpnormConfig {
  int restarts = 64;
  int max_iter = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  /// Extra starting vectors tried before the standard ones.
  std::vector<Eigen::VectorXcd> warm_starts;
};

struct NormEstimate {
  double p = 0;
  double value = 0;
  NormKind kind = NormKind::exact;
  NormMethod method = NormMethod::special_case;
  int restarts = 0;
  int iterations = 0;
  double tol = 0;
  Eigen::VectorXcd witness;
  std::uint64_t seed = 0;
  /// Largest per-step decrease of the ratio seen during the ascent (rounding only).
  double max_decrease = 0;
  /// grid_oracle only: resolution of the final refinement level.
  double grid_error = 0;
};

namespace detail {

inline Eigen::VectorXcd duality_map(const Eigen::VectorXcd& z, double s) {
  Eigen::VectorXcd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]);
    out[i] = a == 0.0 ? Complex(0.0) : z[i] * std::pow(a, s - 2.0);
  }
  return out;
}

struct Ascent {
  double ratio = 0;
  Eigen::VectorXcd x;
  int iterations = 0;
  double max_decrease = 0;
};

inline Ascent ascend(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& t_adj, double p,
                     const Eigen::VectorXcd& start, int max_iter, double tol) {
  const double pc = conjugate_exponent(p);
  Ascent a;
  const double n0 = lp_norm(start, p);
  if (n0 == 0.0) {
    a.x = start;
    return a;
  }
  a.x = start / n0;
  Eigen::VectorXcd y = t * a.x;
  a.ratio = lp_norm(y, p);
  for (int it = 0; it < max_iter && a.ratio > 0.0; ++it) {
    const Eigen::VectorXcd w = t_adj * duality_map(y, p);
    Eigen::VectorXcd xn = duality_map(w, pc);
    const double nx = lp_norm(xn, p);
    if (nx == 0.0) break;
    xn /= nx;
    Eigen::VectorXcd yn = t * xn;
    const double rn = lp_norm(yn, p);
    ++a.iterations;
    if (rn < a.ratio) {
      a.max_decrease = std::max(a.max_decrease, a.ratio - rn);
      break;
    }
    const double gain = rn - a.ratio;
    a.x = std::move(xn);
    y = std::move(yn);
    a.ratio = rn;
    if (gain <= tol * std::max(1.0, a.ratio)) break;
  }
  return a;
}

inline NormEstimate exact_estimate(double p, double value, Eigen::VectorXcd witness) {
  NormEstimate e;
  e.p = p;
  e.value = value;
  e.kind = NormKind::exact;
  e.method = NormMethod::special_case;
  e.witness = std::move(witness);
  return e;
}

inline Eigen::VectorXcd basis(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v[i] = 1.0;
  return v;
}

}  // namespace detail

/// Top singular value and right singular vector.
inline std::pair<double, Eigen::VectorXcd> top_singular(const Eigen::MatrixXcd& t) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeThinV);
  return {svd.singularValues()[0], svd.matrixV().col(0)};
}

inline NormEstimate opnorm(const Eigen::MatrixXcd& t, double p, const OpnormConfig& cfg = {}) {
  require_exponent(p);
  if (t.rows() != t.cols() || t.rows() == 0) throw SpecError("opnorm needs a non-empty square matrix");
  const Eigen::Index n = t.rows();

  NormEstimate est;
  if (t.cwiseAbs().maxCoeff() == 0.0) {
    est = detail::exact_estimate(p, 0.0, detail::basis(n, 0));
  } else if (p == 1.0) {
    Eigen::Index col = 0;
    const double v = t.cwiseAbs().colwise().sum().maxCoeff(&col);
    est = detail::exact_estimate(p, v, detail::basis(n, col));
  } else if (std::isinf(p)) {
    Eigen::Index row = 0;
    const double v = t.cwiseAbs().rowwise().sum().maxCoeff(&row);
    Eigen::VectorXcd w(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex z = t(row, j);
      w[j] = std::abs(z) == 0.0 ? Complex(1.0) : std::conj(z) / std::abs(z);
    }
    est = detail::exact_estimate(p, v, std::move(w));
  } else if (p == 2.0) {
    auto [sigma, v] = top_singular(t);
    est = detail::exact_estimate(p, sigma, std::move(v));
  } else {
    std::vector<Eigen::VectorXcd> starts(cfg.warm_starts.begin(), cfg.warm_starts.end());
    starts.push_back(top_singular(t).second);
    starts.push_back(Eigen::VectorXcd::Ones(n));
    for (Eigen::Index i = 0; i < n; ++i) starts.push_back(detail::basis(n, i));
    const std::size_t structured = starts.size();
    const std::size_t random_count =
        static_cast<std::size_t>(std::max<int>(0, cfg.restarts - static_cast<int>(structured)));
    for (std::size_t r = 0; r < random_count; ++r) {
      Rng rng(mix_seed(cfg.seed, r));
      starts.push_back(complex_gaussian(n, rng));
    }

    const Eigen::MatrixXcd t_adj = t.adjoint();
    std::vector<detail::Ascent> runs(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
      runs[i] = detail::ascend(t, t_adj, p, starts[i], cfg.max_iter, cfg.tol);
    });

    std::size_t best = 0;
    est.iterations = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      est.iterations += runs[i].iterations;
      est.max_decrease = std::max(est.max_decrease, runs[i].max_decrease);
      if (runs[i].ratio > runs[best].ratio) best = i;
    }
    est.p = p;
    est.value = runs[best].ratio;
    est.witness = runs[best].x;
    est.kind = NormKind::lower_bound;
    est.method = NormMethod::power_iteration;
    est.restarts = static_cast<int>(starts.size());
  }
  est.tol = cfg.tol;
  est.seed = cfg.seed;
  return est;
}

inline NormEstimate opnorm(const OperatorMatrix& t, double p, const OpnormConfig& cfg = {}) {
  return opnorm(t.entries(), p, cfg);
}

// ---------------------------------------------------------------------------
// Exhaustive grid oracle for dimensions <= 3.
//
// Directions are normalized so that one coordinate equals 1 (real, positive);
// the others range over a magnitude grid on [0, 1] times a phase grid. The
// sixteen best cells are each refined by a shrinking exhaustive local grid.
// The search never uses the power iteration, so it can serve as an independent
// check. grid_error bounds how far the true norm can sit above the value.

namespace detail {

struct GridPoint {
  Eigen::Index face = 0;
  std::vector<double> mag, phase;  // indexed by free coordinate
};

inline Eigen::VectorXcd grid_vector(Eigen::Index d, const GridPoint& g) {
  Eigen::VectorXcd x(d);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i == g.face) {
      x[i] = 1.0;
    } else {
      x[i] = std::polar(g.mag[k], g.phase[k]);
      ++k;
    }
  }
  return x;
}

inline double grid_ratio(const Eigen::MatrixXcd& t, double p, const Eigen::VectorXcd& x) {
  return lp_norm(t * x, p) / lp_norm(x, p);
}

// Visits every combination of per-coordinate offsets in [-half, half].
template <typename Visit>
void for_each_offset(std::size_t params, int half, Visit&& visit) {
  std::vector<int> idx(params, -half);
  while (true) {
    visit(idx);
    std::size_t k = 0;
    while (k < params && idx[k] == half) idx[k++] = -half;
    if (k == params) return;
    ++idx[k];
  }
}

}  // namespace detail

inline NormEstimate opnorm_grid_oracle(const Eigen::MatrixXcd& t, double p, int resolution) {
  require_exponent(p);
  const Eigen::Index d = t.rows();
  if (d != t.cols() || d == 0) throw SpecError("grid oracle needs a non-empty square matrix");
  if (d > 3) throw SpecError("grid oracle supports dimension <= 3 (got " + std::to_string(d) + ")");
  if (resolution < 2) throw SpecError("grid resolution must be >= 2");
  const double two_pi = 2.0 * std::numbers::pi;
  const std::size_t free = static_cast<std::size_t>(d - 1);

  // coarse pass: keep the best few cells, each is refined separately
  constexpr std::size_t kSeeds = 16;
  std::vector<std::pair<double, detail::GridPoint>> seeds;
  auto offer = [&](double r, const detail::GridPoint& g) {
    if (seeds.size() == kSeeds && r <= seeds.back().first) return;
    auto pos = std::find_if(seeds.begin(), seeds.end(), [&](const auto& s) { return r > s.first; });
    seeds.insert(pos, {r, g});
    if (seeds.size() > kSeeds) seeds.pop_back();
  };
  for (Eigen::Index face = 0; face < d; ++face) {
    // magnitudes in {0..R}/R, phases in {0..R-1} 2pi/R
    detail::GridPoint g{face, std::vector<double>(free), std::vector<double>(free)};
    const std::size_t combos = [&] {
      std::size_t c = 1;
      for (std::size_t k = 0; k < free; ++k) c *= static_cast<std::size_t>((resolution + 1) * resolution);
      return c;
    }();
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rest = c;
      for (std::size_t k = 0; k < free; ++k) {
        const int m = static_cast<int>(rest % static_cast<std::size_t>(resolution + 1));
        rest /= static_cast<std::size_t>(resolution + 1);
        const int ph = static_cast<int>(rest % static_cast<std::size_t>(resolution));
        rest /= static_cast<std::size_t>(resolution);
        g.mag[k] = static_cast<double>(m) / resolution;
        g.phase[k] = two_pi * ph / resolution;
      }
      offer(detail::grid_ratio(t, p, detail::grid_vector(d, g)), g);
    }
  }

  // Refinement works in real/imaginary offsets; polar steps stall near zero.
  auto to_vector = [&](Eigen::Index face, const std::vector<Complex>& z) {
    Eigen::VectorXcd x(d);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < d; ++i) x[i] = i == face ? Complex(1.0) : z[k++];
    return x;
  };
  double best = -1.0;
  Eigen::VectorXcd best_x;
  for (const auto& [r0, start] : seeds) {
    double local = r0;
    std::vector<Complex> z(free);
    for (std::size_t k = 0; k < free; ++k) z[k] = std::polar(start.mag[k], start.phase[k]);
    double h = 1.0 / resolution;
    for (int sweep = 0; free > 0 && h > 1e-10 && sweep < 4000; ++sweep) {
      const std::vector<Complex> center = z;
      detail::for_each_offset(2 * free, 2, [&](const std::vector<int>& off) {
        std::vector<Complex> w = center;
        for (std::size_t k = 0; k < free; ++k) w[k] += 0.5 * h * Complex(off[k], off[free + k]);
        const double r = detail::grid_ratio(t, p, to_vector(start.face, w));
        if (r > local) {
          local = r;
          z = w;
        }
      });
      // keep the step while the centre keeps moving
      if (z == center) h *= 0.5;
    }
    if (local > best) {
      best = local;
      best_x = to_vector(start.face, z);
    }
  }

  NormEstimate est;
  est.p = p;
  est.value = best;
  est.kind = NormKind::exact;
  est.method = NormMethod::grid_oracle;
  est.witness = best_x;
  // Every direction lies within half a coarse cell of a grid point, and the
  // ratio moves by at most 2 |||T||| |dx|_p / |x|_p, so the true norm lies in
  // [value, value + grid_error].
  const double hm = 1.0 / resolution, hp = two_pi / resolution;
  est.grid_error = free == 0 ? 0.0 : schur_bound(t, p) * std::pow(static_cast<double>(free), 1.0 / p) * (hm + hp);
  return est;
}

inline NormEstimate opnorm_grid_oracle(const OperatorMatrix& t, double p, int resolution) {
  return opnorm_grid_oracle(t.entries(), p, resolution);
}

// ---------------------------------------------------------------------------
// Riesz-Thorin interpolation check.

struct InterpReport {
  double norm_p = 0, norm_q = 0, norm_2 = 0;
  double lhs = 0, rhs = 0;
  /// lhs / rhs - 1 (0 when both sides vanish)
  double margin = 0;
  bool pass = false;
};

inline constexpr double kInterpRelTol = 1e-3;

/// |||T|||_q <= |||T|||_p^{1-t} |||T|||_2^t (p<2), |||T|||_2^{1-t} |||T|||_p^t (p>2).
inline InterpReport interp_bound_check(const Eigen::MatrixXcd& t, const ExponentContext& ctx,
                                       const OpnormConfig& cfg = {}) {
  InterpReport r;
  const NormEstimate nq = opnorm(t, ctx.q, cfg);
  OpnormConfig warm = cfg;
  warm.warm_starts.push_back(nq.witness);
  r.norm_q = nq.value;
  r.norm_p = opnorm(t, ctx.p, warm).value;
  r.norm_2 = opnorm(t, 2.0, cfg).value;
  r.lhs = r.norm_q;
  r.rhs = ctx.p < 2.0 ? std::pow(r.norm_p, 1.0 - ctx.t) * std::pow(r.norm_2, ctx.t)
                      : std::pow(r.norm_2, 1.0 - ctx.t) * std::pow(r.norm_p, ctx.t);
  r.margin = r.rhs > 0.0 ? r.lhs / r.rhs - 1.0 : (r.lhs > 0.0 ? kInf : 0.0);
  r.pass = r.margin <= kInterpRelTol;
  return r;
}

inline InterpReport interp_bound_check(const OperatorMatrix& t, const ExponentContext& ctx,
                                       const OpnormConfig& cfg = {}) {
  return interp_bound_check(t.entries(), ctx, cfg);
}

}  // namespace fthlab
