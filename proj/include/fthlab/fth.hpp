#pragma once

// The algebra A_p(G): representations u = sum_n conj(k_n) * check(l_n),
// primal (representation cost) and dual (pairing against convolution
// operators) estimates of ||u||_{A_p}, the pairing Psi_p and the module
// action of A_p on CV_p.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "convop.hpp"
#include "opnorm.hpp"

namespace fthlab {

struct ApPair {
  GroupFunction k;  // in L^p
  GroupFunction l;  // in L^{p'}
};

class ApRepresentation {
 public:
  ApRepresentation(GroupPtr group, double p) : group_(std::move(group)), p_(p) {
    if (!(p > 1.0) || std::isinf(p)) throw SpecError("A_p needs 1 < p < inf");
  }

  void add(GroupFunction k, GroupFunction l) {
    if (!same_group(*group_, k.group()) || !same_group(*group_, l.group())) {
      throw GroupMismatch("representation pair lives on a different group");
    }
    pairs_.push_back({std::move(k), std::move(l)});
  }

  const GroupPtr& group_ptr() const { return group_; }
  const FiniteGroup& group() const { return *group_; }
  double p() const { return p_; }
  const std::vector<ApPair>& pairs() const { return pairs_; }
  std::size_t rank() const { return pairs_.size(); }

  /// sum_n N_p(k_n) N_{p'}(l_n)
  double cost() const { return cost_at(p_); }

  /// Cost of the same pairs measured with another exponent.
  double cost_at(double p) const {
    const double pc = conjugate_exponent(p);
    double c = 0.0;
    for (const auto& pr : pairs_) c += lp_norm(pr.k, p) * lp_norm(pr.l, pc);
    return c;
  }

  /// Same pairs read as an element of A_q.
  ApRepresentation with_exponent(double q) const {
    ApRepresentation r(group_, q);
    r.pairs_ = pairs_;
    return r;
  }

 private:
  GroupPtr group_;
  double p_;
  std::vector<ApPair> pairs_;
};

inline GroupFunction synthesize(const ApRepresentation& rep) {
  GroupFunction u(rep.group_ptr());
  for (const auto& pr : rep.pairs()) u += elementary_ap(pr.k, pr.l);
  return u;
}

/// {(conj(u(a)) delta_a, delta_e) : u(a) != 0}; cost sum_a |u(a)|.
inline ApRepresentation canonical_rep(const GroupFunction& u, double p) {
  ApRepresentation rep(u.group_ptr(), p);
  for (Element a = 0; a < u.size(); ++a) {
    if (u[a] == Complex(0.0)) continue;
    rep.add(GroupFunction::delta(u.group_ptr(), a, std::conj(u[a])),
            GroupFunction::delta(u.group_ptr(), FiniteGroup::identity()));
  }
  return rep;
}

/// Random rank-r representation with complex Gaussian entries.
inline ApRepresentation random_rep(const GroupPtr& g, double p, std::size_t rank, Rng& rng) {
  ApRepresentation rep(g, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g->order()));
  for (std::size_t i = 0; i < rank; ++i) {
    GroupFunction k = scale * GroupFunction::random(g, rng);
    GroupFunction l = scale * GroupFunction::random(g, rng);
    rep.add(std::move(k), std::move(l));
  }
  return rep;
}

/// Representation from the SVD of B(s, t) = u(s t^{-1}) / |G|, which
/// satisfies u(x) = sum_t B(t, x^{-1} t). Optimal for p = 2.
inline ApRepresentation svd_rep(const GroupFunction& u, double p, std::size_t max_rank = 0) {
  const FiniteGroup& g = u.group();
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd b(n, n);
  for (Element s = 0; s < g.order(); ++s) {
    for (Element t = 0; t < g.order(); ++t) {
      b(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
          u[g.mul(s, g.inv(t))] / static_cast<double>(n);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  ApRepresentation rep(u.group_ptr(), p);
  const Eigen::Index limit = max_rank == 0 ? n : std::min<Eigen::Index>(n, static_cast<Eigen::Index>(max_rank));
  const double floor = sigma.size() > 0 ? sigma[0] * 1e-14 : 0.0;
  for (Eigen::Index i = 0; i < limit; ++i) {
    if (sigma[i] <= floor) break;
    // conj(k)(s) l(t) = sigma_i U(s,i) conj(V(t,i))
    rep.add(GroupFunction(u.group_ptr(), sigma[i] * svd.matrixU().col(i).conjugate()),
            GroupFunction(u.group_ptr(), svd.matrixV().col(i).conjugate()));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Pairing and module action

/// Psi_p(T)(u) = sum_n conj(<T tau_p k_n, tau_{p'} l_n>).
inline Complex pairing(const ApRepresentation& rep, const OperatorMatrix& t) {
  t.require_same(rep.group());
  const double p = rep.p(), pc = conjugate_exponent(p);
  Complex total = 0.0;
  for (const auto& pr : rep.pairs()) {
    total += std::conj(dual_pair(t.apply(tau(pr.k, p)), tau(pr.l, pc)));
  }
  return total;
}

/// uT = sum_n sum_t Dbar_{l_n,t} T D_{k_n,t}, with D_{k,t} = diag_x k(x^{-1} t)
/// and Dbar_{l,t} = diag_x conj(l(x^{-1} t)). Diagonal scalings act entrywise,
/// so the sum is T times the weight W(x,s) = sum_n sum_t conj(l_n(x^{-1}t)) k_n(s^{-1}t).
inline OperatorMatrix module_action_unchecked(const ApRepresentation& rep, const OperatorMatrix& t) {
  t.require_same(rep.group());
  const FiniteGroup& g = rep.group();
  const std::size_t n = g.order();
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& pr : rep.pairs()) {
    for (Element tt = 0; tt < n; ++tt) {
      for (Element x = 0; x < n; ++x) {
        const Complex dl = std::conj(pr.l[g.mul(g.inv(x), tt)]);
        if (dl == Complex(0.0)) continue;
        for (Element s = 0; s < n; ++s) {
          w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(s)) += dl * pr.k[g.mul(g.inv(s), tt)];
        }
      }
    }
  }
  return OperatorMatrix(rep.group_ptr(), t.entries().cwiseProduct(w), "module(" + t.provenance() + ")");
}

inline OperatorMatrix module_action(const ApRepresentation& rep, const OperatorMatrix& t) {
  require_cv(t, "module_action");
  return module_action_unchecked(rep, t);
}

// ---------------------------------------------------------------------------
// Norm estimation

struct PrimalConfig {
  /// 0 means |G|.
  std::size_t rank = 0;
  int restarts = 2;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

struct PrimalResult {
  double upper = 0;
  ApRepresentation rep;
};

struct DualConfig {
  int restarts = 4;
  int iterations = 150;
  std::uint64_t seed = 0;
  /// Denominator estimates during the search.
  OpnormConfig inner{0, 200, 1e-9, 0, {}};
  /// Re-evaluation of the final candidates.
  OpnormConfig final_eval{};
};

struct DualResult {
  double lower = 0;
  std::optional<GroupFunction> measure;
};

struct ApNormConfig {
  PrimalConfig primal;
  DualConfig dual;
};

struct ApNormEstimate {
  double p = 0;
  double upper = 0;
  double lower = 0;
  ApRepresentation witness_rep;
  std::optional<GroupFunction> witness_measure;
  double gap() const { return upper - lower; }
};

namespace detail {

// u = scale * phase * normalized, with max |normalized| = 1 and the first
// near-maximal entry real positive. Both optimizers work on `normalized`, so
// their output is homogeneous in u.
struct Normalized {
  GroupFunction u;
  double scale = 0;
  Complex phase = 1.0;
};

inline Normalized normalize(const GroupFunction& u) {
  const double peak = u.values().cwiseAbs().maxCoeff();
  Normalized out{u, peak, 1.0};
  if (peak == 0.0) return out;
  for (Element x = 0; x < u.size(); ++x) {
    if (std::abs(u[x]) >= peak * (1.0 - 1e-12)) {
      out.phase = u[x] / std::abs(u[x]);
      break;
    }
  }
  out.u = (1.0 / (peak * out.phase)) * u;
  return out;
}

// Scales every k by c (so the synthesized function is scaled by conj(c)).
inline ApRepresentation scale_rep(const ApRepresentation& rep, Complex c) {
  ApRepresentation out(rep.group_ptr(), rep.p());
  for (const auto& pr : rep.pairs()) out.add(c * pr.k, pr.l);
  return out;
}

// Dense parametrization used by the local descent: row i holds pair i.
struct RepMatrices {
  Eigen::MatrixXcd k, l;
};

inline RepMatrices to_matrices(const ApRepresentation& rep) {
  const auto r = static_cast<Eigen::Index>(rep.rank());
  const auto n = static_cast<Eigen::Index>(rep.group().order());
  RepMatrices m{Eigen::MatrixXcd(r, n), Eigen::MatrixXcd(r, n)};
  for (Eigen::Index i = 0; i < r; ++i) {
    m.k.row(i) = rep.pairs()[static_cast<std::size_t>(i)].k.values().transpose();
    m.l.row(i) = rep.pairs()[static_cast<std::size_t>(i)].l.values().transpose();
  }
  return m;
}

inline ApRepresentation from_matrices(const GroupPtr& g, double p, const RepMatrices& m) {
  ApRepresentation rep(g, p);
  for (Eigen::Index i = 0; i < m.k.rows(); ++i) {
    rep.add(GroupFunction(g, m.k.row(i).transpose()), GroupFunction(g, m.l.row(i).transpose()));
  }
  return rep;
}

// Penalized objective  sum_i N_p(k_i) N_p'(l_i) + rho/2 |synth - u|^2  and its
// gradient (real gradient written as a complex array).
class PenaltyProblem {
 public:
  PenaltyProblem(const FiniteGroup& g, const GroupFunction& u, double p)
      : g_(g), u_(u.values()), p_(p), pc_(conjugate_exponent(p)), n_(static_cast<Eigen::Index>(g.order())) {
    // xinv_t(x, t) = x^{-1} t ; x_s(x, s) = x s
    xinv_t_.resize(n_, n_);
    x_s_.resize(n_, n_);
    for (Element x = 0; x < g.order(); ++x) {
      for (Element t = 0; t < g.order(); ++t) {
        xinv_t_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) =
            static_cast<Eigen::Index>(g.mul(g.inv(x), t));
        x_s_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) =
            static_cast<Eigen::Index>(g.mul(x, t));
      }
    }
  }

  Eigen::VectorXcd synth(const RepMatrices& m) const {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n_);
    for (Eigen::Index i = 0; i < m.k.rows(); ++i) {
      for (Eigen::Index x = 0; x < n_; ++x) {
        Complex acc = 0.0;
        for (Eigen::Index t = 0; t < n_; ++t) acc += std::conj(m.k(i, t)) * m.l(i, xinv_t_(x, t));
        s[x] += acc;
      }
    }
    return s;
  }

  double cost(const RepMatrices& m) const {
    double c = 0.0;
    for (Eigen::Index i = 0; i < m.k.rows(); ++i) {
      c += lp_norm(Eigen::VectorXcd(m.k.row(i).transpose()), p_) *
           lp_norm(Eigen::VectorXcd(m.l.row(i).transpose()), pc_);
    }
    return c;
  }

  double value(const RepMatrices& m, double rho) const {
    return cost(m) + 0.5 * rho * (synth(m) - u_).squaredNorm();
  }

  RepMatrices gradient(const RepMatrices& m, double rho) const {
    const Eigen::VectorXcd res = synth(m) - u_;
    RepMatrices gr{Eigen::MatrixXcd::Zero(m.k.rows(), n_), Eigen::MatrixXcd::Zero(m.l.rows(), n_)};
    for (Eigen::Index i = 0; i < m.k.rows(); ++i) {
      const Eigen::VectorXcd ki = m.k.row(i).transpose(), li = m.l.row(i).transpose();
      const double nk = lp_norm(ki, p_), nl = lp_norm(li, pc_);
      if (nk > 0.0) gr.k.row(i) = nl * norm_gradient(ki, p_, nk).transpose();
      if (nl > 0.0) gr.l.row(i) = nk * norm_gradient(li, pc_, nl).transpose();
      for (Eigen::Index t = 0; t < n_; ++t) {
        Complex gk = 0.0, gl = 0.0;
        for (Eigen::Index x = 0; x < n_; ++x) {
          gk += std::conj(res[x]) * m.l(i, xinv_t_(x, t));
          gl += res[x] * m.k(i, x_s_(x, t));
        }
        gr.k(i, t) += rho * gk;
        gr.l(i, t) += rho * gl;
      }
    }
    return gr;
  }

  // Exact feasibility: minimum-norm correction of the l's with the k's fixed.
  void correct_l(RepMatrices& m) const {
    const Eigen::Index r = m.k.rows();
    if (r == 0) return;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_, r * n_);
    for (Eigen::Index x = 0; x < n_; ++x) {
      for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index s = 0; s < n_; ++s) a(x, i * n_ + s) = std::conj(m.k(i, x_s_(x, s)));
      }
    }
    const Eigen::VectorXcd res = u_ - synth(m);
    const Eigen::VectorXcd delta = a.completeOrthogonalDecomposition().solve(res);
    if (!delta.allFinite()) return;
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index s = 0; s < n_; ++s) m.l(i, s) += delta[i * n_ + s];
    }
  }

  const Eigen::VectorXcd& target() const { return u_; }

 private:
  static Eigen::VectorXcd norm_gradient(const Eigen::VectorXcd& v, double p, double norm) {
    Eigen::VectorXcd g(v.size());
    const double scale = std::pow(norm, 1.0 - p);
    for (Eigen::Index t = 0; t < v.size(); ++t) {
      const double a = std::abs(v[t]);
      g[t] = a == 0.0 ? Complex(0.0) : scale * std::pow(a, p - 2.0) * v[t];
    }
    return g;
  }

  const FiniteGroup& g_;
  Eigen::VectorXcd u_;
  double p_, pc_;
  Eigen::Index n_;
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> xinv_t_, x_s_;
};

inline double squared_norm(const RepMatrices& m) { return m.k.squaredNorm() + m.l.squaredNorm(); }

// Penalty continuation with Armijo-backtracked gradient steps, followed by
// the exact repair (least-squares correction of the l's, then the canonical
// representation of whatever residual is left).
inline ApRepresentation descend(const GroupPtr& g, const GroupFunction& u, double p,
                                const ApRepresentation& start, int max_iter) {
  PenaltyProblem prob(*g, u, p);
  RepMatrices m = to_matrices(start);
  static constexpr double kRho[] = {1.0, 10.0, 100.0, 1e3, 1e4};
  const int per_stage = std::max(1, max_iter / 5);
  double step = 1e-2;
  for (double rho : kRho) {
    double f = prob.value(m, rho);
    for (int it = 0; it < per_stage; ++it) {
      const RepMatrices gr = prob.gradient(m, rho);
      const double gn = squared_norm(gr);
      if (gn < 1e-28) break;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        RepMatrices trial{m.k - step * gr.k, m.l - step * gr.l};
        const double ft = prob.value(trial, rho);
        if (ft <= f - 1e-4 * step * gn) {
          m = std::move(trial);
          f = ft;
          moved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    step = std::max(step / 10.0, 1e-8);
  }
  prob.correct_l(m);
  ApRepresentation rep = from_matrices(g, p, m);
  const GroupFunction residual = u - synthesize(rep);
  const ApRepresentation fix = canonical_rep(residual, p);
  for (const auto& pr : fix.pairs()) rep.add(pr.k, pr.l);
  return rep;
}

}  // namespace detail

/// Upper bound for ||u||_{A_p}: the cheapest exactly-feasible representation
/// found among the canonical and SVD representations, an optional hint, and
/// local descents from the SVD representation, the hint and random pairs.
inline PrimalResult ap_norm_primal(const GroupFunction& u, double p, const PrimalConfig& cfg = {},
                                   const ApRepresentation* hint = nullptr) {
  const GroupPtr& g = u.group_ptr();
  const detail::Normalized nu = detail::normalize(u);
  if (nu.scale == 0.0) return {0.0, ApRepresentation(g, p)};
  const std::size_t rank = cfg.rank == 0 ? g->order() : cfg.rank;
  // rep(u) -> rep(u / (scale*phase)): k scales by phase / scale
  const Complex to_norm = nu.phase / nu.scale;

  std::vector<ApRepresentation> fixed;
  std::vector<ApRepresentation> starts;
  fixed.push_back(canonical_rep(nu.u, p));
  fixed.push_back(svd_rep(nu.u, p));
  starts.push_back(svd_rep(nu.u, p, rank));
  if (hint) {
    ApRepresentation h = detail::scale_rep(hint->with_exponent(p), to_norm);
    fixed.push_back(h);
    starts.push_back(std::move(h));
  }
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    starts.push_back(random_rep(g, p, rank, rng));
  }

  std::vector<std::optional<ApRepresentation>> descended(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    descended[i] = detail::descend(g, nu.u, p, starts[i], cfg.max_iter);
  });

  const ApRepresentation* best = &fixed.front();
  double best_cost = best->cost();
  auto consider = [&](const ApRepresentation& r) {
    const double c = r.cost();
    if (c < best_cost) {
      best_cost = c;
      best = &r;
    }
  };
  for (const auto& r : fixed) consider(r);
  for (const auto& r : descended) consider(*r);

  ApRepresentation out = detail::scale_rep(*best, nu.scale * std::conj(nu.phase));
  const double cost = out.cost();
  return {cost, std::move(out)};
}

/// Measure nu = tilde(mu) whose lambda is the (CV-averaged) polar factor of
/// lambda(check u); optimal dual witness for p = 2.
inline GroupFunction polar_measure(const GroupFunction& u) {
  const FiniteGroup& g = u.group();
  const OperatorMatrix a = lambda_op(invert_fn(u), 2.0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.entries(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXcd w = svd.matrixU() * svd.matrixV().adjoint();
  GroupFunction nu(u.group_ptr());
  for (Element y = 0; y < g.order(); ++y) {
    Complex acc = 0.0;
    for (Element x = 0; x < g.order(); ++x) {
      acc += w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(g.mul(x, y)));
    }
    nu[y] = acc / static_cast<double>(g.order());
  }
  return tilde(nu);
}

namespace detail {

struct DualEval {
  double ratio = 0;
  Eigen::VectorXcd witness;
};

inline DualEval dual_ratio(const GroupFunction& u, const GroupFunction& mu, double p, OpnormConfig cfg,
                           const Eigen::VectorXcd* warm) {
  if (warm && warm->size() > 0) cfg.warm_starts.push_back(*warm);
  const NormEstimate den = opnorm(lambda_op(tilde(mu), p), p, cfg);
  if (den.value == 0.0) return {0.0, den.witness};
  return {std::abs(integrate(mu, u)) / den.value, den.witness};
}

}  // namespace detail

/// Lower bound for ||u||_{A_p} = sup |sum mu u| / |||lambda_p(tilde mu)|||_p.
inline DualResult ap_norm_dual(const GroupFunction& u, double p, const DualConfig& cfg = {}) {
  const detail::Normalized nu = detail::normalize(u);
  if (nu.scale == 0.0) return {0.0, std::nullopt};
  const GroupPtr& g = u.group_ptr();
  const GroupFunction& v = nu.u;

  struct Candidate {
    GroupFunction mu;
    detail::DualEval eval;
  };
  std::vector<GroupFunction> seeds;
  {
    Eigen::Index arg = 0;
    v.values().cwiseAbs().maxCoeff(&arg);
    const Complex z = v[static_cast<Element>(arg)];
    seeds.push_back(GroupFunction::delta(g, static_cast<Element>(arg), std::conj(z) / std::abs(z)));
  }
  seeds.push_back(polar_measure(v));
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    seeds.push_back(GroupFunction::random(g, rng));
  }

  std::vector<std::optional<Candidate>> cands(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    cands[i] = Candidate{seeds[i], detail::dual_ratio(v, seeds[i], p, cfg.inner, nullptr)};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (cands[i]->eval.ratio > cands[best]->eval.ratio) best = i;
  }

  // (1+1) evolution strategy on the best seed; the ratio is homogeneous so
  // the step size is relative to the current peak.
  Candidate cur = *cands[best];
  Rng rng(mix_seed(cfg.seed, 0xd0a1ULL));
  double sigma = 0.3;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double peak = cur.mu.values().cwiseAbs().maxCoeff();
    GroupFunction trial = cur.mu + (sigma * peak) * GroupFunction::random(g, rng);
    const detail::DualEval ev = detail::dual_ratio(v, trial, p, cfg.inner, &cur.eval.witness);
    if (ev.ratio > cur.eval.ratio) {
      cur = Candidate{std::move(trial), ev};
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma = std::max(1e-6, sigma * 0.85);
    }
  }

  // Final values come from the full-strength estimator.
  std::vector<Candidate> finals = {cur, *cands[0], *cands[1]};
  DualResult out;
  for (auto& c : finals) {
    const detail::DualEval ev = detail::dual_ratio(v, c.mu, p, cfg.final_eval, &c.eval.witness);
    if (!out.measure || ev.ratio > out.lower) {
      out.lower = ev.ratio;
      out.measure = c.mu;
    }
  }
  out.lower *= nu.scale;
  return out;
}

inline ApNormEstimate ap_norm(const GroupFunction& u, double p, const ApNormConfig& cfg = {}) {
  PrimalResult primal = ap_norm_primal(u, p, cfg.primal);
  const DualResult dual = ap_norm_dual(u, p, cfg.dual);
  if (primal.upper > 0.0 && (primal.upper - dual.lower) > 0.1 * primal.upper) {
    PrimalConfig wide = cfg.primal;
    wide.rank = 2 * u.size();
    PrimalResult retry = ap_norm_primal(u, p, wide, &primal.rep);
    if (retry.upper < primal.upper) primal = std::move(retry);
  }
  return {p, primal.upper, dual.lower, std::move(primal.rep), dual.measure};
}

}  // namespace fthlab
