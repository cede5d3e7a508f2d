#pragma once

// Randomized verification suites. Each check draws seeded random inputs,
// evaluates one or more parts (exact identities or estimate-based
// inequalities) and keeps the worst margin per part.
//
// Inequality parts put lower-bound estimators on the left and certificates
// (representation costs) or high-restart estimates on the right; a part
// passes when lhs - rhs <= tol.

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fth.hpp"

namespace fthlab {

enum class CheckId { thm1, thm3, prop5, thm7, thm8, thm9, cor10, thm11, riesz };

inline const std::vector<std::pair<CheckId, std::string>>& check_names() {
  static const std::vector<std::pair<CheckId, std::string>> names = {
      {CheckId::thm1, "thm1"},   {CheckId::thm3, "thm3"}, {CheckId::prop5, "prop5"},
      {CheckId::thm7, "thm7"},   {CheckId::thm8, "thm8"}, {CheckId::thm9, "thm9"},
      {CheckId::cor10, "cor10"}, {CheckId::thm11, "thm11"}, {CheckId::riesz, "riesz"}};
  return names;
}

inline std::string to_string(CheckId id) {
  for (const auto& [k, v] : check_names()) {
    if (k == id) return v;
  }
  return "?";
}

inline CheckId parse_check_id(const std::string& s) {
  for (const auto& [k, v] : check_names()) {
    if (v == s) return k;
  }
  throw SpecError("unknown check id '" + s + "'");
}

enum class PartKind { identity, inequality };
inline std::string to_string(PartKind k) { return k == PartKind::identity ? "identity" : "inequality"; }

struct CheckPart {
  std::string name;
  PartKind kind = PartKind::identity;
  double tol = 0;
  /// identity: max residual; inequality: max of lhs - rhs (relative for riesz)
  double worst_margin = -kInf;
  std::size_t worst_trial = 0;
  bool pass = true;
};

/// Inputs of the trial that produced the worst margin.
struct Witness {
  std::string part;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::map<std::string, Eigen::VectorXcd> inputs;
};

struct CheckReport {
  std::string check_id;
  std::string group;
  double p = 0, q = 0, t = 0;
  std::size_t trials = 0;
  bool pass = true;
  double worst_margin = 0;
  double tol = 0;
  std::vector<CheckPart> parts;
  std::optional<Witness> witness;
  std::uint64_t seed = 0;
  double runtime_ms = 0;
  bool fault_injected = false;
};

struct CheckConfig {
  std::size_t trials = 25;
  std::uint64_t seed = 1;
  /// inequality tolerance (absolute, lhs - rhs)
  double tol = 1e-4;
  /// overrides the per-part identity tolerances (1e-10, or 1e-12 for the
  /// tau-conjugation identities)
  std::optional<double> identity_tol;
  /// rank of the random representations of u and v
  std::size_t rep_rank = 2;
  /// perturb entry (0,1) of every lambda operator by 0.1
  bool inject_fault = false;
  OpnormConfig opnorm{};
  DualConfig dual{2, 40, 0, {0, 200, 1e-9, 0, {}}, {}};
};

/// Default q for checks where it was not given: 2 for thm1, else midway
/// between 2 and p.
inline double default_q(CheckId id, double p) { return id == CheckId::thm1 ? 2.0 : (p + 2.0) / 2.0; }

/// Exponent context for a check, validating its requirements on (p, q).
inline ExponentContext check_context(CheckId id, double p, double q) {
  switch (id) {
    case CheckId::thm1:
      if (q != 2.0) throw SpecError("thm1 runs on the q = 2 path (got q=" + std::to_string(q) + ")");
      return interp_exponent(p, 2.0);
    case CheckId::cor10:
    case CheckId::thm9:
    case CheckId::thm11:
    case CheckId::thm8:
    case CheckId::riesz:
      return strict_exponent(p, q);
    default:
      return interp_exponent(p, q);
  }
}

namespace detail {

inline constexpr double kFaultSize = 0.1;

struct TrialResult {
  std::vector<double> margins;
  std::map<std::string, Eigen::VectorXcd> inputs;
};

class CheckRunner {
 public:
  CheckRunner(CheckId id, GroupPtr g, const ExponentContext& ctx, const CheckConfig& cfg)
      : id_(id), g_(std::move(g)), ctx_(ctx), cfg_(cfg) {}

  std::vector<CheckPart> parts() const {
    const auto ident = [&](std::string name, double def) {
      return CheckPart{std::move(name), PartKind::identity, cfg_.identity_tol.value_or(def)};
    };
    const auto ineq = [&](std::string name) { return CheckPart{std::move(name), PartKind::inequality, cfg_.tol}; };
    std::vector<CheckPart> out;
    switch (id_) {
      case CheckId::thm1: out = {ineq("l2_bound")}; break;
      case CheckId::thm3: out = {ineq("lq_bound")}; break;
      case CheckId::prop5: out = {ident("tau_lambda_tau_eq_rho", 1e-12)}; break;
      case CheckId::thm7:
        out = {ident("alpha_lambda_eq_lambda_q", 1e-12), ident("alpha_module_in_cv", 1e-10),
               ineq("alpha_module_bound")};
        break;
      case CheckId::thm8:
        out = {ineq("product_norm_bound"), ident("pairing_identity", 1e-10), ident("cv_membership", 1e-10)};
        break;
      case CheckId::thm9: out = {ineq("alpha_lambda_contraction"), ineq("alpha_module_contraction")}; break;
      case CheckId::cor10: out = {ineq("lambda_q_le_lambda_p")}; break;
      case CheckId::thm11:
        out = {ineq("norm_bound"), ident("pairing_transfer", 1e-10), ident("alpha_module_commute", 1e-10)};
        break;
      case CheckId::riesz:
        out = {CheckPart{"dense_interp", PartKind::inequality, kInterpRelTol},
               CheckPart{"convolution_interp", PartKind::inequality, kInterpRelTol}};
        break;
    }
    if (cfg_.inject_fault && id_ != CheckId::thm8 && id_ != CheckId::riesz) {
      out.push_back(ident("cv_membership", 1e-10));
    }
    return out;
  }

  TrialResult trial(std::size_t index) const {
    Rng rng(mix_seed(cfg_.seed, index));
    TrialResult r;
    const double p = ctx_.p, q = ctx_.q;
    const GroupFunction mu = GroupFunction::random(g_, rng);
    const ApRepresentation rep_u = random_rep(g_, p, cfg_.rep_rank, rng);
    const ApRepresentation rep_v = random_rep(g_, p, cfg_.rep_rank, rng);
    const GroupFunction u = synthesize(rep_u);
    const GroupFunction v = synthesize(rep_v);
    r.inputs["mu"] = mu.values();
    const OperatorMatrix t = lambda(mu, p);

    auto& m = r.margins;
    switch (id_) {
      case CheckId::thm1:
      case CheckId::thm3: {
        r.inputs["u"] = u.values();
        const Eigen::MatrixXcd j = tau_matrix(*g_, p);
        const Eigen::MatrixXcd conj_ut = j * act(rep_u, t).entries() * j;
        const double lhs = opnorm(conj_ut, id_ == CheckId::thm1 ? 2.0 : q, cfg_.opnorm).value;
        const double rhs = rep_u.cost() * opnorm(t, p, cfg_.opnorm).value;
        m.push_back(lhs - rhs);
        break;
      }
      case CheckId::prop5: {
        const Eigen::MatrixXcd j = tau_matrix(*g_, p);
        m.push_back(max_abs_diff(j * t.entries() * j, rho_op(mu).entries()));
        break;
      }
      case CheckId::thm7: {
        r.inputs["u"] = u.values();
        m.push_back(max_abs_diff(alp(t).entries(), lambda_op(mu, q).entries()));
        const OperatorMatrix ut = act(rep_u, t);
        const OperatorMatrix a = alp(ut);
        m.push_back(is_cv(a).residual);
        const double lhs = opnorm(a, q, cfg_.opnorm).value;
        m.push_back(lhs - rep_u.cost() * opnorm(t, p, cfg_.opnorm).value);
        break;
      }
      case CheckId::thm8: {
        const ApRepresentation rep_uq = rep_u.with_exponent(q);
        r.inputs["u"] = u.values();
        r.inputs["v"] = v.values();
        const GroupFunction uv = pointwise_mul(u, v);
        const double lhs = ap_norm_dual(uv, p, cfg_.dual).lower;
        m.push_back(lhs - rep_uq.cost() * rep_v.cost());
        const Complex left = pairing(canonical_rep(uv, p), t);
        const Complex right = pairing(rep_uq, alp(act(rep_v, t)));
        m.push_back(std::abs(left - right));
        m.push_back(is_cv(t).residual);
        break;
      }
      case CheckId::thm9: {
        r.inputs["u"] = u.values();
        m.push_back(opnorm(alp(t), q, cfg_.opnorm).value - opnorm(t, p, cfg_.opnorm).value);
        const OperatorMatrix ut = act(rep_u, t);
        m.push_back(opnorm(alp(ut), q, cfg_.opnorm).value - opnorm(ut, p, cfg_.opnorm).value);
        break;
      }
      case CheckId::cor10: {
        m.push_back(opnorm(lambda(mu, q), q, cfg_.opnorm).value - opnorm(t, p, cfg_.opnorm).value);
        break;
      }
      case CheckId::thm11: {
        const ApRepresentation rep_uq = rep_u.with_exponent(q);
        r.inputs["u"] = u.values();
        m.push_back(ap_norm_dual(u, p, cfg_.dual).lower - rep_uq.cost());
        m.push_back(std::abs(pairing(rep_u, t) - pairing(rep_uq, alp(t))));
        m.push_back(max_abs_diff(alp(act(rep_u, t)).entries(), act(rep_uq, alp(t)).entries()));
        break;
      }
      case CheckId::riesz: {
        const Eigen::MatrixXcd dense = complex_gaussian_matrix(static_cast<Eigen::Index>(g_->order()), rng);
        r.inputs["dense"] = Eigen::Map<const Eigen::VectorXcd>(dense.data(), dense.size());
        m.push_back(interp_bound_check(dense, ctx_, cfg_.opnorm).margin);
        m.push_back(interp_bound_check(t, ctx_, cfg_.opnorm).margin);
        break;
      }
    }
    if (cfg_.inject_fault && id_ != CheckId::thm8 && id_ != CheckId::riesz) m.push_back(is_cv(t).residual);
    return r;
  }

 private:
  OperatorMatrix lambda(const GroupFunction& mu, double p) const {
    OperatorMatrix t = lambda_op(mu, p);
    if (cfg_.inject_fault && t.dim() > 1) {
      t.entries()(0, 1) += kFaultSize;
      t.set_provenance(t.provenance() + "+fault");
    }
    return t;
  }
  // With an injected fault the operator is not CV, so the checked entry
  // points would refuse it; the failure must show up as a margin instead.
  OperatorMatrix act(const ApRepresentation& rep, const OperatorMatrix& t) const {
    return cfg_.inject_fault ? module_action_unchecked(rep, t) : module_action(rep, t);
  }
  OperatorMatrix alp(const OperatorMatrix& t) const {
    return cfg_.inject_fault ? alpha_unchecked(t, ctx_) : alpha(t, ctx_);
  }

  CheckId id_;
  GroupPtr g_;
  ExponentContext ctx_;
  CheckConfig cfg_;
};

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Picks the overall worst part (largest margin - tol) and fills the summary.
inline void summarize(CheckReport& rep) {
  rep.pass = true;
  double worst_excess = -kInf;
  for (const auto& part : rep.parts) {
    rep.pass = rep.pass && part.pass;
    const double excess = part.worst_margin - part.tol;
    if (excess > worst_excess) {
      worst_excess = excess;
      rep.worst_margin = part.worst_margin;
      rep.tol = part.tol;
    }
  }
}

}  // namespace detail

inline CheckReport run_check(CheckId id, const GroupPtr& g, const ExponentContext& ctx, const CheckConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const detail::CheckRunner runner(id, g, ctx, cfg);
  CheckReport rep;
  rep.check_id = to_string(id);
  rep.group = g->spec();
  rep.p = ctx.p;
  rep.q = ctx.q;
  rep.t = ctx.t;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.fault_injected = cfg.inject_fault;
  rep.parts = runner.parts();

  std::vector<detail::TrialResult> results(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t i) { results[i] = runner.trial(i); });

  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t k = 0; k < rep.parts.size(); ++k) {
      CheckPart& part = rep.parts[k];
      const double m = results[i].margins.at(k);
      if (m > part.worst_margin || std::isnan(m)) {
        part.worst_margin = m;
        part.worst_trial = i;
      }
    }
  }
  for (auto& part : rep.parts) part.pass = part.worst_margin <= part.tol;
  detail::summarize(rep);

  if (!rep.parts.empty() && cfg.trials > 0) {
    // witness: the trial behind the most-violating part
    const CheckPart* worst = &rep.parts.front();
    for (const auto& part : rep.parts) {
      if (part.worst_margin - part.tol > worst->worst_margin - worst->tol) worst = &part;
    }
    rep.witness = Witness{worst->name, worst->worst_trial, mix_seed(cfg.seed, worst->worst_trial),
                          results[worst->worst_trial].inputs};
  }
  rep.runtime_ms = detail::elapsed_ms(start);
  return rep;
}

// ---------------------------------------------------------------------------
// Counterexample search

struct SearchConfig {
  /// number of ratio evaluations
  std::size_t budget = 200;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  /// starting input (mu for cor10, u for thm11, u for thm8); random if empty
  std::optional<GroupFunction> initial;
  /// estimators used while climbing
  OpnormConfig search_opnorm{0, 200, 1e-9, 0, {}};
  DualConfig search_dual{1, 15, 0, {0, 100, 1e-8, 0, {}}, {0, 200, 1e-9, 0, {}}};
  /// estimators for the reported supremum
  OpnormConfig final_opnorm{};
  DualConfig final_dual{};
};

inline bool search_supported(CheckId id) {
  return id == CheckId::cor10 || id == CheckId::thm8 || id == CheckId::thm11;
}

/// Hill-climbs the violation ratio of a check (lhs / rhs, so a value above
/// 1 + tol would contradict the statement) with a (1+1) evolution strategy.
inline CheckReport counterexample_search(CheckId id, const GroupPtr& g, const ExponentContext& ctx,
                                         const SearchConfig& cfg) {
  if (!search_supported(id)) {
    throw SpecError("counterexample search supports cor10, thm8 and thm11 (got " + to_string(id) + ")");
  }
  if (!ctx.strict()) throw SpecError("q must lie strictly between 2 and p");
  if (cfg.initial && !same_group(cfg.initial->group(), *g)) {
    throw GroupMismatch("initial input lives on a different group");
  }
  const auto start = std::chrono::steady_clock::now();
  const double p = ctx.p, q = ctx.q;
  const std::size_t n = g->order();

  // Input layout: cor10 -> mu; thm11 -> u; thm8 -> u then v.
  const std::size_t width = id == CheckId::thm8 ? 2 * n : n;
  auto split = [&](const Eigen::VectorXcd& x, std::size_t part) {
    return GroupFunction(g, x.segment(static_cast<Eigen::Index>(part * n), static_cast<Eigen::Index>(n)));
  };
  auto ratio = [&](const Eigen::VectorXcd& x, bool final_pass) -> double {
    const OpnormConfig& oc = final_pass ? cfg.final_opnorm : cfg.search_opnorm;
    const DualConfig& dc = final_pass ? cfg.final_dual : cfg.search_dual;
    PrimalConfig pc;
    pc.restarts = final_pass ? 2 : 0;
    pc.max_iter = final_pass ? 300 : 100;
    switch (id) {
      case CheckId::cor10: {
        const GroupFunction mu = split(x, 0);
        const double den = opnorm(lambda_op(mu, p), p, oc).value;
        return den > 0.0 ? opnorm(lambda_op(mu, q), q, oc).value / den : 0.0;
      }
      case CheckId::thm11: {
        const GroupFunction u = split(x, 0);
        const double den = ap_norm_primal(u, q, pc).upper;
        return den > 0.0 ? ap_norm_dual(u, p, dc).lower / den : 0.0;
      }
      default: {
        const GroupFunction u = split(x, 0), v = split(x, 1);
        const double den = ap_norm_primal(u, q, pc).upper * ap_norm_primal(v, p, pc).upper;
        return den > 0.0 ? ap_norm_dual(pointwise_mul(u, v), p, dc).lower / den : 0.0;
      }
    }
  };

  Rng rng(mix_seed(cfg.seed, 0x5ea7c4ULL));
  Eigen::VectorXcd x = complex_gaussian(static_cast<Eigen::Index>(width), rng);
  if (cfg.initial) x.head(static_cast<Eigen::Index>(n)) = cfg.initial->values();
  double fx = ratio(x, false);
  double sigma = 0.3;
  for (std::size_t it = 1; it < cfg.budget; ++it) {
    const double peak = x.cwiseAbs().maxCoeff();
    const Eigen::VectorXcd y = x + (sigma * std::max(peak, 1e-12)) * complex_gaussian(x.size(), rng);
    const double fy = ratio(y, false);
    if (fy > fx) {
      x = y;
      fx = fy;
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma = std::max(1e-6, sigma * 0.85);
    }
  }
  const double best = ratio(x, true);

  CheckReport rep;
  rep.check_id = to_string(id);
  rep.group = g->spec();
  rep.p = p;
  rep.q = q;
  rep.t = ctx.t;
  rep.trials = cfg.budget;
  rep.seed = cfg.seed;
  rep.parts = {CheckPart{"ratio_minus_one", PartKind::inequality, cfg.tol, best - 1.0, 0, best - 1.0 <= cfg.tol}};
  detail::summarize(rep);
  Witness w{"ratio_minus_one", 0, cfg.seed, {}};
  if (id == CheckId::cor10) {
    w.inputs["mu"] = x;
  } else if (id == CheckId::thm11) {
    w.inputs["u"] = x;
  } else {
    w.inputs["u"] = split(x, 0).values();
    w.inputs["v"] = split(x, 1).values();
  }
  rep.witness = std::move(w);
  rep.runtime_ms = detail::elapsed_ms(start);
  return rep;
}

}  // namespace fthlab
