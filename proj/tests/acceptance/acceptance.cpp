// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fthlab/fthlab.hpp"
#include "oracles.hpp"

using namespace fthlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

GroupFunction character(const GroupPtr& g, std::size_t j) {
  const std::size_t n = g->order();
  GroupFunction f(g);
  for (Element x = 0; x < n; ++x) f[x] = std::polar(1.0, 2.0 * std::numbers::pi * double((j * x) % n) / double(n));
  return f;
}

std::vector<oracle::C> as_vec(const GroupFunction& f) {
  return std::vector<oracle::C>(f.values().data(), f.values().data() + f.size());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const std::vector<std::string> kCor10Groups = {"C5", "C6", "S3", "D4", "Q8"};
const std::vector<std::pair<double, double>> kCor10Exponents = {{4, 3}, {4, 2.5}, {3, 2.5}, {1.5, 1.8}, {1.2, 1.5}};

// 1
Outcome group_axioms() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t bad = 0, triples = 0;
  std::vector<std::string> specs;
  for (int n = 1; n <= 12; ++n) specs.push_back("C" + std::to_string(n));
  for (const char* s : {"D3", "D4", "D6", "S3", "S4", "Q8", "C2xC4", "C2xS3"}) specs.push_back(s);
  for (const auto& s : specs) {
    const ValidationReport r = validate_group(*make_group(s));
    bad += r.violations.size();
    triples += r.triples_checked;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {bad == 0 && secs < 1.0,
          std::to_string(specs.size()) + " groups, " + std::to_string(triples) + " triples, " +
              std::to_string(bad) + " violations, " + fmt(secs) + " s"};
}

// 2
Outcome opnorm_oracles() {
  double worst_a = 0, worst_b = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    auto g = make_group("C" + std::to_string(n));
    Rng rng(mix_seed(200, n));
    for (int i = 0; i < 100; ++i) {
      auto mu = GroupFunction::random(g, rng);
      worst_a = std::max(worst_a, std::abs(opnorm(lambda_op(mu, 2.0), 2.0).value - oracle::circulant_l2_norm(as_vec(mu))));
    }
  }
  for (const auto& spec : kCor10Groups) {
    auto g = make_group(spec);
    Rng rng(mix_seed(201, g->order()));
    for (int i = 0; i < 10; ++i) {
      GroupFunction mu(g);
      for (Element x = 0; x < g->order(); ++x) mu[x] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double mass = mu.values().real().sum();
      for (double p : {1.3, 1.7, 2.5, 4.0}) {
        worst_b = std::max(worst_b, std::abs(opnorm(lambda_op(mu, p), p).value - mass));
      }
    }
  }
  std::size_t grid_bad = 0, grid_cases = 0;
  double worst_c = 0;
  Rng rng(202);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index d = i < 25 ? 2 : 3;
    const Eigen::MatrixXcd m = complex_gaussian_matrix(d, rng);
    for (double p : {1.3, 1.7, 2.5, 4.0}) {
      const NormEstimate grid = opnorm_grid_oracle(m, p, d == 2 ? 32 : 16);
      const double dev = std::abs(opnorm(m, p).value - grid.value);
      ++grid_cases;
      if (dev > std::max(1e-3, grid.grid_error)) ++grid_bad;
      worst_c = std::max(worst_c, dev);
    }
  }
  const bool pass = worst_a <= 1e-8 && worst_b <= 1e-6 && grid_bad == 0;
  return {pass, "(a) max dev " + fmt(worst_a) + " (b) max dev " + fmt(worst_b) + " (c) " + std::to_string(grid_bad) +
                    "/" + std::to_string(grid_cases) + " outside tolerance, max dev " + fmt(worst_c)};
}

// 3
Outcome cor10() {
  std::size_t violations = 0, total = 0;
  double worst = -kInf;
  for (const auto& spec : kCor10Groups) {
    for (const auto& [p, q] : kCor10Exponents) {
      CheckConfig cfg;
      cfg.trials = 200;
      cfg.seed = 3;
      const CheckReport r = run_check(CheckId::cor10, make_group(spec), check_context(CheckId::cor10, p, q), cfg);
      total += r.trials;
      if (!r.pass) ++violations;
      worst = std::max(worst, r.worst_margin);
    }
  }
  return {violations == 0, std::to_string(total) + " measures, " + std::to_string(violations) +
                               " failing configurations, max (est_q - est_p) " + fmt(worst)};
}

// 4
Outcome riesz() {
  std::size_t fails = 0;
  double worst = -kInf;
  for (const auto& [p, q] : std::vector<std::pair<double, double>>{{4.0, 3.0}, {4.0 / 3.0, 1.5}}) {
    const ExponentContext ctx = interp_exponent(p, q);
    CheckConfig cfg;
    cfg.trials = 100;
    cfg.seed = 4;
    const CheckReport r = run_check(CheckId::riesz, make_group("S3"), ctx, cfg);
    if (!r.pass) ++fails;
    worst = std::max(worst, r.worst_margin);
  }
  double ident = 0;
  for (double p : {1.1, 4.0 / 3.0, 1.5, 1.9, 2.1, 3.0, 4.0, 8.0}) {
    for (int k = 1; k < 20; ++k) {
      const double q = p + (2.0 - p) * k / 20.0;
      const ExponentContext c = interp_exponent(p, q);
      const double rhs = p < 2 ? (1 - c.t) / p + c.t / 2 : (1 - c.t) / 2 + c.t / p;
      ident = std::max(ident, std::abs(1.0 / q - rhs));
    }
  }
  return {fails == 0 && ident <= 1e-12,
          "400 interpolation checks, max relative margin " + fmt(worst) + ", exponent identity residual " + fmt(ident)};
}

// 5
Outcome ap_norms() {
  double worst_up = 0, worst_lo = 0, worst_fourier = 0, worst_sandwich = -kInf;
  std::size_t instances = 0;
  auto record = [&](const ApNormEstimate& e) {
    worst_sandwich = std::max(worst_sandwich, e.lower - e.upper);
    ++instances;
  };
  for (const char* spec : {"C6", "S3", "Q8"}) {
    auto g = make_group(spec);
    for (double p : {1.5, 3.0, 4.0}) {
      for (Element a = 0; a < g->order(); a += 3) {
        const ApNormEstimate e = ap_norm(GroupFunction::delta(g, a), p);
        worst_up = std::max(worst_up, std::abs(e.upper - 1.0));
        worst_lo = std::max(worst_lo, std::abs(e.lower - 1.0));
        record(e);
      }
      const ApNormEstimate e = ap_norm(GroupFunction::constant(g, 1.0), p);
      worst_up = std::max(worst_up, std::abs(e.upper - 1.0));
      worst_lo = std::max(worst_lo, std::abs(e.lower - 1.0));
      record(e);
    }
  }
  for (std::size_t n = 2; n <= 8; ++n) {
    auto g = make_group("C" + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      const ApNormEstimate e = ap_norm(character(g, j), 2.0);
      worst_up = std::max(worst_up, std::abs(e.upper - 1.0));
      worst_lo = std::max(worst_lo, std::abs(e.lower - 1.0));
      record(e);
    }
    Rng rng(mix_seed(5, n));
    for (int i = 0; i < 20; ++i) {
      auto u = GroupFunction::random(g, rng);
      const double ref = oracle::fourier_a2_norm(as_vec(u));
      const ApNormEstimate e = ap_norm(u, 2.0);
      worst_fourier = std::max(worst_fourier, std::abs(e.lower - ref) / ref);
      record(e);
    }
  }
  const bool pass = worst_up <= 1e-6 && worst_lo <= 2e-2 && worst_fourier <= 0.02 && worst_sandwich <= 1e-9;
  return {pass, std::to_string(instances) + " instances; |upper-1| " + fmt(worst_up) + ", |lower-1| " + fmt(worst_lo) +
                    ", Fourier rel dev " + fmt(worst_fourier) + ", max (lower-upper) " + fmt(worst_sandwich)};
}

// 6 and 7
Outcome check_suite(CheckId id, std::size_t trials, const std::vector<std::string>& identity_parts) {
  std::size_t failing = 0, configs = 0;
  double worst_ineq = -kInf, worst_ident = 0;
  for (const auto& spec : kCor10Groups) {
    for (const auto& [p, q] : kCor10Exponents) {
      CheckConfig cfg;
      cfg.trials = trials;
      cfg.seed = id == CheckId::thm8 ? 6 : 7;
      const CheckReport r = run_check(id, make_group(spec), check_context(id, p, q), cfg);
      ++configs;
      if (!r.pass) ++failing;
      for (const auto& part : r.parts) {
        const bool ident = std::find(identity_parts.begin(), identity_parts.end(), part.name) != identity_parts.end();
        if (ident) {
          worst_ident = std::max(worst_ident, part.worst_margin);
        } else if (part.kind == PartKind::inequality) {
          worst_ineq = std::max(worst_ineq, part.worst_margin);
        }
      }
    }
  }
  return {failing == 0, std::to_string(configs) + " configurations x " + std::to_string(trials) + " trials, " +
                            std::to_string(failing) + " failing; max inequality margin " + fmt(worst_ineq) +
                            ", max identity residual " + fmt(worst_ident)};
}

// 8
Outcome module_structure() {
  double unit = 0, delta = 0, lam = 0, assoc = 0, cv = 0;
  for (const char* spec : {"S3", "C6"}) {
    auto g = make_group(spec);
    const double n = double(g->order());
    ApRepresentation one(g, 3.0);
    one.add(GroupFunction::constant(g, 1.0 / n), GroupFunction::constant(g, 1.0));
    const ApRepresentation de = canonical_rep(GroupFunction::delta(g, 0), 3.0);
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng rng(mix_seed(8, i));
      const GroupFunction mu = GroupFunction::random(g, rng);
      const OperatorMatrix t = lambda_op(mu, 3.0);
      const ApRepresentation ru = random_rep(g, 3.0, 2, rng), rv = random_rep(g, 3.0, 2, rng);
      const GroupFunction u = synthesize(ru), v = synthesize(rv);
      unit = std::max(unit, max_abs_diff(module_action(one, t).entries(), t.entries()) / t.entries().cwiseAbs().maxCoeff());
      const Eigen::MatrixXcd diag = t.entries().diagonal().asDiagonal();
      delta = std::max(delta, max_abs_diff(module_action(de, t).entries(), diag));
      const OperatorMatrix ut = module_action(ru, t);
      lam = std::max(lam, max_abs_diff(ut.entries(), lambda_op(pointwise_mul(tilde(u), mu), 3.0).entries()));
      const OperatorMatrix uv_t = module_action(canonical_rep(pointwise_mul(u, v), 3.0), t);
      assoc = std::max(assoc, max_abs_diff(uv_t.entries(), module_action(ru, module_action(rv, t)).entries()));
      cv = std::max(cv, is_cv(ut).residual);
    }
  }
  // "exact" for 1.T = T: equal up to the rounding of the weights 1/|G|
  const bool pass = unit <= 1e-14 && delta <= 1e-12 && lam <= 1e-10 && assoc <= 1e-10 && cv <= 1e-10;
  return {pass, "100 instances; 1.T " + fmt(unit) + " (relative), delta_e.T " + fmt(delta) + ", u.lambda " + fmt(lam) +
                    ", (uv)T " + fmt(assoc) + ", CV residual " + fmt(cv)};
}

// 9
Outcome pairing_independence() {
  double worst = 0;
  std::size_t count = 0;
  for (const char* spec : {"S3", "C6"}) {
    auto g = make_group(spec);
    for (double p : {1.5, 3.0}) {
      for (std::uint64_t i = 0; i < 13 && count < 50; ++i, ++count) {
        Rng rng(mix_seed(9, count));
        const GroupFunction u = GroupFunction::random(g, rng);
        const OperatorMatrix t = lambda_op(GroupFunction::random(g, rng), p);
        PrimalConfig pc;
        pc.seed = count;
        const PrimalResult opt = ap_norm_primal(u, p, pc);
        worst = std::max(worst, std::abs(pairing(canonical_rep(u, p), t) - pairing(opt.rep, t)));
      }
    }
  }
  return {worst <= 1e-10 && count == 50, std::to_string(count) + " instances, max difference " + fmt(worst)};
}

int cli_code(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = execute(args, o, e);
  if (out) *out = o.str();
  return code;
}

// 10
Outcome negative_controls() {
  auto g = make_group("S3");
  Eigen::MatrixXcd m = lambda_op(GroupFunction::delta(g, 1), 4.0).entries();
  m(0, 1) += 0.1;
  const bool cv_fails = !is_cv(OperatorMatrix(g, m)).ok;
  const int prop5 = cli_code({"verify", "prop5", "--group", "S3", "--p", "4", "--q", "3", "--trials", "5",
                              "--inject-fault", "lambda"});
  std::string out;
  const int thm8 = cli_code({"verify", "thm8", "--group", "S3", "--p", "4", "--q", "3", "--trials", "5",
                             "--inject-fault", "lambda"},
                            &out);
  bool pairing_failed = false;
  const Json report = Json::parse(out);
  for (const auto& part : report["parts"]) {
    if (part["name"] == "pairing_identity" || part["name"] == "cv_membership") {
      pairing_failed = pairing_failed || !part["pass"].get<bool>();
    }
  }
  const int clean = cli_code({"verify", "prop5", "--group", "S3", "--p", "4", "--q", "3", "--trials", "5"});
  const bool pass = cv_fails && prop5 == 1 && thm8 == 1 && pairing_failed && clean == 0;
  return {pass, std::string("non-CV rejected: ") + (cv_fails ? "yes" : "no") + ", prop5 exit " + std::to_string(prop5) +
                    ", thm8 exit " + std::to_string(thm8) + ", unperturbed prop5 exit " + std::to_string(clean)};
}

// 11
Outcome determinism() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cmds = {
      {"group_info_D4.json", {"group", "info", "D4"}},
      {"opnorm_S3_p3.json", {"opnorm", "--group", "S3", "--p", "3", "--measure", "random:7", "--seed", "1"}},
      {"verify_cor10_C6.json",
       {"verify", "cor10", "--group", "C6", "--p", "3", "--q", "2.5", "--trials", "20", "--seed", "1"}}};
  std::size_t ok = 0;
  for (const auto& [file, args] : cmds) {
    std::string a, b;
    cli_code(args, &a);
    cli_code(args, &b);
    std::ifstream f(std::filesystem::path(FTHLAB_GOLDEN_DIR) / file, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    if (a == b && a == ss.str() && !a.empty()) ++ok;
  }
  return {ok == cmds.size(), std::to_string(ok) + "/" + std::to_string(cmds.size()) + " commands byte-identical to golden"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 group axioms", group_axioms},
      {"2 operator-norm oracles", opnorm_oracles},
      {"3 lambda_q <= lambda_p", cor10},
      {"4 Riesz-Thorin interpolation", riesz},
      {"5 A_p norm values and sandwich", ap_norms},
      {"6 product bound and pairing transfer (thm8)",
       [] { return check_suite(CheckId::thm8, 50, {"pairing_identity", "cv_membership"}); }},
      {"7 A_p contraction and alpha transfer (thm11)",
       [] { return check_suite(CheckId::thm11, 25, {"pairing_transfer", "alpha_module_commute"}); }},
      {"8 module structure", module_structure},
      {"9 pairing representation independence", pairing_independence},
      {"10 negative controls", negative_controls},
      {"11 determinism", determinism},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(secs) << " s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
