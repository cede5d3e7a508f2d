#pragma once

// Command-line front end. execute() never throws: exit 0 on success or a
// passing check, 1 when a check finds a violation, 2 on usage/config/I-O
// errors (one "error: ..." line on the error stream).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "serialize.hpp"

namespace fthlab {

/// Everything needed to reproduce a run; embedded in every report.
struct RunConfig {
  std::string command;  // group_info | opnorm | apnorm | verify | search | sweep
  std::string group;
  std::optional<double> p;
  std::optional<double> q;
  std::string fn;
  std::string measure;
  std::string check;
  std::string p_grid;
  std::string init;
  std::size_t trials = 25;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  std::optional<double> identity_tol;
  int restarts = 64;
  std::size_t budget = 200;
  std::size_t max_order = kDefaultMaxOrder;
  std::string inject_fault;
  std::string out;
  std::string format = "json";
  bool timing = false;
};

inline Json to_json(const RunConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); };
  return {{"command", c.command},   {"group", c.group},         {"p", opt(c.p)},
          {"q", opt(c.q)},          {"fn", c.fn},               {"measure", c.measure},
          {"check", c.check},       {"p_grid", c.p_grid},       {"init", c.init},
          {"trials", c.trials},     {"seed", c.seed},           {"tol", number(c.tol)},
          {"identity_tol", opt(c.identity_tol)}, {"restarts", c.restarts}, {"budget", c.budget},
          {"max_order", c.max_order}, {"inject_fault", c.inject_fault}, {"out", c.out},
          {"format", c.format},     {"timing", c.timing}};
}

inline RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw SpecError("run config must be a JSON object");
  static const std::vector<std::string> known = {
      "command", "group", "p", "q", "fn", "measure", "check", "p_grid", "init", "trials", "seed", "tol",
      "identity_tol", "restarts", "budget", "max_order", "inject_fault", "out", "format", "timing"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw SpecError("unknown run config key '" + it.key() + "'");
    }
  }
  RunConfig c;
  auto str = [&](const char* k, std::string& dst) {
    if (j.contains(k) && !j[k].is_null()) dst = j[k].get<std::string>();
  };
  auto opt = [&](const char* k, std::optional<double>& dst) {
    if (j.contains(k) && !j[k].is_null()) dst = j[k].get<double>();
  };
  auto val = [&](const char* k, auto& dst) {
    if (j.contains(k) && !j[k].is_null()) dst = j[k].get<std::decay_t<decltype(dst)>>();
  };
  str("command", c.command);
  str("group", c.group);
  opt("p", c.p);
  opt("q", c.q);
  str("fn", c.fn);
  str("measure", c.measure);
  str("check", c.check);
  str("p_grid", c.p_grid);
  str("init", c.init);
  val("trials", c.trials);
  val("seed", c.seed);
  val("tol", c.tol);
  opt("identity_tol", c.identity_tol);
  val("restarts", c.restarts);
  val("budget", c.budget);
  val("max_order", c.max_order);
  str("inject_fault", c.inject_fault);
  str("out", c.out);
  str("format", c.format);
  val("timing", c.timing);
  return c;
}

// ---------------------------------------------------------------------------
// Literals

/// delta:<label|index>, const:<c>, char:<j> (cyclic groups), random:<seed>,
/// vec:<v0>,<v1>,... (real values).
inline GroupFunction parse_function(const GroupPtr& g, const std::string& literal) {
  const auto colon = literal.find(':');
  if (colon == std::string::npos) throw SpecError("malformed function literal '" + literal + "'");
  const std::string kind = literal.substr(0, colon), arg = literal.substr(colon + 1);
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw SpecError("bad number '" + s + "' in literal '" + literal + "'");
    }
    return v;
  };
  auto to_index = [&](const std::string& s) -> std::size_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        s.size() > 18) {
      throw SpecError("bad integer '" + s + "' in literal '" + literal + "'");
    }
    return std::stoull(s);
  };
  if (kind == "delta") {
    if (auto a = g->find_label(arg)) return GroupFunction::delta(g, *a);
    const std::size_t a = to_index(arg);
    if (!g->contains(a)) throw SpecError("element '" + arg + "' not in " + g->spec());
    return GroupFunction::delta(g, a);
  }
  if (kind == "const") return GroupFunction::constant(g, to_double(arg));
  if (kind == "char") {
    if (g->spec().empty() || g->spec().front() != 'C' || g->spec().find('x') != std::string::npos) {
      throw SpecError("char: literals need a cyclic group C<n>");
    }
    const std::size_t j = to_index(arg);
    const std::size_t n = g->order();
    GroupFunction f(g);
    for (Element x = 0; x < n; ++x) {
      f[x] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((j * x) % n) / static_cast<double>(n));
    }
    return f;
  }
  if (kind == "random") {
    Rng rng(to_index(arg));
    return GroupFunction::random(g, rng);
  }
  if (kind == "vec") {
    std::vector<double> vals;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(to_double(item));
    if (vals.size() != g->order()) {
      throw SpecError("vec: literal has " + std::to_string(vals.size()) + " entries, group order is " +
                      std::to_string(g->order()));
    }
    GroupFunction f(g);
    for (Element x = 0; x < g->order(); ++x) f[x] = vals[x];
    return f;
  }
  throw SpecError("unknown function literal kind '" + kind + "'");
}

/// a:b:step -> a, a+step, ... <= b (each value rounded to 12 digits).
inline std::vector<double> parse_p_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw SpecError("");
    } catch (const std::exception&) {
      throw SpecError("malformed p-grid '" + s + "' (expected a:b:step)");
    }
  }
  if (parts.size() != 3) throw SpecError("malformed p-grid '" + s + "' (expected a:b:step)");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || !(b >= a) || !std::isfinite(b)) throw SpecError("p-grid needs step > 0 and a <= b");
  if (!(a >= 1.0)) throw SpecError("p-grid values must be >= 1");
  if ((b - a) / step > 10000.0) throw SpecError("p-grid has too many points");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double p = round12(a + static_cast<double>(k) * step);
    if (p > b + 1e-9 * step) break;
    grid.push_back(p);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

struct Emit {
  std::string text;
  int code = 0;
};

inline double require_p(const RunConfig& c) {
  if (!c.p) throw SpecError(c.command + " needs --p");
  return *c.p;
}

inline Emit cmd_group_info(const RunConfig& c) {
  const GroupPtr g = make_group(c.group, c.max_order);
  Json j = to_json(*g);
  j["config"] = to_json(c);
  return {dump(j), 0};
}

inline Emit cmd_opnorm(const RunConfig& c) {
  const GroupPtr g = make_group(c.group, c.max_order);
  const double p = require_p(c);
  require_exponent(p);
  const GroupFunction mu = parse_function(g, c.measure);
  OpnormConfig oc;
  oc.restarts = c.restarts;
  oc.seed = c.seed;
  const NormEstimate e = opnorm(lambda_op(mu, p), p, oc);
  if (c.format == "text") return {csv_number(e.value) + "\n", 0};
  Json j = to_json(e);
  j["config"] = to_json(c);
  return {dump(j), 0};
}

inline Emit cmd_apnorm(const RunConfig& c) {
  const GroupPtr g = make_group(c.group, c.max_order);
  const double p = require_p(c);
  if (!(p > 1.0) || std::isinf(p)) throw SpecError("apnorm needs 1 < p < inf");
  const GroupFunction u = parse_function(g, c.fn);
  ApNormConfig ac;
  ac.primal.seed = c.seed;
  ac.dual.seed = c.seed;
  ac.dual.final_eval.restarts = c.restarts;
  ac.dual.final_eval.seed = c.seed;
  const ApNormEstimate e = ap_norm(u, p, ac);
  if (c.format == "text") return {csv_number(e.lower) + " " + csv_number(e.upper) + "\n", 0};
  Json j = to_json(e, ac.primal.seed, ac.dual.seed);
  j["config"] = to_json(c);
  return {dump(j), 0};
}

inline CheckConfig check_config(const RunConfig& c) {
  CheckConfig cc;
  cc.trials = c.trials;
  cc.seed = c.seed;
  cc.tol = c.tol;
  cc.identity_tol = c.identity_tol;
  cc.opnorm.restarts = c.restarts;
  cc.opnorm.seed = c.seed;
  if (!c.inject_fault.empty()) {
    if (c.inject_fault != "lambda") throw SpecError("unknown fault '" + c.inject_fault + "' (supported: lambda)");
    cc.inject_fault = true;
  }
  return cc;
}

inline Emit cmd_verify(const RunConfig& c) {
  const CheckId id = parse_check_id(c.check);
  const GroupPtr g = make_group(c.group, c.max_order);
  const double p = require_p(c);
  const ExponentContext ctx = check_context(id, p, c.q.value_or(default_q(id, p)));
  const CheckReport r = run_check(id, g, ctx, check_config(c));
  Json j = to_json(r, c.timing);
  j["config"] = to_json(c);
  return {dump(j), r.pass ? 0 : 1};
}

inline Emit cmd_search(const RunConfig& c) {
  const CheckId id = parse_check_id(c.check);
  if (!search_supported(id)) throw SpecError("search supports cor10, thm8 and thm11 (got " + c.check + ")");
  const GroupPtr g = make_group(c.group, c.max_order);
  const double p = require_p(c);
  const ExponentContext ctx = strict_exponent(p, c.q.value_or(default_q(id, p)));
  SearchConfig sc;
  sc.budget = c.budget;
  sc.seed = c.seed;
  sc.tol = c.tol;
  sc.final_opnorm.restarts = c.restarts;
  sc.final_opnorm.seed = c.seed;
  if (!c.init.empty()) sc.initial = parse_function(g, c.init);
  const CheckReport r = counterexample_search(id, g, ctx, sc);
  Json j = to_json(r, c.timing);
  j["config"] = to_json(c);
  return {dump(j), r.pass ? 0 : 1};
}

// |||lambda_p(mu)|||_p along a p-grid. For every p != 2 the value is compared
// with each grid point q strictly between 2 and p; p = 2 is the pivot.
inline Emit cmd_sweep(const RunConfig& c) {
  const GroupPtr g = make_group(c.group, c.max_order);
  const GroupFunction mu = parse_function(g, c.measure);
  const std::vector<double> grid = parse_p_grid(c.p_grid);
  OpnormConfig oc;
  oc.restarts = c.restarts;
  oc.seed = c.seed;
  std::vector<NormEstimate> est;
  for (double p : grid) est.push_back(opnorm(lambda_op(mu, p), p, oc));
  std::vector<std::string> verdict(grid.size());
  bool violation = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid[i];
    if (p == 2.0) {
      verdict[i] = "pivot";
      continue;
    }
    bool compared = false, ok = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double q = grid[k];
      const bool between = p < 2.0 ? (q > p && q < 2.0) : (q < p && q > 2.0);
      if (!between) continue;
      compared = true;
      if (est[k].value > est[i].value + c.tol) ok = false;
    }
    verdict[i] = !compared ? "none" : (ok ? "ok" : "violation");
    violation = violation || !ok;
  }
  const int code = violation ? 1 : 0;
  if (c.format == "json") {
    Json rows = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows.push_back({{"p", number(grid[i])},
                      {"norm", number(est[i].value)},
                      {"kind", to_string(est[i].kind)},
                      {"cor10_check", verdict[i]}});
    }
    Json j = {{"rows", rows}, {"pass", !violation}, {"config", to_json(c)}};
    return {dump(j), code};
  }
  std::string text = "p,norm,kind,cor10_check\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    text += csv_number(grid[i]) + "," + csv_number(est[i].value) + "," + to_string(est[i].kind) + "," +
            verdict[i] + "\n";
  }
  return {text, code};
}

}  // namespace detail

/// Runs one configured command and writes its report to `out` or to c.out.
inline int run(const RunConfig& c, std::ostream& out) {
  if (c.format != "json" && c.format != "csv" && c.format != "text") {
    throw SpecError("unknown format '" + c.format + "' (json|csv|text)");
  }
  if (c.format == "csv" && c.command != "sweep") throw SpecError("csv output is only available for sweep");
  detail::Emit e;
  if (c.command == "group_info") {
    e = detail::cmd_group_info(c);
  } else if (c.command == "opnorm") {
    e = detail::cmd_opnorm(c);
  } else if (c.command == "apnorm") {
    e = detail::cmd_apnorm(c);
  } else if (c.command == "verify") {
    e = detail::cmd_verify(c);
  } else if (c.command == "search") {
    e = detail::cmd_search(c);
  } else if (c.command == "sweep") {
    e = detail::cmd_sweep(c);
  } else {
    throw SpecError("unknown command '" + c.command + "'");
  }
  if (c.out.empty()) {
    out << e.text;
  } else {
    write_file(c.out, e.text);
  }
  return e.code;
}

inline std::uint64_t env_seed() {
  const char* s = std::getenv("FTHLAB_SEED");
  if (!s || !*s) return 1;
  const std::string v(s);
  if (!std::all_of(v.begin(), v.end(), [](unsigned char ch) { return std::isdigit(ch); }) || v.size() > 19) {
    throw SpecError("FTHLAB_SEED must be a non-negative integer (got '" + v + "')");
  }
  return std::stoull(v);
}

/// Entry point; args excludes the program name.
inline int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string config_path;
  CLI::App app{"Convolution operators, A_p norms and their inequalities on finite groups", "fthlab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  try {
    c.seed = env_seed();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Seed (default: FTHLAB_SEED or 1)");
    sub->add_option("--out", c.out, "Write the report to a file instead of stdout");
    sub->add_option("--max-order", c.max_order, "Group size cap")->check(CLI::PositiveNumber);
  };
  auto add_p = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option_function<double>("--p", [&](double v) { c.p = v; }, "Exponent p");
    if (required) o->required();
  };

  CLI::App* group = app.add_subcommand("group", "Group utilities");
  group->require_subcommand(1);
  CLI::App* info = group->add_subcommand("info", "Print a group's labels, generators and element orders");
  info->add_option("spec", c.group, "Group spec (e.g. C6, D4, S3, Q8, C2xS3)")->required();
  add_common(info);
  info->callback([&] { c.command = "group_info"; });

  CLI::App* opn = app.add_subcommand("opnorm", "p-operator norm of lambda_p(mu)");
  opn->add_option("--group", c.group)->required();
  add_p(opn, true);
  opn->add_option("--measure", c.measure, "Function literal")->required();
  opn->add_option("--restarts", c.restarts)->check(CLI::NonNegativeNumber);
  opn->add_option("--format", c.format, "json|text");
  add_common(opn);
  opn->callback([&] { c.command = "opnorm"; });

  CLI::App* apn = app.add_subcommand("apnorm", "Primal/dual bounds for the A_p norm");
  apn->add_option("--group", c.group)->required();
  add_p(apn, true);
  apn->add_option("--fn", c.fn, "Function literal")->required();
  apn->add_option("--restarts", c.restarts)->check(CLI::NonNegativeNumber);
  apn->add_option("--format", c.format, "json|text");
  add_common(apn);
  apn->callback([&] { c.command = "apnorm"; });

  auto add_check_options = [&](CLI::App* sub) {
    sub->add_option("check", c.check, "Check id")->required();
    sub->add_option("--group", c.group)->required();
    add_p(sub, true);
    sub->add_option_function<double>("--q", [&](double v) { c.q = v; }, "Second exponent");
    sub->add_option("--tol", c.tol, "Inequality tolerance");
    sub->add_option("--restarts", c.restarts)->check(CLI::NonNegativeNumber);
    sub->add_flag("--timing", c.timing, "Record runtime_ms (makes output non-deterministic)");
    add_common(sub);
  };

  CLI::App* ver = app.add_subcommand("verify", "Run a randomized check");
  add_check_options(ver);
  ver->add_option("--trials", c.trials)->check(CLI::NonNegativeNumber);
  ver->add_option_function<double>("--identity-tol", [&](double v) { c.identity_tol = v; });
  ver->add_option("--inject-fault", c.inject_fault, "Negative control: 'lambda' corrupts one entry");
  ver->callback([&] { c.command = "verify"; });

  CLI::App* sea = app.add_subcommand("search", "Hill-climb the violation ratio of cor10, thm8 or thm11");
  add_check_options(sea);
  sea->add_option("--budget", c.budget)->check(CLI::PositiveNumber);
  sea->add_option("--init", c.init, "Starting input literal");
  sea->callback([&] { c.command = "search"; });

  CLI::App* swp = app.add_subcommand("sweep", "|||lambda_p(mu)|||_p over a p-grid");
  swp->add_option("--group", c.group)->required();
  swp->add_option("--measure", c.measure)->required();
  swp->add_option("--p-grid", c.p_grid, "a:b:step")->required();
  swp->add_option("--restarts", c.restarts)->check(CLI::NonNegativeNumber);
  swp->add_option("--tol", c.tol, "Tolerance of the grid comparison");
  swp->add_option("--format", c.format, "csv|json");
  add_common(swp);
  swp->callback([&] {
    c.command = "sweep";
    if (!swp->count("--format")) c.format = "csv";
  });

  CLI::App* runc = app.add_subcommand("run", "Execute a saved run config (JSON)");
  runc->add_option("config", config_path)->required();
  runc->callback([&] { c.command = "run"; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 2;
  }

  try {
    if (c.command == "run") {
      std::ifstream f(config_path);
      if (!f) throw Error("cannot read run config '" + config_path + "'");
      Json j;
      try {
        j = Json::parse(f);
      } catch (const Json::exception& e) {
        throw SpecError("run config is not valid JSON: " + std::string(e.what()));
      }
      // a full report carries its config under "config"
      if (j.is_object() && j.contains("config") && j["config"].is_object()) j = Json(j["config"]);
      RunConfig saved = run_config_from_json(j);
      return run(saved, out);
    }
    return run(c, out);
  } catch (const Json::exception& e) {
    err << "error: bad run config value: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 2;
  }
}

}  // namespace fthlab
