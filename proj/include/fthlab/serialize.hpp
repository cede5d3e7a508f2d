#pragma once

// JSON / CSV emitters. Output is byte-stable: object keys are sorted
// (nlohmann::json default), every double is rounded to 12 significant
// digits, -0 prints as 0 and non-finite values print as strings.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "verify.hpp"

namespace fthlab {

using Json = nlohmann::json;

inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

inline Json to_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

inline Json to_json(const Eigen::VectorXcd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

inline Json to_json(const GroupFunction& f) { return to_json(f.values()); }

/// Rounds every floating value of an already-built document.
inline Json normalize_numbers(const Json& j) {
  if (j.is_number_float()) return number(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& e : j) out.push_back(normalize_numbers(e));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = normalize_numbers(it.value());
    return out;
  }
  return j;
}

inline std::string dump(const Json& j) { return normalize_numbers(j).dump(2) + "\n"; }

inline Json to_json(const FiniteGroup& g) {
  Json gens = Json::array();
  for (Element a : g.generators()) gens.push_back(g.label(a));
  Json orders = Json::array();
  for (Element a = 0; a < g.order(); ++a) orders.push_back(g.element_order(a));
  return {{"spec", g.spec()},     {"order", g.order()},      {"labels", g.labels()},
          {"abelian", g.is_abelian()}, {"generators", gens}, {"element_orders", orders}};
}

inline Json to_json(const NormEstimate& e) {
  Json j = {{"p", number(e.p)},
            {"value", number(e.value)},
            {"kind", to_string(e.kind)},
            {"method", to_string(e.method)},
            {"restarts", e.restarts},
            {"iterations", e.iterations},
            {"witness", to_json(e.witness)},
            {"seed", e.seed},
            {"tol", number(e.tol)}};
  if (e.method == NormMethod::grid_oracle) j["grid_error"] = number(e.grid_error);
  return j;
}

inline Json to_json(const ApRepresentation& rep) {
  Json a = Json::array();
  for (const auto& pr : rep.pairs()) a.push_back({{"k", to_json(pr.k)}, {"l", to_json(pr.l)}});
  return a;
}

inline Json to_json(const ApNormEstimate& e, std::uint64_t primal_seed, std::uint64_t dual_seed) {
  return {{"p", number(e.p)},
          {"upper", number(e.upper)},
          {"lower", number(e.lower)},
          {"gap", number(e.gap())},
          {"witnesses",
           {{"representation", to_json(e.witness_rep)},
            {"cost", number(e.witness_rep.cost())},
            {"measure", e.witness_measure ? to_json(*e.witness_measure) : Json(nullptr)}}},
          {"seeds", {{"primal", primal_seed}, {"dual", dual_seed}}}};
}

/// runtime_ms is wall-clock and therefore omitted (null) unless asked for.
inline Json to_json(const CheckReport& r, bool with_timing) {
  Json parts = Json::array();
  for (const auto& p : r.parts) {
    parts.push_back({{"name", p.name},
                     {"kind", to_string(p.kind)},
                     {"tol", number(p.tol)},
                     {"worst_margin", number(p.worst_margin)},
                     {"worst_trial", p.worst_trial},
                     {"pass", p.pass}});
  }
  Json witness = nullptr;
  if (r.witness) {
    Json inputs = Json::object();
    for (const auto& [k, v] : r.witness->inputs) inputs[k] = to_json(v);
    witness = {{"part", r.witness->part}, {"trial", r.witness->trial}, {"seed", r.witness->seed}, {"inputs", inputs}};
  }
  return {{"check_id", r.check_id},
          {"group", r.group},
          {"p", number(r.p)},
          {"q", number(r.q)},
          {"t", number(r.t)},
          {"trials", r.trials},
          {"pass", r.pass},
          {"worst_margin", number(r.worst_margin)},
          {"tol", number(r.tol)},
          {"parts", parts},
          {"witness", witness},
          {"seed", r.seed},
          {"fault_injected", r.fault_injected},
          {"runtime_ms", with_timing ? number(r.runtime_ms) : Json(nullptr)}};
}

/// Fixed float formatting for CSV cells.
inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

/// Writes text to a file, throwing on I/O failure.
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace fthlab
