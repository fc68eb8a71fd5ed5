#pragma once

// JSON and CSV forms of the result types. Non-finite numbers are written as
// the strings "inf", "-inf" and "nan".

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "qfdiv/divergence.hpp"
#include "qfdiv/extremal.hpp"
#include "qfdiv/matrix_io.hpp"
#include "qfdiv/optimizer.hpp"

namespace qfdiv {

inline json number_or_inf(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const json& j, std::string_view field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::ParseError, "field '" + std::string(field) + "' is not a number");
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return number_or_inf(v).get<std::string>();
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline json vector_to_json(const RealVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline RealVector vector_from_json(const json& j, std::string_view field) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "field '" + std::string(field) + "' must be an array");
  RealVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number_from_json(j[i], field);
  return v;
}

// ---------------------------------------------------------------------------

inline json breakdown_to_json(const TermBreakdown& b) {
  json nodes = json::array();
  for (const auto& t : b.nodes) {
    nodes.push_back({{"s", t.s},
                     {"weight", t.weight},
                     {"quotient", t.quotient},
                     {"rho", t.rho},
                     {"sigma", t.sigma},
                     {"integrand", t.integrand}});
  }
  return {{"constant", b.constant},
          {"linear", b.linear},
          {"quadratic", b.quadratic},
          {"integral", b.integral},
          {"nodes", std::move(nodes)}};
}

inline json divergence_to_json(const DivergenceResult& r) {
  json j{{"value", number_or_inf(r.value)},
         {"method", std::string(to_string(r.method))},
         {"converged", r.converged},
         {"imaginary_residual", r.imaginary_residual}};
  json eps = json::array();
  for (const auto& [e, v] : r.epsilon_trace) eps.push_back({{"epsilon", e}, {"value", number_or_inf(v)}});
  j["epsilon_trace"] = std::move(eps);
  if (r.breakdown) {
    j["breakdown"] = breakdown_to_json(*r.breakdown);
    j["tail_bound"] = r.tail_bound;
  }
  return j;
}

inline json hockey_to_json(const HockeyResult& h) {
  return {{"value", h.value},
          {"tail_bound", number_or_inf(h.tail_bound)},
          {"error_estimate", h.error_estimate},
          {"s_max", h.s_max}};
}

// ---------------------------------------------------------------------------

inline json pairing_to_json(const Pairing& p) {
  return {{"permutation", p.permutation},
          {"rho_spectrum", vector_to_json(p.rho_spectrum)},
          {"sigma_spectrum", vector_to_json(p.sigma_spectrum)}};
}

inline Pairing pairing_from_json(const json& j, std::string_view context) {
  const std::string ctx(context);
  if (!j.is_object() || !j.contains("permutation")) fail(ErrorCode::ParseError, "field '" + ctx + "' malformed");
  return make_pairing(vector_from_json(j.at("rho_spectrum"), ctx + ".rho_spectrum"),
                      vector_from_json(j.at("sigma_spectrum"), ctx + ".sigma_spectrum"),
                      j.at("permutation").get<std::vector<int>>());
}

inline json components_to_json(const ClaimComponents& c) {
  return {{"quotient", c.quotient}, {"rho", c.rho}, {"sigma", c.sigma}, {"quadratic", c.quadratic}};
}

inline ClaimComponents components_from_json(const json& j) {
  return {j.at("quotient").get<double>(), j.at("rho").get<double>(), j.at("sigma").get<double>(),
          j.at("quadratic").get<double>()};
}

inline json report_to_json(const OrbitExtremalReport& r) {
  json rows = json::array();
  for (const auto& row : r.per_s_components) {
    rows.push_back({{"s", row.s},
                    {"co_sorted", components_to_json(row.co_sorted)},
                    {"anti_sorted", components_to_json(row.anti_sorted)}});
  }
  json j{{"function", r.function},
         {"min_value", number_or_inf(r.min_value)},
         {"max_value", number_or_inf(r.max_value)},
         {"u_min", matrix_to_json(r.u_min)},
         {"u_max", matrix_to_json(r.u_max)},
         {"min_pairing", pairing_to_json(r.min_pairing)},
         {"max_pairing", pairing_to_json(r.max_pairing)},
         {"method", std::string(to_string(r.method))},
         {"certification", {{"min", number_or_inf(r.min_certification)}, {"max", number_or_inf(r.max_certification)}}},
         {"per_s_components", std::move(rows)}};
  if (r.min_commutator) j["commutator_residual"] = {{"min", *r.min_commutator}, {"max", *r.max_commutator}};
  return j;
}

inline OrbitExtremalReport report_from_json(const json& j) {
  OrbitExtremalReport r;
  r.function = j.at("function").get<std::string>();
  r.min_value = number_from_json(j.at("min_value"), "min_value");
  r.max_value = number_from_json(j.at("max_value"), "max_value");
  r.u_min = unitary_from_json(j.at("u_min"), "u_min");
  r.u_max = unitary_from_json(j.at("u_max"), "u_max");
  r.min_pairing = pairing_from_json(j.at("min_pairing"), "min_pairing");
  r.max_pairing = pairing_from_json(j.at("max_pairing"), "max_pairing");
  const auto method = j.at("method").get<std::string>();
  r.method = method == "regularized" ? Method::regularized : method == "integral" ? Method::integral : Method::direct;
  r.min_certification = number_from_json(j.at("certification").at("min"), "certification.min");
  r.max_certification = number_from_json(j.at("certification").at("max"), "certification.max");
  if (j.contains("commutator_residual")) {
    r.min_commutator = j["commutator_residual"].at("min").get<double>();
    r.max_commutator = j["commutator_residual"].at("max").get<double>();
  }
  for (const auto& row : j.at("per_s_components")) {
    r.per_s_components.push_back({row.at("s").get<double>(), components_from_json(row.at("co_sorted")),
                                  components_from_json(row.at("anti_sorted"))});
  }
  return r;
}

/// CSV rows: s,pairing,quotient,rho,sigma,quadratic.
inline std::string components_csv(const OrbitExtremalReport& r) {
  std::ostringstream os;
  os << "s,pairing,quotient,rho,sigma,quadratic\n";
  for (const auto& row : r.per_s_components) {
    for (const auto& [label, c] : {std::pair{"co_sorted", row.co_sorted}, std::pair{"anti_sorted", row.anti_sorted}}) {
      os << format_double(row.s) << ',' << label << ',' << format_double(c.quotient) << ',' << format_double(c.rho)
         << ',' << format_double(c.sigma) << ',' << format_double(c.quadratic) << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

inline json trace_to_json(const OptimizerTrace& t) {
  json its = json::array();
  for (const auto& it : t.iterates) {
    its.push_back({{"step", it.step},
                   {"objective", it.objective},
                   {"grad_norm", it.grad_norm},
                   {"eta", it.eta},
                   {"backtracks", it.backtracks}});
  }
  json rs = json::array();
  for (const auto& r : t.restarts) {
    rs.push_back({{"start", r.start},
                  {"initial_value", r.initial_value},
                  {"final_value", r.final_value},
                  {"grad_norm", r.grad_norm},
                  {"iterations", r.iterations},
                  {"converged", r.converged}});
  }
  json j{{"direction", std::string(to_string(t.direction))},
         {"gradient", t.gradient == GradientKind::analytic ? "analytic" : "finite_difference"},
         {"best_value", t.best_value},
         {"converged", t.converged},
         {"restarts_used", t.restarts_used},
         {"best_restart", t.best_restart},
         {"final_unitary", matrix_to_json(t.final_unitary)},
         {"iterates", std::move(its)},
         {"restarts", std::move(rs)}};
  if (auto h = t.best_haar_value()) j["best_haar_value"] = *h;
  return j;
}

/// CSV rows: step,objective,grad_norm,eta,backtracks.
inline std::string trace_csv(const OptimizerTrace& t) {
  std::ostringstream os;
  os << "step,objective,grad_norm,eta,backtracks\n";
  for (const auto& it : t.iterates) {
    os << it.step << ',' << format_double(it.objective) << ',' << format_double(it.grad_norm) << ','
       << format_double(it.eta) << ',' << it.backtracks << '\n';
  }
  return os.str();
}

inline json interval_to_json(const IntervalReport& r) {
  return {{"min_value", r.min_value},
          {"max_value", r.max_value},
          {"samples", r.haar_values.size()},
          {"geodesic_steps", r.geodesic_values.empty() ? 0 : r.geodesic_values.size() - 1},
          {"violations", r.violations},
          {"max_gap", r.max_gap},
          {"max_jump", r.max_jump}};
}

inline json stationarity_to_json(const StationarityReport& r) {
  json nodes = json::array();
  for (const auto& n : r.nodes) {
    nodes.push_back({{"s", n.s}, {"commutator_a_h", n.commutator_a_h}, {"commutator_sqrta_t", n.commutator_sqrta_t}});
  }
  return {{"commutator_a_rho", r.commutator_a_rho}, {"nodes", std::move(nodes)}};
}

}  // namespace qfdiv
