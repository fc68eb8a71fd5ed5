#pragma once

// Catalog of operator convex functions on (0, inf) together with the data of
// their integral representation
//
//   f(x) = f(1) + f'(1)(x-1) + c(x-1)^2 + int (x-1)^2/(x+s) dlambda(s).
//
// Measures are exact (finite atom lists) for square, power_alpha(2) and
// pure_kernel(s0). For t log t, -log t and t^alpha the measure has density
//
//   dlambda(s) = k s^a / (1+s)^2 ds,
//
// (k = 1, a = 1 for t log t; k = 1, a = 0 for -log t; k = |sin(alpha pi)|/pi,
// a = alpha for t^alpha), discretized by a composite Gauss-Legendre rule in
// log(s) with analytic bounds for both truncated tails.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qfdiv/error.hpp"
#include "qfdiv/quadrature.hpp"

namespace qfdiv {

enum class MeasureKind { none, discrete, quadrature };

constexpr std::string_view to_string(MeasureKind k) noexcept {
  switch (k) {
    case MeasureKind::none: return "none";
    case MeasureKind::discrete: return "discrete";
    case MeasureKind::quadrature: return "quadrature";
  }
  return "none";
}

struct MeasureAtom {
  double s;
  double weight;
};

struct RepresentationMeasure {
  MeasureKind kind = MeasureKind::none;
  /// Exact atoms (discrete) or quadrature nodes approximating dlambda.
  std::vector<MeasureAtom> atoms;
  /// Quadrature support [s_min, s_max]; unused for discrete measures.
  double s_min = 0.0;
  double s_max = 0.0;
  /// Upper bound on lambda([0, s_min)).
  double lower_tail_mass = 0.0;
  /// Upper bound on the integral of dlambda(s)/s over (s_max, inf).
  double upper_tail_weight = 0.0;

  static RepresentationMeasure empty() { return {MeasureKind::discrete, {}, 0.0, 0.0, 0.0, 0.0}; }
  static RepresentationMeasure single_atom(double s, double weight = 1.0) {
    return {MeasureKind::discrete, {{s, weight}}, 0.0, 0.0, 0.0, 0.0};
  }

  bool available() const noexcept { return kind != MeasureKind::none; }
  bool exact() const noexcept { return kind == MeasureKind::discrete; }

  /// Bound on |quadrature - exact| of the integral term at x, from the two
  /// truncated tails: (x-1)^2/(x+s) <= (x-1)^2/s above and <= (x-1)^2/x below.
  double tail_bound(double x) const {
    if (exact()) return 0.0;
    const double d2 = (x - 1.0) * (x - 1.0);
    return d2 * (upper_tail_weight + lower_tail_mass / x);
  }

  /// Sum of weight/(1+s); finite by construction.
  double integrability() const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight / (1.0 + a.s);
    return acc;
  }
};

struct OperatorConvexFunction {
  std::string name;
  std::optional<double> parameter;  // alpha for power_alpha, s0 for pure_kernel
  std::function<double(double)> eval;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  double f_at_1 = 0.0;
  double fprime_at_1 = 0.0;
  double quad_coeff = 0.0;
  RepresentationMeasure measure;
  /// f(0+) when finite; lets zero eigenvalues of the likelihood ratio be
  /// evaluated directly.
  std::optional<double> value_at_zero;
  /// lim_{u -> 0+} (u f'(u) - f(u)) when finite.
  std::optional<double> moment_at_zero;

  double operator()(double x) const { return eval(x); }

  /// Evaluation that also accepts x = 0 when f(0+) is finite.
  double eval_nonnegative(double x) const {
    if (x > 0.0) return eval(x);
    if (x == 0.0 && value_at_zero) return *value_at_zero;
    fail(ErrorCode::DomainViolation,
         name + " is undefined at " + std::to_string(x) + " (domain is (0, inf))");
  }

  /// "t_log_t", "power_alpha:0.5", "pure_kernel:1".
  std::string spec() const {
    if (!parameter) return name;
    std::ostringstream os;
    os.precision(17);
    os << name << ':' << *parameter;
    return os.str();
  }
};

namespace detail {

inline double sqr(double x) { return x * x; }

/// Builds the log-spaced quadrature for k s^a/(1+s)^2 ds, a in (-1, 2).
inline RepresentationMeasure density_measure(double k, double a, int nodes_per_panel = 8) {
  constexpr double upper_target = 1e-16;  // (x-1)^2 * weight <= 1e-10 at x = 1e3
  constexpr double lower_target = 1e-13;  // (x-1)^2/x * mass <= 1e-10 at x = 1e-3
  constexpr double t_cap = 690.0;         // s stays within double range
  constexpr double core = 16.0;

  // lambda([0, s_min)) <= k s_min^(a+1)/(a+1); tail weight <= k S^(a-2)/(2-a).
  double t_lo = (std::log(lower_target * (a + 1.0) / k)) / (a + 1.0);
  double t_hi = (std::log(upper_target * (2.0 - a) / k)) / (a - 2.0);
  t_lo = std::min(std::max(t_lo, -t_cap), -core - 1.0);
  t_hi = std::max(std::min(t_hi, t_cap), core + 1.0);

  std::vector<double> breaks;
  // Geometric panels on the left tail, uniform width-2 panels in the core,
  // geometric panels on the right tail: 8 + 16 + 8 panels.
  auto geometric = [](double from, double to, int panels, bool toward_core_first) {
    std::vector<double> b;
    const double ratio = 1.6;
    double total = 0.0;
    double w = 1.0;
    std::vector<double> widths;
    for (int p = 0; p < panels; ++p) {
      widths.push_back(w);
      total += w;
      w *= ratio;
    }
    const double scale = (to - from) / total;
    if (toward_core_first) {
      // Small panels next to 'from'.
      double t = from;
      b.push_back(t);
      for (double width : widths) b.push_back(t += width * scale);
    } else {
      double t = to;
      std::vector<double> rev{t};
      for (double width : widths) rev.push_back(t -= width * scale);
      b.assign(rev.rbegin(), rev.rend());
    }
    b.back() = to;
    b.front() = from;
    return b;
  };
  auto left = geometric(t_lo, -core, 8, false);
  breaks.insert(breaks.end(), left.begin(), left.end());
  for (int p = 1; p <= 16; ++p) breaks.push_back(-core + 2.0 * p);
  auto right = geometric(core, t_hi, 8, true);
  breaks.insert(breaks.end(), right.begin() + 1, right.end());

  RepresentationMeasure m;
  m.kind = MeasureKind::quadrature;
  for (const auto& q : composite_gauss_legendre(breaks, nodes_per_panel)) {
    const double s = std::exp(q.x);
    // dlambda = k s^a/(1+s)^2 ds = k s^(a+1)/(1+s)^2 dt
    const double dens = k * std::exp((a + 1.0) * q.x) / sqr(1.0 + s);
    m.atoms.push_back({s, dens * q.w});
  }
  m.s_min = std::exp(t_lo);
  m.s_max = std::exp(t_hi);
  m.lower_tail_mass = k * std::exp((a + 1.0) * t_lo) / (a + 1.0);
  m.upper_tail_weight = k * std::exp((a - 2.0) * t_hi) / (2.0 - a);
  return m;
}

}  // namespace detail

inline OperatorConvexFunction make_t_log_t() {
  OperatorConvexFunction f;
  f.name = "t_log_t";
  f.eval = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); };
  f.derivative = [](double x) { return std::log(x) + 1.0; };
  f.second_derivative = [](double x) { return 1.0 / x; };
  f.f_at_1 = 0.0;
  f.fprime_at_1 = 1.0;
  f.quad_coeff = 0.0;
  f.measure = detail::density_measure(1.0, 1.0);
  f.value_at_zero = 0.0;
  f.moment_at_zero = 0.0;
  return f;
}

inline OperatorConvexFunction make_neg_log() {
  OperatorConvexFunction f;
  f.name = "neg_log";
  f.eval = [](double x) { return -std::log(x); };
  f.derivative = [](double x) { return -1.0 / x; };
  f.second_derivative = [](double x) { return 1.0 / (x * x); };
  f.f_at_1 = 0.0;
  f.fprime_at_1 = -1.0;
  f.quad_coeff = 0.0;
  f.measure = detail::density_measure(1.0, 0.0);
  return f;
}

inline OperatorConvexFunction make_square() {
  OperatorConvexFunction f;
  f.name = "square";
  f.eval = [](double x) { return x * x; };
  f.derivative = [](double x) { return 2.0 * x; };
  f.second_derivative = [](double) { return 2.0; };
  f.f_at_1 = 1.0;
  f.fprime_at_1 = 2.0;
  f.quad_coeff = 1.0;
  f.measure = RepresentationMeasure::empty();
  f.value_at_zero = 0.0;
  f.moment_at_zero = 0.0;
  return f;
}

/// sign(alpha) t^alpha chosen so the function is operator convex: -t^alpha
/// on (0,1), +t^alpha on (-1,0) and (1,2].
inline OperatorConvexFunction make_power_alpha(double alpha) {
  const bool admitted = (alpha > -1.0 && alpha < 0.0) || (alpha > 0.0 && alpha < 1.0) || (alpha > 1.0 && alpha <= 2.0);
  if (!admitted) {
    std::ostringstream os;
    os << "power_alpha requires alpha in (-1,0) u (0,1) u (1,2], got " << alpha;
    fail(ErrorCode::AlphaOutOfOperatorConvexRange, os.str());
  }
  const double sign = (alpha > 0.0 && alpha < 1.0) ? -1.0 : 1.0;
  OperatorConvexFunction f;
  f.name = "power_alpha";
  f.parameter = alpha;
  f.eval = [=](double x) { return sign * std::pow(x, alpha); };
  f.derivative = [=](double x) { return sign * alpha * std::pow(x, alpha - 1.0); };
  f.second_derivative = [=](double x) { return sign * alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0); };
  f.f_at_1 = sign;
  f.fprime_at_1 = sign * alpha;
  if (alpha == 2.0) {
    f.quad_coeff = 1.0;
    f.measure = RepresentationMeasure::empty();
  } else {
    f.quad_coeff = 0.0;
    f.measure = detail::density_measure(std::abs(std::sin(alpha * std::numbers::pi)) / std::numbers::pi, alpha);
  }
  if (alpha > 0.0) {
    f.value_at_zero = 0.0;
    f.moment_at_zero = 0.0;
  }
  return f;
}

/// (x-1)^2/(x+s0): c = 0 and a single unit atom at s0.
inline OperatorConvexFunction make_pure_kernel(double s0) {
  if (!(s0 >= 0.0) || !std::isfinite(s0)) {
    fail(ErrorCode::InvalidArgument, "pure_kernel requires s0 >= 0, got " + std::to_string(s0));
  }
  OperatorConvexFunction f;
  f.name = "pure_kernel";
  f.parameter = s0;
  f.eval = [=](double x) { return (x - 1.0) * (x - 1.0) / (x + s0); };
  f.derivative = [=](double x) { return (x - 1.0) * (x + 2.0 * s0 + 1.0) / ((x + s0) * (x + s0)); };
  f.second_derivative = [=](double x) { return 2.0 * (1.0 + s0) * (1.0 + s0) / std::pow(x + s0, 3); };
  f.f_at_1 = 0.0;
  f.fprime_at_1 = 0.0;
  f.quad_coeff = 0.0;
  f.measure = RepresentationMeasure::single_atom(s0);
  if (s0 > 0.0) {
    f.value_at_zero = 1.0 / s0;
    f.moment_at_zero = -1.0 / s0;
  }
  return f;
}

inline OperatorConvexFunction catalog_lookup(std::string_view name, std::optional<double> parameter = std::nullopt) {
  auto no_param = [&](std::string_view n) {
    if (parameter) fail(ErrorCode::InvalidArgument, std::string(n) + " takes no parameter");
  };
  if (name == "t_log_t") {
    no_param(name);
    return make_t_log_t();
  }
  if (name == "neg_log") {
    no_param(name);
    return make_neg_log();
  }
  if (name == "square") {
    no_param(name);
    return make_square();
  }
  if (name == "power_alpha") {
    if (!parameter) fail(ErrorCode::InvalidArgument, "power_alpha requires alpha");
    return make_power_alpha(*parameter);
  }
  if (name == "pure_kernel") {
    if (!parameter) fail(ErrorCode::InvalidArgument, "pure_kernel requires s0");
    return make_pure_kernel(*parameter);
  }
  fail(ErrorCode::UnknownFunction, "unknown function '" + std::string(name) + "'");
}

/// Parses "NAME" or "NAME:PARAM".
inline OperatorConvexFunction parse_function_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return catalog_lookup(spec);
  const std::string param(spec.substr(colon + 1));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(param, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != param.size()) {
    fail(ErrorCode::ParseError, "function parameter '" + param + "' is not a number");
  }
  return catalog_lookup(spec.substr(0, colon), value);
}

/// Right-hand side of the integral representation at x > 0.
inline double representation_eval(const OperatorConvexFunction& f, double x) {
  if (!f.measure.available()) {
    fail(ErrorCode::MeasureUnavailable, f.name + " carries no representation data");
  }
  if (!(x > 0.0)) fail(ErrorCode::DomainViolation, "representation_eval requires x > 0");
  const double d = x - 1.0;
  std::vector<double> terms;
  terms.reserve(f.measure.atoms.size());
  for (const auto& a : f.measure.atoms) terms.push_back(a.weight * d * d / (x + a.s));
  return f.f_at_1 + f.fprime_at_1 * d + f.quad_coeff * d * d + pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// JSON: { "name": ..., "alpha": optional, "s0": optional }

using json = nlohmann::json;

inline json function_to_json(const OperatorConvexFunction& f) {
  json j{{"name", f.name}};
  if (f.parameter) j[f.name == "power_alpha" ? "alpha" : "s0"] = *f.parameter;
  return j;
}

inline OperatorConvexFunction function_from_json(const json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
    fail(ErrorCode::ParseError, "function specification needs a string field 'name'");
  }
  const auto name = j["name"].get<std::string>();
  std::optional<double> param;
  for (const char* key : {"alpha", "s0"}) {
    if (j.contains(key)) {
      if (!j[key].is_number()) fail(ErrorCode::ParseError, std::string("field '") + key + "' is not a number");
      param = j[key].get<double>();
    }
  }
  return catalog_lookup(name, param);
}

inline json measure_to_json(const RepresentationMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms) atoms.push_back({a.s, a.weight});
  json j{{"kind", std::string(to_string(m.kind))}, {"atoms", std::move(atoms)}};
  if (m.kind == MeasureKind::quadrature) {
    j["s_min"] = m.s_min;
    j["s_max"] = m.s_max;
    j["lower_tail_mass"] = m.lower_tail_mass;
    j["upper_tail_weight"] = m.upper_tail_weight;
  }
  return j;
}

inline RepresentationMeasure measure_from_json(const json& j) {
  RepresentationMeasure m;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    m.kind = MeasureKind::discrete;
  } else if (kind == "quadrature") {
    m.kind = MeasureKind::quadrature;
  } else if (kind == "none") {
    m.kind = MeasureKind::none;
  } else {
    fail(ErrorCode::ParseError, "unknown measure kind '" + kind + "'");
  }
  for (const auto& a : j.at("atoms")) {
    const double s = a.at(0).get<double>();
    const double w = a.at(1).get<double>();
    if (!(s >= 0.0) || !(w > 0.0)) fail(ErrorCode::ParseError, "measure atoms need s >= 0 and weight > 0");
    m.atoms.push_back({s, w});
  }
  m.s_min = j.value("s_min", 0.0);
  m.s_max = j.value("s_max", 0.0);
  m.lower_tail_mass = j.value("lower_tail_mass", 0.0);
  m.upper_tail_weight = j.value("upper_tail_weight", 0.0);
  return m;
}

}  // namespace qfdiv
