#pragma once

// Subcommands of the qfdiv tool. run_cli is separate from main so tests can
// drive it with in-memory streams.
//
// Exit codes: 0 ok, 1 verification failure, 2 input error. Every failure
// writes one line of JSON {"error": CODE, "message": TEXT} to the error
// stream.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfdiv/qfdiv.hpp"

namespace qfdiv::cli {

struct RunConfig {
  std::string command;
  std::string rho_path;
  std::string sigma_path;
  std::string f_spec = "t_log_t";
  int n = 2;
  std::uint64_t seed = 1;
  int trials = -1;  // -1: command default
  std::string format = "json";
  std::string out_path;
  std::vector<std::string> suites;
  bool inject_perturbation = false;
  bool optimize = false;
  std::string method = "auto";
  std::string axis;
  std::vector<double> values;
  std::vector<double> s_nodes;
};

namespace detail {

inline void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) fail(ErrorCode::ParseError, "cannot open output file '" + c.out_path + "'");
  file << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct InputPair {
  DensityState rho;
  DensityState sigma;
  bool generated;
};

inline InputPair load_pair(const RunConfig& c) {
  if (c.rho_path.empty() != c.sigma_path.empty()) {
    fail(ErrorCode::InvalidArgument, "--rho and --sigma must be given together");
  }
  if (!c.rho_path.empty()) {
    return {load_density(c.rho_path, "rho"), load_density(c.sigma_path, "sigma"), false};
  }
  if (c.n < 1) fail(ErrorCode::InvalidArgument, "--n must be >= 1");
  Rng rng = make_stream(c.seed, static_cast<std::uint64_t>(c.n));
  auto rho = random_density(c.n, rng);
  auto sigma = random_density(c.n, rng);
  return {std::move(rho), std::move(sigma), true};
}

inline json pair_source(const RunConfig& c, const InputPair& p) {
  if (!p.generated) return {{"rho", c.rho_path}, {"sigma", c.sigma_path}};
  return {{"generated", true}, {"n", c.n}, {"seed", c.seed}};
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_compute(const RunConfig& c, std::ostream& out) {
  const auto p = detail::load_pair(c);
  const auto f = parse_function_spec(c.f_spec);
  DivergenceResult r;
  if (c.method == "auto") {
    r = s_hat(p.rho, p.sigma, f);
  } else if (c.method == "direct") {
    r = s_hat_direct(p.rho, p.sigma, f);
  } else if (c.method == "integral") {
    r = s_hat_integral(p.rho, p.sigma, f);
  } else if (c.method == "regularized") {
    r = s_hat_regularized(p.rho, p.sigma, f);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown method '" + c.method + "'");
  }
  if (c.format == "csv") {
    std::string text = "value,method,converged\n";
    text += detail::csv_line({format_double(r.value), std::string(to_string(r.method)), r.converged ? "1" : "0"});
    if (!r.epsilon_trace.empty()) {
      text += "epsilon,value\n";
      for (const auto& [e, v] : r.epsilon_trace) text += detail::csv_line({format_double(e), format_double(v)});
    }
    detail::emit(c, out, text);
  } else {
    json j = divergence_to_json(r);
    j["function"] = function_to_json(f);
    j["input"] = detail::pair_source(c, p);
    detail::emit(c, out, detail::dump(j));
  }
  return 0;
}

inline int cmd_extremal(const RunConfig& c, std::ostream& out) {
  const auto p = detail::load_pair(c);
  const auto f = parse_function_spec(c.f_spec);
  std::optional<std::vector<double>> nodes;
  if (!c.s_nodes.empty()) nodes = c.s_nodes;
  const auto rep = orbit_extremal_report(p.rho, p.sigma, f, nodes);
  if (c.format == "csv") {
    detail::emit(c, out, components_csv(rep));
    return 0;
  }
  json j = report_to_json(rep);
  j["input"] = detail::pair_source(c, p);
  if (c.optimize) {
    const int restarts = c.trials > 0 ? c.trials : 20;
    Rng rng_min = make_stream(c.seed, 0x6f7074, 1);
    Rng rng_max = make_stream(c.seed, 0x6f7074, 2);
    const auto tmin = riemannian_optimize(p.rho, p.sigma, f, Direction::min, restarts, rng_min);
    const auto tmax = riemannian_optimize(p.rho, p.sigma, f, Direction::max, restarts, rng_max);
    j["optimizer"] = {{"min", trace_to_json(tmin)}, {"max", trace_to_json(tmax)}};
  }
  detail::emit(c, out, detail::dump(j));
  return 0;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifyConfig vc;
  vc.seed = c.seed;
  if (c.trials > 0) vc.pairs = c.trials;
  vc.perturb = c.inject_perturbation;
  std::vector<std::string> selected = c.suites.empty() ? suite_names() : c.suites;
  const auto known = suite_names();
  for (const auto& s : selected) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      fail(ErrorCode::InvalidArgument, "unknown suite '" + s + "'");
    }
  }
  std::vector<SuiteResult> results;
  bool all = true;
  for (const auto& s : selected) {
    results.push_back(run_suite(s, vc));
    all = all && results.back().passed;
  }
  if (c.format == "csv") {
    std::string text = "suite,status,worst,threshold,checks\n";
    for (const auto& r : results) {
      text += detail::csv_line({r.name, r.passed ? "pass" : "fail", format_double(r.worst), format_double(r.threshold),
                                std::to_string(r.checks)});
    }
    detail::emit(c, out, text);
  } else {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"suite", r.name},
                     {"status", r.passed ? "pass" : "fail"},
                     {"worst", number_or_inf(r.worst)},
                     {"threshold", r.threshold},
                     {"checks", r.checks},
                     {"detail", r.detail}});
    }
    detail::emit(c, out, detail::dump({{"passed", all}, {"seed", c.seed}, {"pairs", vc.pairs}, {"suites", arr}}));
  }
  return all ? 0 : 1;
}

namespace detail {

struct SweepRow {
  double axis;
  double s_hat;
  double min_value;
  double max_value;
  double d_f;
  double d_f_at_min;
  double d_f_at_max;
  std::optional<SComponentsRow> components;
};

inline SweepRow sweep_row(double axis, const DensityState& rho, const DensityState& sigma,
                          const OperatorConvexFunction& f, std::optional<double> s_component) {
  const auto lo = extremal_min(rho, sigma, f);
  const auto hi = extremal_max(rho, sigma, f);
  SweepRow row{axis,
               s_hat(rho, sigma, f).value,
               lo.value,
               hi.value,
               d_f_hockey(rho, sigma, f).value,
               d_f_hockey(rho, sigma.conjugated_by(lo.unitary.matrix()), f).value,
               d_f_hockey(rho, sigma.conjugated_by(hi.unitary.matrix()), f).value,
               std::nullopt};
  if (s_component && rho.full_rank() && sigma.full_rank()) {
    row.components = SComponentsRow{*s_component, claim_components(lo.pairing, *s_component),
                                    claim_components(hi.pairing, *s_component)};
  }
  return row;
}

}  // namespace detail

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
  std::vector<detail::SweepRow> rows;
  if (c.axis == "alpha") {
    std::vector<double> alphas = c.values;
    if (alphas.empty()) {
      for (int k = 1; k <= 9; ++k) alphas.push_back(k / 10.0);
    }
    const auto p = detail::load_pair(c);
    for (double a : alphas) rows.push_back(detail::sweep_row(a, p.rho, p.sigma, make_power_alpha(a), std::nullopt));
  } else if (c.axis == "s") {
    std::vector<double> ss = c.values;
    if (ss.empty()) ss = {0.0, 0.1, 0.3, 1.0, 3.0, 10.0};
    const auto p = detail::load_pair(c);
    for (double s : ss) rows.push_back(detail::sweep_row(s, p.rho, p.sigma, make_pure_kernel(s), s));
  } else if (c.axis == "n") {
    std::vector<double> ns = c.values;
    if (ns.empty()) ns = {2, 3, 4, 5};
    const auto f = parse_function_spec(c.f_spec);
    for (double nv : ns) {
      const int n = static_cast<int>(nv);
      if (n < 1 || n != nv) fail(ErrorCode::InvalidArgument, "n sweep values must be positive integers");
      RunConfig cn = c;
      cn.n = n;
      cn.rho_path.clear();
      cn.sigma_path.clear();
      const auto p = detail::load_pair(cn);
      rows.push_back(detail::sweep_row(n, p.rho, p.sigma, f, std::nullopt));
    }
  } else {
    fail(ErrorCode::InvalidArgument, "--axis must be one of s, alpha, n");
  }

  // Changes from the previous row, as diagnostics only.
  auto delta = [&](std::size_t i, double detail::SweepRow::*field) -> std::optional<double> {
    if (i == 0) return std::nullopt;
    return rows[i].*field - rows[i - 1].*field;
  };
  const bool with_components = c.axis == "s";
  if (c.format == "csv") {
    std::vector<std::string> header = {c.axis, "s_hat", "min", "max", "d_f", "d_f_at_min", "d_f_at_max",
                                       "delta_min", "delta_max"};
    if (with_components) {
      for (const char* h : {"quotient_co", "quotient_anti", "rho_co", "rho_anti", "sigma_co", "sigma_anti"}) {
        header.emplace_back(h);
      }
    }
    std::string text = detail::csv_line(header);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
      std::vector<std::string> cells = {format_double(r.axis),       format_double(r.s_hat),
                                        format_double(r.min_value),  format_double(r.max_value),
                                        format_double(r.d_f),        format_double(r.d_f_at_min),
                                        format_double(r.d_f_at_max), opt(delta(i, &detail::SweepRow::min_value)),
                                        opt(delta(i, &detail::SweepRow::max_value))};
      if (with_components) {
        if (r.components) {
          const auto& k = *r.components;
          for (double v : {k.co_sorted.quotient, k.anti_sorted.quotient, k.co_sorted.rho, k.anti_sorted.rho,
                           k.co_sorted.sigma, k.anti_sorted.sigma}) {
            cells.push_back(format_double(v));
          }
        } else {
          cells.insert(cells.end(), 6, std::string());
        }
      }
      text += detail::csv_line(cells);
    }
    detail::emit(c, out, text);
  } else {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      json row{{c.axis, r.axis},
               {"s_hat", number_or_inf(r.s_hat)},
               {"min", number_or_inf(r.min_value)},
               {"max", number_or_inf(r.max_value)},
               {"d_f", r.d_f},
               {"d_f_at_min", r.d_f_at_min},
               {"d_f_at_max", r.d_f_at_max}};
      if (auto d = delta(i, &detail::SweepRow::min_value)) row["delta_min"] = *d;
      if (auto d = delta(i, &detail::SweepRow::max_value)) row["delta_max"] = *d;
      if (r.components) {
        row["components"] = {{"co_sorted", components_to_json(r.components->co_sorted)},
                             {"anti_sorted", components_to_json(r.components->anti_sorted)}};
      }
      arr.push_back(std::move(row));
    }
    detail::emit(c, out, detail::dump({{"axis", c.axis}, {"rows", std::move(arr)}}));
  }
  return 0;
}

inline int cmd_compare(const RunConfig& c, std::ostream& out) {
  const auto p = detail::load_pair(c);
  const auto f = parse_function_spec(c.f_spec);
  const auto sh = s_hat(p.rho, p.sigma, f);
  const auto df = d_f_hockey(p.rho, p.sigma, f);
  std::vector<double> ss = c.values.empty() ? std::vector<double>{1.0, 1.5, 2.0, 4.0} : c.values;
  const double comm = frobenius_norm(commutator(p.rho.matrix(), p.sigma.matrix()));
  if (c.format == "csv") {
    std::string text = "quantity,value\n";
    text += detail::csv_line({"s_hat", format_double(sh.value)});
    text += detail::csv_line({"d_f", format_double(df.value)});
    text += detail::csv_line({"commutator_norm", format_double(comm)});
    for (double s : ss) text += detail::csv_line({"E_" + format_double(s), format_double(hockey_stick(p.rho, p.sigma, s))});
    detail::emit(c, out, text);
    return 0;
  }
  json es = json::array();
  for (double s : ss) es.push_back({{"s", s}, {"value", hockey_stick(p.rho, p.sigma, s)}});
  json j{{"function", function_to_json(f)},
         {"s_hat", divergence_to_json(sh)},
         {"d_f", hockey_to_json(df)},
         {"commutator_norm", comm},
         {"hockey_stick", std::move(es)},
         {"input", detail::pair_source(c, p)}};
  detail::emit(c, out, detail::dump(j));
  return 0;
}

// ---------------------------------------------------------------------------

inline void report_error(std::ostream& err, const std::string& code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal quantum f-divergences and their unitary-orbit extremes"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--rho", c.rho_path, "JSON file with rho");
    sub->add_option("--sigma", c.sigma_path, "JSON file with sigma");
    sub->add_option("--f", c.f_spec, "function NAME[:PARAM]");
    sub->add_option("--n", c.n, "dimension of generated states");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--trials", c.trials, "trials (verify: pairs per dimension, extremal: restarts)");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", c.out_path, "write output to PATH");
  };

  auto* compute = app.add_subcommand("compute", "evaluate the divergence of a pair");
  add_common(compute);
  compute->add_option("--method", c.method, "auto, direct, integral or regularized");

  auto* extremal = app.add_subcommand("extremal", "closed-form orbit extremes");
  add_common(extremal);
  extremal->add_flag("--optimize", c.optimize, "also run the Riemannian search");
  extremal->add_option("--s", c.s_nodes, "s nodes for the per-s table")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "run the property suites");
  add_common(verify);
  verify->add_option("--suites", c.suites, "comma-separated suite names")->delimiter(',');
  verify->add_flag("--inject-perturbation", c.inject_perturbation, "negative control for the sandwich suite");

  auto* sweep = app.add_subcommand("sweep", "extremes and D_f along an axis");
  add_common(sweep);
  sweep->add_option("--axis", c.axis, "s, alpha or n")->required();
  sweep->add_option("--values", c.values, "comma-separated axis values")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "S_f next to D_f and E_s");
  add_common(compare);
  compare->add_option("--values", c.values, "comma-separated s values for E_s")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (c.trials != -1 && c.trials < 1) fail(ErrorCode::InvalidArgument, "--trials must be >= 1");
    if (compute->parsed()) return cmd_compute(c, out);
    if (extremal->parsed()) return cmd_extremal(c, out);
    if (verify->parsed()) return cmd_verify(c, out);
    if (sweep->parsed()) return cmd_sweep(c, out);
    if (compare->parsed()) return cmd_compare(c, out);
  } catch (const Error& e) {
    const std::string code(to_string(e.code()));
    std::string message = e.what();
    if (message.rfind(code + ": ", 0) == 0) message.erase(0, code.size() + 2);
    report_error(err, code, message);
    return 2;
  } catch (const json::exception& e) {
    report_error(err, "ParseError", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return 2;
  }
  return 2;
}

}  // namespace qfdiv::cli
