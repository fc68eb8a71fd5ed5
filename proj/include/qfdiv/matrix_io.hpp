#pragma once

// Matrix JSON schema: { "dim": n, "re": [[...]], "im": [[...]] }.
// Density states may add "trace_tol". "im" may be omitted for real input.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline json matrix_to_json(const HermitianMatrix& m) { return matrix_to_json(m.matrix()); }
inline json matrix_to_json(const UnitaryMatrix& m) { return matrix_to_json(m.matrix()); }

inline json density_to_json(const DensityState& rho, double trace_tol = tol::trace) {
  json j = matrix_to_json(rho.matrix());
  j["trace_tol"] = trace_tol;
  return j;
}

namespace detail {

inline void parse_block(const json& j, std::string_view field, Index n, std::string_view context, Matrix& out,
                        bool imaginary) {
  const std::string where = std::string(context) + "." + std::string(field);
  const json& rows = j.at(std::string(field));
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
    fail(ErrorCode::ParseError, "field '" + where + "' must be an array of " + std::to_string(n) + " rows");
  }
  for (Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      fail(ErrorCode::ParseError,
           "field '" + where + "[" + std::to_string(i) + "]' must be an array of " + std::to_string(n) + " numbers");
    }
    for (Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        fail(ErrorCode::ParseError,
             "field '" + where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]' is not a number");
      }
      const double x = v.get<double>();
      if (imaginary) {
        out(i, k) = complex(out(i, k).real(), x);
      } else {
        out(i, k) = complex(x, out(i, k).imag());
      }
    }
  }
}

}  // namespace detail

inline Matrix matrix_from_json(const json& j, std::string_view context = "matrix") {
  const std::string ctx(context);
  if (!j.is_object()) fail(ErrorCode::ParseError, "'" + ctx + "' must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    fail(ErrorCode::ParseError, "field '" + ctx + ".dim' missing or not an integer");
  }
  const auto n = j["dim"].get<long long>();
  if (n < 1) fail(ErrorCode::ParseError, "field '" + ctx + ".dim' must be >= 1");
  if (!j.contains("re")) fail(ErrorCode::ParseError, "field '" + ctx + ".re' missing");
  Matrix m = Matrix::Zero(n, n);
  detail::parse_block(j, "re", n, ctx, m, false);
  if (j.contains("im")) detail::parse_block(j, "im", n, ctx, m, true);
  return m;
}

inline HermitianMatrix hermitian_from_json(const json& j, std::string_view context = "matrix") {
  return HermitianMatrix(matrix_from_json(j, context));
}

inline UnitaryMatrix unitary_from_json(const json& j, std::string_view context = "unitary") {
  return UnitaryMatrix(matrix_from_json(j, context), 1e-9);
}

inline DensityState density_from_json(const json& j, std::string_view context = "state") {
  double trace_tol = tol::trace;
  if (j.is_object() && j.contains("trace_tol")) {
    if (!j["trace_tol"].is_number()) {
      fail(ErrorCode::ParseError, "field '" + std::string(context) + ".trace_tol' is not a number");
    }
    trace_tol = j["trace_tol"].get<double>();
  }
  return DensityState(hermitian_from_json(j, context), trace_tol);
}

/// Parses a JSON document; parse failures keep nlohmann's line/column text.
inline json parse_json_text(const std::string& text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string(source) + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

inline DensityState load_density(const std::string& path, std::string_view context) {
  return density_from_json(read_json_file(path), context);
}

}  // namespace qfdiv
