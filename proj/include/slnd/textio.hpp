#pragma once

#include "slnd/smallmat.hpp"

#include <iosfwd>
#include <string>
#include <vector>

// vendor single-header json
#include "json.hpp"

namespace slnd {

using Json = nlohmann::ordered_json;

/// Matrix text format: one row per line, whitespace-separated entries as
/// decimal integers or "p/q" rationals; a blank line terminates the matrix.
QMat parse_matrix_text(std::istream& in);
QMat parse_matrix_text(const std::string& text);

/// A sequence of matrices separated by blank lines (trajectory files).
std::vector<QMat> parse_matrices_text(std::istream& in);

std::string matrix_to_text(const QMat& m);

/// %.17g: every float emitted with 17 significant digits.
std::string format_double17(double x);

/// JSON serialization with deterministic float formatting (17 significant
/// digits), insertion key order preserved.
std::string json_dump_17(const Json& j, int indent = 2);

Json matrix_to_json(const QMat& m);
Json matrix_to_json(const Eigen::MatrixXd& m);
QMat matrix_from_json(const Json& j);

}  // namespace slnd
