#pragma once

#include <string>

#include <json.hpp>

#include "opscale/cp_operator.hpp"
#include "opscale/matrix_scaling.hpp"
#include "opscale/ncrank.hpp"
#include "opscale/pencil.hpp"

// JSON document formats (rational entries are strings like "-3/7" or "42"):
//   matrix    {"n": int, "entries": [[str, ...], ...]}
//   operator  {"n": int, "kraus": [[[str, ...], ...], ...]}
//   pencil    {"n": int | "rows"/"cols": int, "vars": [str, ...],
//              "A0": [[str, ...], ...] | null, "coeffs": [[[str, ...], ...]]}
//   symbolic  {"rows": int, "cols": int, "entries": [[formula-str, ...], ...]}
// Structural problems raise SchemaError; bad rational or formula text raises
// ParseError.
namespace opscale {

using Json = nlohmann::json;

Json matrix_to_json(const QMat& m);
QMat matrix_from_json(const Json& doc);

NonnegMatrix nonneg_matrix_from_json(const Json& doc);

Json operator_to_json(const CPOperator& t);
CPOperator operator_from_json(const Json& doc);

Json pencil_to_json(const LinearMatrixPencil& p);
LinearMatrixPencil pencil_from_json(const Json& doc);

Json symbolic_to_json(const SymbolicMatrix& m);
SymbolicMatrix symbolic_from_json(const Json& doc);

Json rank_report_to_json(const RankReport& r);

// Reads and parses a file; ParseError on unreadable or malformed JSON.
Json load_json_file(const std::string& path);

}  // namespace opscale
