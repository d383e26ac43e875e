#include "opscale/json_io.hpp"

#include <fstream>

#include "opscale/errors.hpp"
#include "opscale/formula.hpp"

namespace opscale {

namespace {

int require_int(const Json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_number_integer()) {
    throw SchemaError(std::string("missing or non-integer field \"") + field +
                      "\"");
  }
  return doc[field].get<int>();
}

// Raw 2D array of rational strings.
QMat grid_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(std::string(what) + " must be a nonempty 2D array");
  }
  int rows = static_cast<int>(j.size());
  int cols = -1;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) {
      throw SchemaError(std::string(what) + " rows must be nonempty arrays");
    }
    if (cols < 0) {
      cols = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != cols) {
      throw SchemaError(std::string(what) + " rows have unequal lengths");
    }
  }
  QMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Json& cell = j[r][c];
      if (cell.is_string()) {
        m(r, c) = parse_rational(cell.get<std::string>());
      } else if (cell.is_number_integer()) {
        m(r, c) = Rational(static_cast<long>(cell.get<long long>()));
      } else {
        throw SchemaError(std::string(what) +
                          " entries must be rational strings");
      }
    }
  }
  return m;
}

Json grid_to_json(const QMat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json matrix_to_json(const QMat& m) {
  m.require_square("matrix document");
  Json doc;
  doc["n"] = m.rows();
  doc["entries"] = grid_to_json(m);
  return doc;
}

QMat matrix_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("entries")) {
    throw SchemaError("matrix document needs an \"entries\" field");
  }
  int n = require_int(doc, "n");
  QMat m = grid_from_json(doc["entries"], "\"entries\"");
  if (m.rows() != n || m.cols() != n) {
    throw SchemaError("\"entries\" shape disagrees with \"n\"");
  }
  return m;
}

NonnegMatrix nonneg_matrix_from_json(const Json& doc) {
  return NonnegMatrix(matrix_from_json(doc));
}

Json operator_to_json(const CPOperator& t) {
  Json doc;
  doc["n"] = t.n();
  Json kraus = Json::array();
  for (const auto& a : t.kraus()) kraus.push_back(grid_to_json(a));
  doc["kraus"] = std::move(kraus);
  return doc;
}

CPOperator operator_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("kraus") || !doc["kraus"].is_array() ||
      doc["kraus"].empty()) {
    throw SchemaError("operator document needs a nonempty \"kraus\" array");
  }
  int n = require_int(doc, "n");
  std::vector<QMat> kraus;
  kraus.reserve(doc["kraus"].size());
  for (const auto& a : doc["kraus"]) {
    QMat m = grid_from_json(a, "Kraus matrix");
    if (m.rows() != n || m.cols() != n) {
      throw SchemaError("Kraus matrix shape disagrees with \"n\"");
    }
    kraus.push_back(std::move(m));
  }
  return CPOperator(std::move(kraus));
}

Json pencil_to_json(const LinearMatrixPencil& p) {
  p.validate();
  Json doc;
  if (p.is_square()) {
    doc["n"] = p.rows;
  } else {
    doc["rows"] = p.rows;
    doc["cols"] = p.cols;
  }
  Json vars = Json::array();
  for (const auto& v : p.vars) vars.push_back(v);
  doc["vars"] = std::move(vars);
  doc["A0"] = p.a0 ? grid_to_json(*p.a0) : Json(nullptr);
  Json coeffs = Json::array();
  for (const auto& c : p.coeffs) coeffs.push_back(grid_to_json(c));
  doc["coeffs"] = std::move(coeffs);
  return doc;
}

LinearMatrixPencil pencil_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("vars") || !doc.contains("coeffs")) {
    throw SchemaError("pencil document needs \"vars\" and \"coeffs\" fields");
  }
  LinearMatrixPencil p;
  if (doc.contains("n")) {
    p.rows = p.cols = require_int(doc, "n");
  } else {
    p.rows = require_int(doc, "rows");
    p.cols = require_int(doc, "cols");
  }
  if (!doc["vars"].is_array()) throw SchemaError("\"vars\" must be an array");
  for (const auto& v : doc["vars"]) {
    if (!v.is_string()) throw SchemaError("variable names must be strings");
    p.vars.push_back(v.get<std::string>());
  }
  if (doc.contains("A0") && !doc["A0"].is_null()) {
    p.a0 = grid_from_json(doc["A0"], "\"A0\"");
  }
  if (!doc["coeffs"].is_array()) {
    throw SchemaError("\"coeffs\" must be an array");
  }
  for (const auto& c : doc["coeffs"]) {
    p.coeffs.push_back(grid_from_json(c, "coefficient matrix"));
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid pencil document: ") + e.what());
  }
  return p;
}

Json symbolic_to_json(const SymbolicMatrix& m) {
  Json doc;
  doc["rows"] = m.rows;
  doc["cols"] = m.cols;
  Json rows = Json::array();
  for (int r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(print_formula(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  doc["entries"] = std::move(rows);
  return doc;
}

SymbolicMatrix symbolic_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("entries")) {
    throw SchemaError("symbolic document needs an \"entries\" field");
  }
  SymbolicMatrix m;
  m.rows = require_int(doc, "rows");
  m.cols = require_int(doc, "cols");
  const Json& rows = doc["entries"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != m.rows) {
    throw SchemaError("\"entries\" row count disagrees with \"rows\"");
  }
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != m.cols) {
      throw SchemaError("\"entries\" column count disagrees with \"cols\"");
    }
    for (const auto& cell : row) {
      if (!cell.is_string()) {
        throw SchemaError("symbolic entries must be formula strings");
      }
      m.entries.push_back(parse_formula(cell.get<std::string>()));
    }
  }
  return m;
}

Json rank_report_to_json(const RankReport& r) {
  Json doc;
  doc["ncrank"] = r.ncrank;
  doc["method"] = r.method;
  doc["commutative_rank_estimate"] = r.commutative_rank_estimate;
  doc["trials"] = r.trials;
  Json subs = Json::array();
  for (const auto& s : r.subverdicts) {
    Json sub;
    sub["probe"] = s.probe;
    sub["full"] = s.full;
    sub["iterations"] = s.iterations;
    subs.push_back(std::move(sub));
  }
  doc["subverdicts"] = std::move(subs);
  return doc;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  return doc;
}

}  // namespace opscale
