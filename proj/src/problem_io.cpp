#include "jordanperturb/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jordanperturb {

JordanStructure ProblemFile::structure() const { return JordanStructure(lambda0, sizes); }

ReducedProblem ProblemFile::reduced() const {
  if (!general) throw Error(ErrorKind::InvalidArgument, "problem is not in general form");
  const SpectralTransformation trans{general->xi, general->xi_c, general->a22, structure()};
  return reduce(general->a, general->d, trans);
}

CanonicalPair ProblemFile::canonical_pair() const {
  if (d11) return CanonicalPair(structure(), *d11);
  return reduced().pair;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex complex_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::ParseError, what + ": expected [re, im]");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(ErrorKind::ParseError, what + ": non-finite entry");
  return z;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, what + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  for (const Json& row : j) {
    if (!row.is_array()) throw Error(ErrorKind::ParseError, what + ": rows must be arrays");
    if (cols < 0) cols = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != cols)
      throw Error(ErrorKind::ParseError, what + ": ragged rows");
  }
  ComplexMatrix m(rows, std::max<Index>(cols, 0));
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                                  what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  return m;
}

Json problem_to_json(const ProblemFile& p) {
  Json j;
  j["lambda0"] = complex_to_json(p.lambda0);
  j["sizes"] = p.sizes;
  if (p.d11) j["d11"] = matrix_to_json(*p.d11);
  if (p.general) {
    j["a"] = matrix_to_json(p.general->a);
    j["d"] = matrix_to_json(p.general->d);
    j["xi"] = matrix_to_json(p.general->xi);
    j["xi_c"] = matrix_to_json(p.general->xi_c);
    j["a22"] = matrix_to_json(p.general->a22);
  }
  return j;
}

namespace {

void expect_shape(const ComplexMatrix& m, Index rows, Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(ErrorKind::ParseError, what + ": expected " + std::to_string(rows) + "x" +
                                           std::to_string(cols) + ", got " +
                                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}  // namespace

ProblemFile problem_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "problem file must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"lambda0", "sizes", "d11", "a", "d", "xi", "xi_c", "a22"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw Error(ErrorKind::ParseError, "unknown key: " + key);
  }
  if (!j.contains("lambda0") || !j.contains("sizes"))
    throw Error(ErrorKind::ParseError, "lambda0 and sizes are required");
  ProblemFile p;
  p.lambda0 = complex_from_json(j["lambda0"], "lambda0");
  const Json& sizes = j["sizes"];
  if (!sizes.is_array() || sizes.empty()) throw Error(ErrorKind::ParseError, "sizes: expected a list");
  for (const Json& s : sizes) {
    if (!s.is_number_integer() || s.get<long long>() < 0)
      throw Error(ErrorKind::ParseError, "sizes: expected non-negative integers");
    p.sizes.push_back(static_cast<Index>(s.get<long long>()));
  }
  JordanStructure st = [&] {
    try {
      return p.structure();
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, std::string("sizes: ") + e.what());
    }
  }();
  const Index m = st.dimension();

  const bool canonical = j.contains("d11");
  const char* general_keys[] = {"a", "d", "xi", "xi_c", "a22"};
  int general_count = 0;
  for (const char* key : general_keys) general_count += j.contains(key) ? 1 : 0;
  if (canonical == (general_count > 0) || (general_count > 0 && general_count < 5))
    throw Error(ErrorKind::ParseError, "give exactly one of {d11} or {a, d, xi, xi_c, a22}");
  if (canonical) {
    p.d11 = matrix_from_json(j["d11"], "d11");
    expect_shape(*p.d11, m, m, "d11");
    return p;
  }
  GeneralForm g;
  g.a = matrix_from_json(j["a"], "a");
  const Index n = g.a.rows();
  expect_shape(g.a, n, n, "a");
  g.d = matrix_from_json(j["d"], "d");
  expect_shape(g.d, n, n, "d");
  g.xi = matrix_from_json(j["xi"], "xi");
  expect_shape(g.xi, n, m, "xi");
  g.xi_c = matrix_from_json(j["xi_c"], "xi_c");
  g.a22 = matrix_from_json(j["a22"], "a22");
  if (n - m == 0) {
    g.xi_c.resize(n, 0);
    g.a22.resize(0, 0);
  }
  expect_shape(g.xi_c, n, n - m, "xi_c");
  expect_shape(g.a22, n - m, n - m, "a22");
  p.general = std::move(g);
  return p;
}

namespace {

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump(value, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_primitive() ||
               (e.is_array() && std::all_of(e.begin(), e.end(), [](const Json& x) { return x.is_primitive(); }));
      });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          dump(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        dump(j[i], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

ProblemFile parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return problem_from_json(j);
}

ProblemFile read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_problem(text.str());
}

std::string write_problem(const ProblemFile& p) { return canonical_dump(problem_to_json(p)); }

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorKind::IoError, "cannot write " + path);
}

}  // namespace jordanperturb
