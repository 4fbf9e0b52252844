#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jordanperturb/reduction.hpp"

namespace jordanperturb {

using Json = nlohmann::json;

struct GeneralForm {
  ComplexMatrix a, d, xi, xi_c, a22;
};

// Problem file: lambda0, sizes and either d11 (canonical) or the general-form matrices.
struct ProblemFile {
  Complex lambda0;
  std::vector<Index> sizes;
  std::optional<ComplexMatrix> d11;
  std::optional<GeneralForm> general;

  JordanStructure structure() const;
  // The canonical pair, reducing the general form when needed.
  CanonicalPair canonical_pair() const;
  ReducedProblem reduced() const;  // general form only
};

// Complex numbers are [re, im]; matrices are row-major nested arrays.
Json complex_to_json(Complex z);
Json matrix_to_json(const ComplexMatrix& m);
Complex complex_from_json(const Json& j, const std::string& what);
ComplexMatrix matrix_from_json(const Json& j, const std::string& what);

Json problem_to_json(const ProblemFile& p);
ProblemFile problem_from_json(const Json& j);  // ParseError

// Sorted keys, 17 significant digits, numeric arrays on one line; write -> read -> write is
// byte-identical.
std::string canonical_dump(const Json& j);

ProblemFile parse_problem(const std::string& text);
ProblemFile read_problem(const std::string& path);  // IoError, ParseError
std::string write_problem(const ProblemFile& p);
void save_text(const std::string& path, const std::string& text);  // IoError

}  // namespace jordanperturb
