#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jordanperturb/structure.hpp"

namespace jordanperturb {

// Seeded complex Gaussian stream: std::mt19937_64 words, 53-bit uniforms, Box-Muller.
// The engine output is fixed by the standard but the library distributions are not, so the
// transform is spelled out to keep the stream identical on every platform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);
  double normal();
  Complex complex_normal();  // E|z|^2 = 1
  ComplexMatrix matrix(Index rows, Index cols, double scale = 1.0);

 private:
  double uniform();  // (0, 1]
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

inline constexpr int kGenerationRetries = 64;
inline constexpr double kGenericMargin = 1e-3;

struct CaseSpec {
  JordanStructure structure{0.0, {1}};
  std::uint64_t seed = 0;
  double scale = 1.0;
  bool ensure_generic = true;
  bool ensure_distinct_gammas = false;
  double generic_margin = kGenericMargin;  // relative sigma_min required of every W_i
};

// Throws GenerationExhausted when no draw satisfies the requested conditions.
CanonicalPair generate(const CaseSpec& spec);

struct KnownCase {
  std::string name;
  ComplexMatrix a, d;
  JordanStructure structure{0.0, {1}};
  ComplexMatrix d11;  // canonical perturbation block
  int rho = 1;
  std::vector<Complex> gammas;                 // expected Lambda(S_rho)
  std::map<std::string, ComplexMatrix> expected;  // h0, h1, ... when known
  std::string eigenvalue_formula;
};

// "example1", "rho1-diagonal" or "two-block-mixed"; throws UnknownCase otherwise.
KnownCase known_case(const std::string& name);
std::vector<std::string> known_case_names();

}  // namespace jordanperturb
