#pragma once

#include "jordanperturb/structure.hpp"

namespace jordanperturb {

struct SpectralTransformation {
  ComplexMatrix xi;     // n x m
  ComplexMatrix xi_c;   // n x (n - m)
  ComplexMatrix a22;    // (n - m) x (n - m)
  JordanStructure structure;

  // Throws InvalidTransformation naming the violated condition.
  void validate(const ComplexMatrix& a) const;
};

struct ReducedProblem {
  CanonicalPair pair;
  ComplexMatrix d12, d21, d22;
  ComplexMatrix p1;  // (n - m) x m
  ComplexMatrix xi, xi_c;
};

inline constexpr double kSimilarityTolerance = 1e-8;
inline constexpr double kLambdaSeparation = 1e-6;

ReducedProblem reduce(const ComplexMatrix& a, const ComplexMatrix& d,
                      const SpectralTransformation& trans);

// D11 + t D12 P1
ComplexMatrix effective_d11(const ReducedProblem& red, double t);

}  // namespace jordanperturb
