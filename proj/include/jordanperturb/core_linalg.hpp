#pragma once

#include <complex>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jordanperturb/errors.hpp"

namespace jordanperturb {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kEps = 2.220446049250313e-16;

struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;  // right eigenvectors, one per column
};

struct SchurForm {
  ComplexMatrix q;  // unitary
  ComplexMatrix t;  // upper triangular, m = q t q^*
  Index selected = 0;
};

// Throws InvalidArgument when any entry is NaN or Inf.
void require_finite(const ComplexMatrix& m, std::string_view what);

EigenDecomposition eig(const ComplexMatrix& m);

// Complex Schur form with the eigenvalues accepted by `select` moved to the
// leading diagonal positions by adjacent Givens swaps.
SchurForm ordered_schur(const ComplexMatrix& m, const std::function<bool(Complex)>& select);

// Eigenvalues of selected and unselected parts closer than this are rejected.
double schur_split_tolerance(const ComplexMatrix& m);

// Solves a X - X b + c = 0 (Bartels-Stewart).
ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c);

double smallest_singular_value(const ComplexMatrix& m);

// Distance between the closest pair drawn from the two lists (infinity if either is empty).
double min_separation(const std::vector<Complex>& x, const std::vector<Complex>& y);

std::vector<Complex> to_list(const ComplexVector& v);

}  // namespace jordanperturb
