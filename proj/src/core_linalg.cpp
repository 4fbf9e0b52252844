#include "jordanperturb/core_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace jordanperturb {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ClusterSplitFailure: return "ClusterSplitFailure";
    case ErrorKind::SpectraOverlap: return "SpectraOverlap";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidTransformation: return "InvalidTransformation";
    case ErrorKind::SingularW: return "SingularW";
    case ErrorKind::ClusterNotSeparated: return "ClusterNotSeparated";
    case ErrorKind::MatrixRootFailure: return "MatrixRootFailure";
    case ErrorKind::NotSimple: return "NotSimple";
    case ErrorKind::NotSemisimple: return "NotSemisimple";
    case ErrorKind::SingularNormalizer: return "SingularNormalizer";
    case ErrorKind::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::UnknownCase: return "UnknownCase";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
}

namespace {

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be square");
}

ComplexMatrix schur_of(const ComplexMatrix& m, ComplexMatrix& q) {
  Eigen::ComplexSchur<ComplexMatrix> schur(m.rows());
  schur.compute(m, true);
  if (schur.info() != Eigen::Success)
    throw Error(ErrorKind::NonConvergence, "complex Schur iteration did not converge");
  q = schur.matrixU();
  return schur.matrixT();
}

// Swaps the adjacent diagonal entries k, k+1 of the triangular t.
void swap_adjacent(ComplexMatrix& t, ComplexMatrix& q, Index k) {
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  const Complex f = t(k, k + 1);
  const Complex g = t22 - t11;
  const double nf = std::abs(f);
  const double ng = std::abs(g);
  const double norm = std::hypot(nf, ng);
  if (norm == 0.0) return;
  double c;
  Complex s;
  if (nf == 0.0) {
    c = 0.0;
    s = std::conj(g) / ng;
  } else {
    c = nf / norm;
    s = (f / nf) * std::conj(g) / norm;
  }
  Eigen::Matrix2cd rot;
  rot << c, s, -std::conj(s), c;
  t.middleRows(k, 2) = (rot * t.middleRows(k, 2)).eval();
  t.middleCols(k, 2) = (t.middleCols(k, 2) * rot.adjoint()).eval();
  q.middleCols(k, 2) = (q.middleCols(k, 2) * rot.adjoint()).eval();
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  t(k + 1, k) = 0.0;
}

}  // namespace

EigenDecomposition eig(const ComplexMatrix& m) {
  require_square(m, "eig input");
  if (m.rows() == 0) throw Error(ErrorKind::InvalidArgument, "eig input is empty");
  require_finite(m, "eig input");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NonConvergence, "eigenvalue iteration did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double schur_split_tolerance(const ComplexMatrix& m) {
  return 1e-12 * std::max(1.0, m.norm());
}

SchurForm ordered_schur(const ComplexMatrix& m, const std::function<bool(Complex)>& select) {
  require_square(m, "ordered_schur input");
  require_finite(m, "ordered_schur input");
  SchurForm out;
  const Index n = m.rows();
  if (n == 0) {
    out.q = ComplexMatrix(0, 0);
    out.t = ComplexMatrix(0, 0);
    return out;
  }
  out.t = schur_of(m, out.q);
  std::vector<bool> flag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) flag[static_cast<std::size_t>(i)] = select(out.t(i, i));

  std::vector<Complex> chosen, rest;
  for (Index i = 0; i < n; ++i)
    (flag[static_cast<std::size_t>(i)] ? chosen : rest).push_back(out.t(i, i));
  if (min_separation(chosen, rest) < schur_split_tolerance(m))
    throw Error(ErrorKind::ClusterSplitFailure,
                "selected and unselected eigenvalues are too close to separate");

  Index placed = 0;
  for (Index i = 0; i < n; ++i) {
    if (!flag[static_cast<std::size_t>(i)]) continue;
    for (Index k = i - 1; k >= placed; --k) {
      swap_adjacent(out.t, out.q, k);
      std::swap(flag[static_cast<std::size_t>(k)], flag[static_cast<std::size_t>(k + 1)]);
    }
    ++placed;
  }
  out.selected = placed;
  return out;
}

ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c) {
  require_square(a, "sylvester a");
  require_square(b, "sylvester b");
  if (c.rows() != a.rows() || c.cols() != b.rows())
    throw Error(ErrorKind::InvalidArgument, "sylvester c has incompatible shape");
  const Index n = a.rows();
  const Index p = b.rows();
  if (n == 0 || p == 0) return ComplexMatrix::Zero(n, p);

  ComplexMatrix qa, qb;
  const ComplexMatrix ta = schur_of(a, qa);
  const ComplexMatrix tb = schur_of(b, qb);
  std::vector<Complex> la(static_cast<std::size_t>(n)), lb(static_cast<std::size_t>(p));
  for (Index i = 0; i < n; ++i) la[static_cast<std::size_t>(i)] = ta(i, i);
  for (Index i = 0; i < p; ++i) lb[static_cast<std::size_t>(i)] = tb(i, i);
  if (min_separation(la, lb) < 1e-12 * std::max(1.0, a.norm() + b.norm()))
    throw Error(ErrorKind::SpectraOverlap, "Sylvester operands share an eigenvalue");

  // ta z - z tb = rhs with z = qa^* x qb.
  const ComplexMatrix rhs = -(qa.adjoint() * c * qb);
  ComplexMatrix z(n, p);
  for (Index j = 0; j < p; ++j) {
    ComplexVector col = rhs.col(j);
    for (Index i = 0; i < j; ++i) col += z.col(i) * tb(i, j);
    ComplexMatrix shifted = ta;
    shifted.diagonal().array() -= tb(j, j);
    z.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
  }
  return qa * z * qb.adjoint();
}

double smallest_singular_value(const ComplexMatrix& m) {
  if (m.size() == 0) throw Error(ErrorKind::InvalidArgument, "singular value of an empty matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

double min_separation(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& u : x)
    for (const Complex& v : y) best = std::min(best, std::abs(u - v));
  return best;
}

std::vector<Complex> to_list(const ComplexVector& v) {
  return std::vector<Complex>(v.data(), v.data() + v.size());
}

}  // namespace jordanperturb
