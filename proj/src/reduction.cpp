#include "jordanperturb/reduction.hpp"

#include <Eigen/LU>

namespace jordanperturb {

namespace {

ComplexMatrix basis(const SpectralTransformation& tr) {
  ComplexMatrix t(tr.xi.rows(), tr.xi.cols() + tr.xi_c.cols());
  t << tr.xi, tr.xi_c;
  return t;
}

}  // namespace

void SpectralTransformation::validate(const ComplexMatrix& a) const {
  const Index m = structure.dimension();
  const Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorKind::InvalidTransformation, "a is not square");
  if (xi.rows() != n || xi.cols() != m)
    throw Error(ErrorKind::InvalidTransformation, "xi must be n x m");
  if (xi_c.rows() != n || xi_c.cols() != n - m)
    throw Error(ErrorKind::InvalidTransformation, "xi_c must be n x (n - m)");
  if (a22.rows() != n - m || a22.cols() != n - m)
    throw Error(ErrorKind::InvalidTransformation, "a22 must be (n - m) x (n - m)");
  require_finite(a, "a");
  require_finite(xi, "xi");
  require_finite(xi_c, "xi_c");
  require_finite(a22, "a22");

  const ComplexMatrix t = basis(*this);
  if (!(smallest_singular_value(t) > 1e-12 * std::max(1.0, t.norm())))
    throw Error(ErrorKind::InvalidTransformation, "[xi xi_c] is singular");

  ComplexMatrix block_diag = ComplexMatrix::Zero(n, n);
  ComplexMatrix a11 = build_nilpotent(structure);
  a11.diagonal().array() += structure.lambda0();
  block_diag.topLeftCorner(m, m) = a11;
  block_diag.bottomRightCorner(n - m, n - m) = a22;
  const double residual = (a * t - t * block_diag).norm();
  if (residual > kSimilarityTolerance * std::max(1.0, a.norm()) * std::max(1.0, t.norm()))
    throw Error(ErrorKind::InvalidTransformation,
                "a [xi xi_c] != [xi xi_c] diag(lambda0 I + N, a22)");

  if (n > m) {
    const auto lam = to_list(eig(a22).values);
    if (min_separation(lam, {structure.lambda0()}) < kLambdaSeparation)
      throw Error(ErrorKind::InvalidTransformation, "lambda0 is an eigenvalue of a22");
  }
}

ReducedProblem reduce(const ComplexMatrix& a, const ComplexMatrix& d,
                      const SpectralTransformation& trans) {
  trans.validate(a);
  if (d.rows() != a.rows() || d.cols() != a.cols())
    throw Error(ErrorKind::InvalidArgument, "d must match a");
  require_finite(d, "d");
  const Index m = trans.structure.dimension();
  const Index n = a.rows();
  const ComplexMatrix t = basis(trans);
  const ComplexMatrix td = t.partialPivLu().solve(d * t);

  ComplexMatrix a11 = build_nilpotent(trans.structure);
  a11.diagonal().array() += trans.structure.lambda0();
  ComplexMatrix d21 = td.bottomLeftCorner(n - m, m);
  ComplexMatrix p1 = solve_sylvester(trans.a22, a11, d21);
  return ReducedProblem{CanonicalPair(trans.structure, td.topLeftCorner(m, m)),
                        td.topRightCorner(m, n - m),
                        d21,
                        td.bottomRightCorner(n - m, n - m),
                        p1,
                        trans.xi,
                        trans.xi_c};
}

ComplexMatrix effective_d11(const ReducedProblem& red, double t) {
  if (red.d12.cols() == 0) return red.pair.d11();
  return red.pair.d11() + t * red.d12 * red.p1;
}

}  // namespace jordanperturb
