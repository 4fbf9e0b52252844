#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/LU>

namespace jptest {

ComplexMatrix kron_sylvester(const ComplexMatrix& a, const ComplexMatrix& b,
                             const ComplexMatrix& c) {
  const Index n = a.rows();
  const Index p = b.rows();
  ComplexMatrix op = ComplexMatrix::Zero(n * p, n * p);
  for (Index j = 0; j < p; ++j) {
    op.block(j * n, j * n, n, n) += a;
    for (Index i = 0; i < p; ++i) op.block(j * n, i * n, n, n).diagonal().array() -= b(i, j);
  }
  Eigen::VectorXcd rhs(n * p);
  for (Index j = 0; j < p; ++j) rhs.segment(j * n, n) = -c.col(j);
  const Eigen::VectorXcd x = op.fullPivLu().solve(rhs);
  ComplexMatrix out(n, p);
  for (Index j = 0; j < p; ++j) out.col(j) = x.segment(j * n, n);
  return out;
}

ComplexMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = dist(gen);
      m(i, j) = Complex(re, dist(gen));
    }
  return m;
}

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

jordanperturb::CanonicalPair random_pair(const std::vector<Index>& sizes, std::uint64_t seed,
                                         Complex lambda0) {
  jordanperturb::JordanStructure st(lambda0, sizes);
  return jordanperturb::CanonicalPair(st, random_matrix(st.dimension(), st.dimension(), seed));
}

}  // namespace jptest
