#include <gtest/gtest.h>

#include <cmath>

#include "jordanperturb/core_linalg.hpp"
#include "support/oracles.hpp"

using namespace jordanperturb;

namespace {

ComplexMatrix cyclic_shift(double t) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 1) = m(1, 2) = m(2, 3) = 1.0;
  m(3, 0) = t;
  return m;
}

}  // namespace

TEST(Eig, IdentityAndDiagonal) {
  auto id = eig(ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(std::abs(id.values(0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(id.values(1) - 1.0), 0.0, 1e-15);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(0, 3);
  auto r = eig(d);
  EXPECT_LT(jptest::multiset_distance(to_list(r.values), {2.0, Complex(0, 3)}), 1e-14);
}

TEST(Eig, CyclicShiftHasScaledRootsOfUnity) {
  auto r = eig(cyclic_shift(1e-4));
  std::vector<Complex> expected{0.1, Complex(0, 0.1), -0.1, Complex(0, -0.1)};
  EXPECT_LT(jptest::multiset_distance(to_list(r.values), expected), 1e-13);
}

TEST(Eig, ResidualBound) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ComplexMatrix m = jptest::random_matrix(7, 7, seed);
    auto r = eig(m);
    const double res = (m * r.vectors - r.vectors * r.values.asDiagonal()).norm() / m.norm();
    EXPECT_LE(res, 100.0 * 7 * kEps);
  }
}

TEST(Eig, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(eig(m), Error);
}

TEST(OrderedSchur, SelectAll) {
  const ComplexMatrix m = jptest::random_matrix(5, 5, 11);
  auto s = ordered_schur(m, [](Complex) { return true; });
  EXPECT_EQ(s.selected, 5);
  EXPECT_LT((s.q * s.q.adjoint() - ComplexMatrix::Identity(5, 5)).norm(), 50 * kEps);
}

TEST(OrderedSchur, DiagonalSelection) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 5.0;
  auto s = ordered_schur(m, [](Complex l) { return std::abs(l - 5.0) < 1.0; });
  EXPECT_EQ(s.selected, 1);
  EXPECT_NEAR(std::abs(s.t(0, 0) - 5.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.q(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.q(0, 0)), 0.0, 1e-14);
}

TEST(OrderedSchur, CompanionSelectsRealRoot) {
  auto s = ordered_schur(cyclic_shift(1.0), [](Complex l) { return l.real() > 0.5; });
  EXPECT_EQ(s.selected, 1);
  EXPECT_NEAR(std::abs(s.t(0, 0) - 1.0), 0.0, 1e-13);
}

TEST(OrderedSchur, ReorderingProperties) {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const ComplexMatrix m = jptest::random_matrix(6, 6, seed);
    auto s = ordered_schur(m, [](Complex l) { return l.real() > 0.0; });
    const Index n = m.rows();
    EXPECT_LT((s.q.adjoint() * s.q - ComplexMatrix::Identity(n, n)).norm(), 10 * n * kEps);
    EXPECT_LT((m * s.q - s.q * s.t).norm() / m.norm(), 1e-13);
    for (Index i = 0; i < n; ++i) {
      EXPECT_EQ(s.t(i, i).real() > 0.0, i < s.selected);
      for (Index j = 0; j < i; ++j) EXPECT_EQ(s.t(i, j), Complex(0.0));
    }
    std::vector<Complex> diag;
    for (Index i = 0; i < n; ++i) diag.push_back(s.t(i, i));
    EXPECT_LT(jptest::multiset_distance(diag, to_list(eig(m).values)), 1e-12);
  }
}

TEST(OrderedSchur, RefusesToSplitAMultipleEigenvalue) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = 1.0;
  bool first = true;
  EXPECT_THROW(ordered_schur(m,
                             [&](Complex) {
                               bool r = first;
                               first = false;
                               return r;
                             }),
               Error);
}

TEST(Sylvester, ScalarCases) {
  ComplexMatrix a(1, 1), b(1, 1), c(1, 1);
  a << 2.0;
  b << 1.0;
  c << -1.0;
  EXPECT_NEAR(std::abs(solve_sylvester(a, b, c)(0, 0) - 1.0), 0.0, 1e-15);
  c << 0.0;
  EXPECT_EQ(solve_sylvester(a, b, c)(0, 0), Complex(0.0));
}

TEST(Sylvester, DiagonalColumn) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 4.0;
  ComplexMatrix b(1, 1);
  b << 1.0;
  ComplexMatrix c(2, 1);
  c << -1.0, -1.0;
  const ComplexMatrix x = solve_sylvester(a, b, c);
  EXPECT_NEAR(std::abs(x(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x(1, 0) - 1.0 / 3.0), 0.0, 1e-15);
}

TEST(Sylvester, MatchesKroneckerOracle) {
  for (Index n = 1; n <= 6; ++n)
    for (Index p = 1; p <= 6; ++p) {
      const std::uint64_t seed = static_cast<std::uint64_t>(100 + 10 * n + p);
      ComplexMatrix a = jptest::random_matrix(n, n, seed);
      a.diagonal().array() += 4.0;
      const ComplexMatrix b = jptest::random_matrix(p, p, seed + 1000);
      const ComplexMatrix c = jptest::random_matrix(n, p, seed + 2000);
      const ComplexMatrix x = solve_sylvester(a, b, c);
      const ComplexMatrix ref = jptest::kron_sylvester(a, b, c);
      EXPECT_LE((x - ref).norm(), 1e-10 * ref.norm()) << n << "x" << p;
      const double res = (a * x - x * b + c).norm();
      EXPECT_LE(res, 100.0 * (n + p) * kEps * ((a.norm() + b.norm()) * x.norm() + c.norm()));
    }
}

TEST(Sylvester, OverlapIsRejected) {
  const ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix b = ComplexMatrix::Identity(1, 1);
  EXPECT_THROW(solve_sylvester(a, b, ComplexMatrix::Ones(2, 1)), Error);
}

TEST(Sylvester, EmptyOperands) {
  const ComplexMatrix x = solve_sylvester(ComplexMatrix(0, 0), ComplexMatrix::Identity(2, 2),
                                          ComplexMatrix(0, 2));
  EXPECT_EQ(x.rows(), 0);
  EXPECT_EQ(x.cols(), 2);
}

TEST(SmallestSingularValue, Basics) {
  EXPECT_NEAR(smallest_singular_value(ComplexMatrix::Identity(3, 3)), 1.0, 1e-15);
  EXPECT_EQ(smallest_singular_value(ComplexMatrix::Zero(3, 3)), 0.0);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-6;
  EXPECT_NEAR(smallest_singular_value(m), 1e-6, 1e-21);
  EXPECT_THROW(smallest_singular_value(ComplexMatrix(0, 0)), Error);
}
