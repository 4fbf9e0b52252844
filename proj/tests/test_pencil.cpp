#include <gtest/gtest.h>

#include <cmath>

#include "jordanperturb/pencil.hpp"
#include "support/oracles.hpp"

using namespace jordanperturb;

namespace {

CanonicalPair example1_pair() {
  JordanStructure st(0.0, {0, 0, 0, 1});
  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d(3, 0) = 1.0;
  return CanonicalPair(st, d);
}

const std::vector<std::vector<Index>> kSizes{{1, 1}, {0, 2}, {2, 1}, {1, 0, 1}, {1, 2},
                                             {2, 1, 1}, {1, 1, 0, 1}};

}  // namespace

TEST(Scaling, ExponentTable) {
  // i <= rho
  EXPECT_EQ(left_exponent(2, 1, 3), -1);
  EXPECT_EQ(left_exponent(2, 2, 3), -2);
  EXPECT_EQ(right_exponent(2, 2, 3), 1);
  // i > rho: (0,...,0,-1,...,-rho) and (0,...,0,0,1,...,rho-1)
  const int rho = 2, i = 5;
  std::vector<int> l, r;
  for (int m = 1; m <= i; ++m) {
    l.push_back(left_exponent(i, m, rho));
    r.push_back(right_exponent(i, m, rho));
  }
  EXPECT_EQ(l, (std::vector<int>{0, 0, 0, -1, -2}));
  EXPECT_EQ(r, (std::vector<int>{0, 0, 0, 0, 1}));
}

TEST(AssemblePencil, ExampleOne) {
  const CanonicalPair pair = example1_pair();
  const AssembledPencil p = assemble_pencil(pair, 4);
  EXPECT_EQ(p.u0, ComplexMatrix::Identity(4, 4));
  EXPECT_EQ(p.eu.norm(), 0.0);
  ComplexMatrix v = build_nilpotent(pair.structure());
  v(3, 0) = 1.0;
  EXPECT_EQ(p.v0, v);
  EXPECT_EQ(p.ev(0.1).norm(), 0.0);
}

TEST(AssemblePencil, ZeroPerturbation) {
  JordanStructure st(0.0, {1, 2});
  const CanonicalPair pair(st, ComplexMatrix::Zero(5, 5));
  for (int rho : {1, 2}) {
    const AssembledPencil p = assemble_pencil(pair, rho);
    EXPECT_EQ(p.ev(0.3).norm(), 0.0);
    EXPECT_EQ(p.v0, build_nilpotent(st));
  }
}

TEST(AssemblePencil, SmallCaseSplit) {
  const CanonicalPair pair = jptest::random_pair({1, 1}, 3);
  const AssembledPencil p = assemble_pencil(pair, 1);
  EXPECT_EQ(p.u0.diagonal().real(), Eigen::Vector3d(1, 0, 1));
  EXPECT_EQ(p.eu.diagonal().real(), Eigen::Vector3d(0, 1, 0));
}

TEST(AssemblePencil, DefiningIdentityAndOrders) {
  std::uint64_t seed = 200;
  for (const auto& sizes : kSizes) {
    const CanonicalPair pair = jptest::random_pair(sizes, seed++);
    const JordanStructure& st = pair.structure();
    const ComplexMatrix n = build_nilpotent(st);
    for (int rho : st.valid_rhos()) {
      const AssembledPencil p = assemble_pencil(pair, rho);
      EXPECT_EQ((p.u0 + p.eu), ComplexMatrix::Identity(n.rows(), n.cols()));
      for (Index i = 0; i < n.rows(); ++i)
        for (Index j = 0; j < n.cols(); ++j) EXPECT_NE(p.ev_orders(i, j), 0);
      for (const auto& [e, c] : p.ev_coeffs) EXPECT_GE(e, 1);
      for (double z : {1e-1, 1e-2}) {
        const Complex mu(0.3, -1.1);
        const ComplexMatrix lhs = p.scaling.left(z) *
                                  (z * mu * ComplexMatrix::Identity(n.rows(), n.cols()) -
                                   (n + std::pow(z, rho) * pair.d11())) *
                                  p.scaling.right(z);
        const ComplexMatrix rhs = mu * p.u(z) - p.v(z);
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * lhs.norm());
      }
    }
  }
}

TEST(ReducePencil, ExampleOne) {
  const CanonicalPair pair = example1_pair();
  const ReducedPencil r = reduce_pencil(assemble_pencil(pair, 4), pair);
  ComplexMatrix theta = build_nilpotent(pair.structure());
  theta(3, 0) = 1.0;
  EXPECT_EQ(r.theta, theta);
  EXPECT_EQ(r.s_rho, ComplexMatrix::Ones(1, 1));
  EXPECT_EQ(r.g_blocks.back().rows(), 0);
  const auto spec = theta_spectrum(r);
  EXPECT_LT(jptest::multiset_distance(spec, {1.0, Complex(0, 1), -1.0, Complex(0, -1)}), 1e-15);
  EXPECT_LT(jptest::multiset_distance(finite_pencil_eigs(pair, 4), {1.0}), 1e-14);
}

TEST(ReducePencil, DegenerateEliminationAtTopRho) {
  const CanonicalPair pair = jptest::random_pair({1, 1}, 8);
  const ReducedPencil r = reduce_pencil(assemble_pencil(pair, 2), pair);
  EXPECT_EQ(r.s_rho, w_matrix(pair, 2));
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 1) = 1.0;
  expected(1, 0) = r.s_rho(0, 0);
  EXPECT_LT((r.theta - expected).norm(), 1e-15);
}

TEST(ReducePencil, SchurComplementForRhoOne) {
  const CanonicalPair pair = jptest::random_pair({1, 1}, 9);
  const ReducedPencil r = reduce_pencil(assemble_pencil(pair, 1), pair);
  const Complex s1 = pair.block(1, 1, 1, 1)(0, 0) -
                     pair.block(1, 2, 1, 1)(0, 0) * pair.block(2, 1, 2, 1)(0, 0) /
                         pair.block(2, 2, 2, 1)(0, 0);
  EXPECT_NEAR(std::abs(r.s_rho(0, 0) - s1), 0.0, 1e-13 * std::abs(s1));
  const auto fin = finite_pencil_eigs(pair, 1);
  ASSERT_EQ(fin.size(), 1u);
  EXPECT_NEAR(std::abs(fin[0] - s1), 0.0, 1e-12 * std::abs(s1));
}

TEST(ReducePencil, SingularNextWIsRejected) {
  JordanStructure st(0.0, {1, 1});
  ComplexMatrix d = jptest::random_matrix(3, 3, 10);
  d(2, 1) = 0.0;
  const CanonicalPair pair(st, d);
  try {
    reduce_pencil(assemble_pencil(pair, 1), pair);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularW);
  }
  EXPECT_THROW(finite_pencil_eigs(pair, 1), Error);
}

TEST(ReducePencil, StructuralIdentities) {
  std::uint64_t seed = 300;
  for (const auto& sizes : kSizes) {
    const CanonicalPair pair = jptest::random_pair(sizes, seed++);
    const JordanStructure& st = pair.structure();
    const Index n = st.dimension();
    const ComplexMatrix nil = build_nilpotent(st);
    for (int rho : st.valid_rhos()) {
      const AssembledPencil p = assemble_pencil(pair, rho);
      const ReducedPencil r = reduce_pencil(p, pair);
      const Index n1 = r.n1, n2 = r.n2, n3 = r.n3;

      // permutations
      const ComplexMatrix pl = r.pi_l_matrix(), pr = r.pi_r_matrix();
      EXPECT_EQ(pl * pl.transpose(), ComplexMatrix::Identity(n, n));
      EXPECT_EQ(pr * pr.transpose(), ComplexMatrix::Identity(n, n));

      // pencil identity after permutation and elimination
      for (double z : {1e-1, 3e-2}) {
        const Complex mu(-0.7, 0.4);
        const ComplexMatrix lhs = pl * p.scaling.left(z) *
                                  (z * mu * ComplexMatrix::Identity(n, n) -
                                   (nil + std::pow(z, rho) * pair.d11())) *
                                  p.scaling.right(z) * pr * r.g;
        const ComplexMatrix rhs = mu * r.transform(p.u(z)) - r.transform(p.v(z));
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * lhs.norm());
      }

      // block-triangular shape
      const ComplexMatrix& v = r.v_hat;
      const double vn = v.norm();
      EXPECT_LE(v.block(0, n1, n1, n2 + n3).norm(), 1e-12 * vn);
      EXPECT_LE(v.block(n1 + n2, 0, n3, n1 + n2).norm(), 1e-12 * vn);
      EXPECT_LE((r.theta - block_companion(r.s_rho, rho)).norm(), 1e-12 * vn);
      ComplexMatrix v11 = v.topLeftCorner(n1, n1);
      ComplexMatrix pw = ComplexMatrix::Identity(n1, n1);
      for (Index i = 0; i < n1; ++i) pw = pw * v11;
      EXPECT_EQ(pw.norm(), 0.0);
      for (int j = 1; j < rho; ++j)
        if (st.s(j) > 0) {
          const Index row = n1 + (rho - 1) * st.s(rho);
          EXPECT_LE((v.block(row, st.index().group_offset(j), st.s(rho), st.s(j)) -
                     r.s_blocks[static_cast<std::size_t>(j - 1)])
                        .norm(),
                    1e-12 * vn);
        }

      // factorization of W_rho
      if (rho < st.k()) {
        const Index s = st.s(rho), hs = st.hat_s(rho + 1);
        ComplexMatrix left = ComplexMatrix::Zero(s + hs, s + hs);
        left.topLeftCorner(s, s) = r.s_rho;
        left.topRightCorner(s, hs) = r.w_cross;
        left.bottomRightCorner(hs, hs) = r.w_rho_next;
        ComplexMatrix right = ComplexMatrix::Identity(s + hs, s + hs);
        right.bottomLeftCorner(hs, s) = -r.g_blocks.back();
        EXPECT_LE((r.w_rho - left * right).norm(), 1e-12 * r.w_rho.norm());
      }

      // spectra
      const auto gammas = to_list(eig(r.s_rho).values);
      const auto fin = finite_pencil_eigs(pair, rho);
      EXPECT_LT(jptest::multiset_distance(gammas, fin), 1e-10 * std::max(1.0, r.s_rho.norm()));
      const auto spec = theta_spectrum(r);
      if (spec.size() <= 8)
        EXPECT_LT(jptest::multiset_distance(spec, to_list(eig(r.theta).values)), 1e-8);
      for (const Complex& mu : spec) {
        double best = 1e300;
        for (const Complex& g : gammas) best = std::min(best, std::abs(std::pow(mu, rho) - g));
        EXPECT_LT(best, 1e-10 * std::max(1.0, std::abs(mu)));
      }
    }
  }
}

TEST(ThetaSpectrum, SmallCases) {
  ReducedPencil r;
  r.rho = 2;
  r.s_rho = ComplexMatrix::Constant(1, 1, 4.0);
  const auto spec = theta_spectrum(r);
  EXPECT_LT(jptest::multiset_distance(spec, {2.0, -2.0}), 1e-15);
  r.rho = 3;
  r.s_rho = ComplexMatrix::Zero(1, 1);
  for (const Complex& mu : theta_spectrum(r)) EXPECT_EQ(std::abs(mu), 0.0);
  EXPECT_EQ(theta_spectrum(r).size(), 3u);
}

TEST(FinitePencilEigs, DecoupledBlock) {
  JordanStructure st(0.0, {0, 1, 1});
  ComplexMatrix d = jptest::random_matrix(5, 5, 12);
  const BlockIndex& idx = st.index();
  // W_2 = [[B22_21, B23_21],[B32_31, B33_31]]: zero the couplings
  d(idx.offset(2, 2), idx.offset(3, 1)) = 0.0;
  d(idx.offset(3, 3), idx.offset(2, 1)) = 0.0;
  const CanonicalPair pair(st, d);
  const auto fin = finite_pencil_eigs(pair, 2);
  ASSERT_EQ(fin.size(), 1u);
  EXPECT_NEAR(std::abs(fin[0] - d(idx.offset(2, 2), idx.offset(2, 1))), 0.0, 1e-12);
}
