#pragma once

#include <map>
#include <vector>

#include "jordanperturb/structure.hpp"

namespace jordanperturb {

// Exponents of z in the diagonal scalings L and R for block (i, l) / (j, m).
int left_exponent(int i, int l, int rho);
int right_exponent(int j, int m, int rho);

struct ScalingPair {
  int rho = 1;
  std::vector<int> left_exponents;
  std::vector<int> right_exponents;

  ComplexMatrix left(double z) const;
  ComplexMatrix right(double z) const;
  // coefficient matrices of R(z) = sum_e z^e R_e
  ComplexMatrix right_coefficient(int e) const;
};

ScalingPair make_scaling(const JordanStructure& structure, int rho);

struct AssembledPencil {
  int rho = 1;
  ScalingPair scaling;
  ComplexMatrix u0;
  ComplexMatrix eu;
  ComplexMatrix v0;
  Eigen::MatrixXi ev_orders;  // structural exponent of each E_V entry, -1 where V carries it
  std::map<int, ComplexMatrix> ev_coeffs;

  ComplexMatrix u(double z) const { return u0 + z * eu; }
  ComplexMatrix ev(double z) const;
  ComplexMatrix v(double z) const { return v0 + ev(z); }
  ComplexMatrix ev_coefficient(int e) const;
};

AssembledPencil assemble_pencil(const CanonicalPair& pair, int rho);

struct ReducedPencil {
  int rho = 1;
  Complex lambda0;
  ComplexMatrix theta;
  ComplexMatrix s_rho;
  std::vector<ComplexMatrix> s_blocks;  // S_1 .. S_rho
  std::vector<ComplexMatrix> g_blocks;  // G_1 .. G_rho, each hat_s(rho+1) x s_j
  ComplexMatrix w_rho, w_rho_next, w_cross;
  std::vector<Index> pi_l;  // row r of Pi_L M is row pi_l[r] of M
  std::vector<Index> pi_r;  // column c of M Pi_R is column pi_r[c] of M
  ComplexMatrix g;          // elimination matrix in permuted column order
  ComplexMatrix u_hat, v_hat;
  Index n1 = 0, n2 = 0, n3 = 0;  // groups < rho, group rho, the rest

  ComplexMatrix pi_l_matrix() const;
  ComplexMatrix pi_r_matrix() const;
  // Pi_L m Pi_R G
  ComplexMatrix transform(const ComplexMatrix& m) const;
  // Pi_R G y, mapping reduced column coordinates back to canonical ones
  ComplexMatrix lift(const ComplexMatrix& y) const;
  // rows of group q > rho inside G_j
  ComplexMatrix g_rows(const JordanStructure& st, int q, int j) const;
};

ReducedPencil reduce_pencil(const AssembledPencil& p, const CanonicalPair& pair,
                            double threshold = kDefaultGenericThreshold);

// Block companion with identity superdiagonal blocks and s in the bottom-left.
ComplexMatrix block_companion(const ComplexMatrix& s, int rho);

// All rho-th roots of gamma: principal root times exp(2 pi i j / rho), j = 0..rho-1.
std::vector<Complex> rho_roots(Complex gamma, int rho);
Complex rho_root(Complex gamma, int rho, int branch);
// Order by argument in (-pi, pi], then by modulus.
bool argument_less(Complex a, Complex b);
void sort_by_argument(std::vector<Complex>& values);

std::vector<Complex> theta_spectrum(const ReducedPencil& r);
std::vector<Complex> finite_pencil_eigs(const CanonicalPair& pair, int rho,
                                        double threshold = kDefaultGenericThreshold);

}  // namespace jordanperturb
