#pragma once

#include <optional>
#include <vector>

#include "jordanperturb/expansion.hpp"
#include "jordanperturb/reduction.hpp"

namespace jordanperturb {

struct ComplementPair {
  ComplexMatrix q2;
  ComplexMatrix omega_c;
  ComplexMatrix q1t, q2t;
  ComplexMatrix m, m_c;
  ComplexMatrix phi_c;    // rho s_rho x (rho s_rho - r)
  ComplexMatrix psi_rho;  // r x rho s_rho
  ComplexMatrix psi_c;
};

ComplementPair complement_pair(const ReducedPencil& r, const SubspaceSelection& sel);

struct HatBTerms {
  ComplexMatrix rho_rho_lower;              // B^^{(rho rho)}_{rho-1,1}; empty when rho = 1
  ComplexMatrix rho_rho_second;             // B^^{(rho rho)}_{rho 2}; the single block when rho = 1
  std::vector<ComplexMatrix> group_lower;   // B^^{(j rho)}_{j-1,1}, j = rho+1..k
  ComplexMatrix previous_group;             // B^^{(rho-1,rho)}_{rho-1,1}
};

struct FirstOrderExpansion {
  ComplexMatrix h0;  // canonical, or xi h0 when xi is given
  ComplexMatrix h1;
  ComplexMatrix omega;
  ComplexMatrix delta11, delta12, delta21, delta22;
  ComplexMatrix delta;  // z-coefficient of Theta^ in reduced coordinates
  ComplexMatrix y;
  ComplexMatrix c_tilde, c_hat, c;
  HatBTerms hatb;
  ComplexMatrix f1;  // z-coefficient of Pi_R G [X1; I; X2], canonical rows
};

FirstOrderExpansion first_order_expansion(const ReducedPencil& r, const SubspaceSelection& sel,
                                          const ComplementPair& comp, const CanonicalPair& pair,
                                          const std::optional<ComplexMatrix>& xi = std::nullopt);

struct SemisimpleExpansion {
  FirstOrderExpansion expansion;
  SubspaceSelection selection;
  ComplementPair complement;
  Complex mu;
  ComplexMatrix delta11_closed_form;  // rho >= 2 display; equals expansion.delta11
};

SemisimpleExpansion semisimple_expansion(const ReducedPencil& r, Complex gamma, int root_index,
                                         const CanonicalPair& pair);

// H0 and H1 of a general problem: Xi h0c, Xi h1c (+ Xi_c P1 h0c when rho = 1).
struct GeneralSubspace {
  ComplexMatrix h0, h1;
};
GeneralSubspace lift_to_general(const ReducedProblem& red, const ComplexMatrix& h0c,
                                const ComplexMatrix& h1c, int rho);

struct RiccatiSolution {
  double z = 0.0;
  ComplexMatrix x1, x2;
  ComplexMatrix theta_hat;
  ComplexMatrix x_tilde;  // R Pi_R G [X1; I; X2], canonical rows
  int iterations = 0;
  double residual = 0.0;
};

RiccatiSolution solve_riccati(const AssembledPencil& p, const ReducedPencil& r, double z,
                              double tol = -1.0, int max_iter = 200);

// Basis of the invariant subspace of theta_hat near Lambda(Omega), normalized so that
// psi_rho * basis = I.
ComplexMatrix perturbed_subspace(const ComplexMatrix& theta_hat, const ComplexMatrix& omega,
                                 const ComplexMatrix& psi_rho);

}  // namespace jordanperturb
