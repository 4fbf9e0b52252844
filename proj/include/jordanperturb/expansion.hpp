#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jordanperturb/pencil.hpp"
#include "jordanperturb/rational.hpp"

namespace jordanperturb {

struct EigenvalueExpansion {
  int rho = 1;
  Complex gamma;
  std::vector<Complex> mus;  // branch order 0..rho-1
  Complex lambda0;
  bool simple = true;
  Rational order_next;  // 2/rho when simple, otherwise 1/rho (little-o claim only)
  std::size_t cluster = 0;

  Complex predict(double t, int branch) const;
};

// Eigenvalues of S_rho grouped within 1e-6 * spectral radius, ordered by argument.
struct GammaCluster {
  Complex center;
  std::vector<Complex> members;
};

std::vector<GammaCluster> gamma_clusters(const ReducedPencil& r);
double cluster_tolerance(const ReducedPencil& r);

std::vector<EigenvalueExpansion> eigenvalue_expansions(const ReducedPencil& r);

struct RootSelection {
  std::size_t cluster = 0;
  int branch = 0;
};

struct SubspaceSelection {
  int rho = 1;
  ComplexMatrix q1;
  ComplexMatrix omega;
  ComplexMatrix phi;
  std::vector<RootSelection> roots;
  std::vector<Index> block_sizes;  // columns contributed by each root selection
};

// Upper-triangular t with eigenvalues close to a single value; returns w with w^rho = t
// whose eigenvalues are the rho-th roots closest to `target`.
ComplexMatrix triangular_root(const ComplexMatrix& t, int rho, Complex target);

SubspaceSelection select_roots(const ReducedPencil& r, const std::vector<RootSelection>& roots);
// root_index holds one branch per selected cluster, or a single branch used for all.
SubspaceSelection select_subspace(const ReducedPencil& r,
                                  const std::function<bool(Complex)>& cluster,
                                  const std::vector<int>& root_index);

struct OrderEntry {
  int group = 1;
  int block = 1;
  Rational exponent;
};

// Orders in t of H - H0 by (group, block); group rho is listed after removing the leading
// term Q1 (t^{1/rho} Omega)^{l-1} from its blocks l >= 2.
std::vector<OrderEntry> h_order_table(const JordanStructure& st, int rho);
// Orders of X~_i for i != rho (the rho group is exact).
std::vector<OrderEntry> x_order_table(const JordanStructure& st, int rho);

struct SubspaceExpansion {
  ComplexMatrix h0;       // n x r
  ComplexMatrix omega;    // C = lambda0 I + t^{1/rho} Omega + ...
  Complex lambda0;
  int rho = 1;
  std::vector<OrderEntry> order_table;
  std::optional<ComplexMatrix> x_full;  // m x rho s_rho constant term of X
};

// Xi~_rho [I; G_rho] y, in canonical coordinates (m rows).
ComplexMatrix eigenspace_lift(const ReducedPencil& r, const JordanStructure& st,
                              const ComplexMatrix& y);

SubspaceExpansion subspace_expansion(const ReducedPencil& r, const SubspaceSelection& sel,
                                     const CanonicalPair& pair,
                                     const std::optional<ComplexMatrix>& xi = std::nullopt,
                                     bool with_x = false);

struct EigenvectorExpansion {
  ComplexVector constant;
  Complex mu;
  ComplexVector phi;
  std::vector<OrderEntry> order_table;
};

EigenvectorExpansion eigenvector_expansion(const ReducedPencil& r, std::size_t which,
                                           int root_index, const CanonicalPair& pair,
                                           const std::optional<ComplexVector>& phi = std::nullopt);

}  // namespace jordanperturb
