#pragma once

#include <optional>
#include <vector>

#include "jordanperturb/core_linalg.hpp"

namespace jordanperturb {

class JordanStructure;

// Start positions of the block columns (j, m), 1 <= m <= j <= k, in canonical
// coordinates. Group j occupies j consecutive blocks of width s_j.
class BlockIndex {
 public:
  BlockIndex() = default;
  explicit BlockIndex(const std::vector<Index>& sizes);

  int k() const { return static_cast<int>(sizes_.size()); }
  Index width(int j) const;               // s_j
  Index offset(int j, int m) const;       // 1-based group j, block m
  Index group_offset(int j) const;        // offset(j, 1)
  Index group_width(int j) const;         // j * s_j
  Index dimension() const { return dimension_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> group_start_;
  Index dimension_ = 0;
};

class JordanStructure {
 public:
  JordanStructure(Complex lambda0, std::vector<Index> sizes);

  Complex lambda0() const { return lambda0_; }
  int k() const { return static_cast<int>(sizes_.size()); }
  Index s(int j) const { return index_.width(j); }
  Index hat_s(int i) const;  // sum_{j >= i} s_j
  Index dimension() const { return index_.dimension(); }
  const std::vector<Index>& sizes() const { return sizes_; }
  const BlockIndex& index() const { return index_; }
  // rho values carrying at least one block
  std::vector<int> valid_rhos() const;

 private:
  Complex lambda0_;
  std::vector<Index> sizes_;
  BlockIndex index_;
};

class CanonicalPair {
 public:
  CanonicalPair(JordanStructure structure, ComplexMatrix d11);

  const JordanStructure& structure() const { return structure_; }
  const ComplexMatrix& d11() const { return d11_; }
  const BlockIndex& index() const { return structure_.index(); }

  // B^{(ij)}_{lm}: rows of block (i, l), columns of block (j, m).
  ComplexMatrix block(int i, int j, int l, int m) const;
  // lambda0 I + N
  ComplexMatrix a() const;

 private:
  JordanStructure structure_;
  ComplexMatrix d11_;
};

struct GenericityReport {
  std::vector<std::optional<double>> sigma_min;  // entry i-1 for W_i; empty when s_i = 0
  bool generic = false;
  double threshold = 0.0;
};

inline constexpr double kDefaultGenericThreshold = 1e-8;

ComplexMatrix build_nilpotent(const JordanStructure& structure);
ComplexMatrix block(const CanonicalPair& pair, int i, int j, int l, int m);
ComplexMatrix w_matrix(const CanonicalPair& pair, int i);
// W_{rho,rho+1} = [B^{(rho,rho+1)}_{rho1} ... B^{(rho k)}_{rho1}]
ComplexMatrix w_cross(const CanonicalPair& pair, int rho);
GenericityReport check_generic(const CanonicalPair& pair,
                               double threshold = kDefaultGenericThreshold);

}  // namespace jordanperturb
