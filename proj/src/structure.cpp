#include "jordanperturb/structure.hpp"

#include <string>

namespace jordanperturb {

BlockIndex::BlockIndex(const std::vector<Index>& sizes) : sizes_(sizes) {
  group_start_.reserve(sizes_.size());
  Index pos = 0;
  for (std::size_t j = 0; j < sizes_.size(); ++j) {
    group_start_.push_back(pos);
    pos += static_cast<Index>(j + 1) * sizes_[j];
  }
  dimension_ = pos;
}

Index BlockIndex::width(int j) const {
  if (j < 1 || j > k()) throw Error(ErrorKind::IndexOutOfRange, "group " + std::to_string(j));
  return sizes_[static_cast<std::size_t>(j - 1)];
}

Index BlockIndex::offset(int j, int m) const {
  if (j < 1 || j > k() || m < 1 || m > j)
    throw Error(ErrorKind::IndexOutOfRange,
                "block (" + std::to_string(j) + "," + std::to_string(m) + ")");
  return group_start_[static_cast<std::size_t>(j - 1)] + (m - 1) * width(j);
}

Index BlockIndex::group_offset(int j) const { return offset(j, 1); }

Index BlockIndex::group_width(int j) const { return j * width(j); }

JordanStructure::JordanStructure(Complex lambda0, std::vector<Index> sizes)
    : lambda0_(lambda0), sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw Error(ErrorKind::InvalidArgument, "no Jordan block sizes given");
  for (Index s : sizes_)
    if (s < 0) throw Error(ErrorKind::InvalidArgument, "negative block count");
  if (sizes_.back() <= 0)
    throw Error(ErrorKind::InvalidArgument, "the largest block size must be present (s_k > 0)");
  if (!std::isfinite(lambda0_.real()) || !std::isfinite(lambda0_.imag()))
    throw Error(ErrorKind::InvalidArgument, "lambda0 is not finite");
  index_ = BlockIndex(sizes_);
}

Index JordanStructure::hat_s(int i) const {
  Index total = 0;
  for (int j = std::max(i, 1); j <= k(); ++j) total += s(j);
  return total;
}

std::vector<int> JordanStructure::valid_rhos() const {
  std::vector<int> out;
  for (int j = 1; j <= k(); ++j)
    if (s(j) > 0) out.push_back(j);
  return out;
}

CanonicalPair::CanonicalPair(JordanStructure structure, ComplexMatrix d11)
    : structure_(std::move(structure)), d11_(std::move(d11)) {
  const Index m = structure_.dimension();
  if (d11_.rows() != m || d11_.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "d11 must be " + std::to_string(m) + "x" +
                                                std::to_string(m));
  require_finite(d11_, "d11");
}

ComplexMatrix CanonicalPair::block(int i, int j, int l, int m) const {
  const BlockIndex& idx = index();
  if (l < 1 || l > i || m < 1 || m > j) throw Error(ErrorKind::IndexOutOfRange, "block index");
  const Index r0 = idx.offset(i, l);
  const Index c0 = idx.offset(j, m);
  return d11_.block(r0, c0, idx.width(i), idx.width(j));
}

ComplexMatrix CanonicalPair::a() const {
  ComplexMatrix out = build_nilpotent(structure_);
  out.diagonal().array() += structure_.lambda0();
  return out;
}

ComplexMatrix build_nilpotent(const JordanStructure& structure) {
  const BlockIndex& idx = structure.index();
  ComplexMatrix n = ComplexMatrix::Zero(idx.dimension(), idx.dimension());
  for (int j = 1; j <= structure.k(); ++j) {
    const Index w = idx.width(j);
    for (int m = 1; m < j; ++m)
      n.block(idx.offset(j, m), idx.offset(j, m + 1), w, w).setIdentity();
  }
  return n;
}

ComplexMatrix block(const CanonicalPair& pair, int i, int j, int l, int m) {
  return pair.block(i, j, l, m);
}

ComplexMatrix w_matrix(const CanonicalPair& pair, int i) {
  const JordanStructure& st = pair.structure();
  if (i < 1 || i > st.k()) throw Error(ErrorKind::IndexOutOfRange, "W index");
  ComplexMatrix w(st.hat_s(i), st.hat_s(i));
  Index r = 0;
  for (int p = i; p <= st.k(); ++p) {
    Index c = 0;
    for (int q = i; q <= st.k(); ++q) {
      w.block(r, c, st.s(p), st.s(q)) = pair.block(p, q, p, 1);
      c += st.s(q);
    }
    r += st.s(p);
  }
  return w;
}

ComplexMatrix w_cross(const CanonicalPair& pair, int rho) {
  const JordanStructure& st = pair.structure();
  ComplexMatrix w(st.s(rho), st.hat_s(rho + 1));
  Index c = 0;
  for (int q = rho + 1; q <= st.k(); ++q) {
    w.middleCols(c, st.s(q)) = pair.block(rho, q, rho, 1);
    c += st.s(q);
  }
  return w;
}

GenericityReport check_generic(const CanonicalPair& pair, double threshold) {
  GenericityReport report;
  report.threshold = threshold;
  const double bound = threshold * pair.d11().norm();
  bool generic = true;
  for (int i = 1; i <= pair.structure().k(); ++i) {
    if (pair.structure().s(i) == 0) {
      report.sigma_min.push_back(std::nullopt);
      continue;
    }
    const double sigma = smallest_singular_value(w_matrix(pair, i));
    report.sigma_min.push_back(sigma);
    if (!(sigma > bound)) generic = false;
  }
  report.generic = generic;
  return report;
}

}  // namespace jordanperturb
