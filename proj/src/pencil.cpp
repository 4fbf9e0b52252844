#include "jordanperturb/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

namespace jordanperturb {

int left_exponent(int i, int l, int rho) {
  if (i <= rho) return -l;
  return -std::max(0, l - (i - rho));
}

int right_exponent(int j, int m, int rho) {
  if (j <= rho) return m - 1;
  return std::max(0, m - (j - rho) - 1);
}

ScalingPair make_scaling(const JordanStructure& st, int rho) {
  if (rho < 1 || rho > st.k()) throw Error(ErrorKind::IndexOutOfRange, "rho out of range");
  ScalingPair sp;
  sp.rho = rho;
  const Index n = st.dimension();
  sp.left_exponents.assign(static_cast<std::size_t>(n), 0);
  sp.right_exponents.assign(static_cast<std::size_t>(n), 0);
  const BlockIndex& idx = st.index();
  for (int j = 1; j <= st.k(); ++j)
    for (int m = 1; m <= j; ++m)
      for (Index e = 0; e < idx.width(j); ++e) {
        const auto pos = static_cast<std::size_t>(idx.offset(j, m) + e);
        sp.left_exponents[pos] = left_exponent(j, m, rho);
        sp.right_exponents[pos] = right_exponent(j, m, rho);
      }
  return sp;
}

namespace {

ComplexMatrix power_diagonal(const std::vector<int>& exps, double z) {
  const auto n = static_cast<Index>(exps.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) out(i, i) = std::pow(z, exps[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

ComplexMatrix ScalingPair::left(double z) const { return power_diagonal(left_exponents, z); }
ComplexMatrix ScalingPair::right(double z) const { return power_diagonal(right_exponents, z); }

ComplexMatrix ScalingPair::right_coefficient(int e) const {
  const auto n = static_cast<Index>(right_exponents.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    if (right_exponents[static_cast<std::size_t>(i)] == e) out(i, i) = 1.0;
  return out;
}

ComplexMatrix AssembledPencil::ev(double z) const {
  ComplexMatrix out = ComplexMatrix::Zero(v0.rows(), v0.cols());
  for (const auto& [e, c] : ev_coeffs) out += std::pow(z, e) * c;
  return out;
}

ComplexMatrix AssembledPencil::ev_coefficient(int e) const {
  auto it = ev_coeffs.find(e);
  if (it == ev_coeffs.end()) return ComplexMatrix::Zero(v0.rows(), v0.cols());
  return it->second;
}

AssembledPencil assemble_pencil(const CanonicalPair& pair, int rho) {
  const JordanStructure& st = pair.structure();
  AssembledPencil p;
  p.rho = rho;
  p.scaling = make_scaling(st, rho);
  const Index n = st.dimension();
  p.u0 = ComplexMatrix::Zero(n, n);
  p.eu = ComplexMatrix::Zero(n, n);
  p.v0 = build_nilpotent(st);
  p.ev_orders = Eigen::MatrixXi::Constant(n, n, -1);
  const auto& le = p.scaling.left_exponents;
  const auto& re = p.scaling.right_exponents;
  for (Index i = 0; i < n; ++i) {
    const int diag = 1 + le[static_cast<std::size_t>(i)] + re[static_cast<std::size_t>(i)];
    (diag == 0 ? p.u0 : p.eu)(i, i) = 1.0;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const int e = rho + le[static_cast<std::size_t>(i)] + re[static_cast<std::size_t>(j)];
      if (e == 0) {
        p.v0(i, j) += pair.d11()(i, j);
        continue;
      }
      p.ev_orders(i, j) = e;
      auto it = p.ev_coeffs.find(e);
      if (it == p.ev_coeffs.end()) it = p.ev_coeffs.emplace(e, ComplexMatrix::Zero(n, n)).first;
      it->second(i, j) = pair.d11()(i, j);
    }
  return p;
}

ComplexMatrix ReducedPencil::pi_l_matrix() const {
  const auto n = static_cast<Index>(pi_l.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index r = 0; r < n; ++r) out(r, pi_l[static_cast<std::size_t>(r)]) = 1.0;
  return out;
}

ComplexMatrix ReducedPencil::pi_r_matrix() const {
  const auto n = static_cast<Index>(pi_r.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index c = 0; c < n; ++c) out(pi_r[static_cast<std::size_t>(c)], c) = 1.0;
  return out;
}

ComplexMatrix ReducedPencil::transform(const ComplexMatrix& m) const {
  const auto n = static_cast<Index>(pi_l.size());
  ComplexMatrix permuted(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      permuted(r, c) = m(pi_l[static_cast<std::size_t>(r)], pi_r[static_cast<std::size_t>(c)]);
  return permuted * g;
}

ComplexMatrix ReducedPencil::lift(const ComplexMatrix& y) const {
  const ComplexMatrix gy = g * y;
  ComplexMatrix out(gy.rows(), gy.cols());
  for (Index c = 0; c < gy.rows(); ++c) out.row(pi_r[static_cast<std::size_t>(c)]) = gy.row(c);
  return out;
}

ComplexMatrix ReducedPencil::g_rows(const JordanStructure& st, int q, int j) const {
  Index r = 0;
  for (int p = rho + 1; p < q; ++p) r += st.s(p);
  return g_blocks[static_cast<std::size_t>(j - 1)].middleRows(r, st.s(q));
}

namespace {

void append_block(std::vector<Index>& order, const BlockIndex& idx, int j, int m) {
  for (Index e = 0; e < idx.width(j); ++e) order.push_back(idx.offset(j, m) + e);
}

}  // namespace

ReducedPencil reduce_pencil(const AssembledPencil& p, const CanonicalPair& pair,
                            double threshold) {
  const JordanStructure& st = pair.structure();
  const BlockIndex& idx = st.index();
  const int rho = p.rho;
  const int k = st.k();
  ReducedPencil r;
  r.rho = rho;
  r.lambda0 = st.lambda0();

  for (int j = 1; j <= rho; ++j)
    for (int m = 1; m <= j; ++m) {
      append_block(r.pi_l, idx, j, m);
      append_block(r.pi_r, idx, j, m);
    }
  for (int j = rho + 1; j <= k; ++j) {
    append_block(r.pi_l, idx, j, j);
    append_block(r.pi_r, idx, j, 1);
  }
  for (int j = rho + 1; j <= k; ++j)
    for (int m = 1; m <= j; ++m) {
      if (m != j) append_block(r.pi_l, idx, j, m);
      if (m != 1) append_block(r.pi_r, idx, j, m);
    }
  for (int j = 1; j < rho; ++j) r.n1 += idx.group_width(j);
  r.n2 = idx.group_width(rho);
  r.n3 = st.dimension() - r.n1 - r.n2;

  r.w_rho = w_matrix(pair, rho);
  r.w_cross = w_cross(pair, rho);
  const Index hs = st.hat_s(rho + 1);
  if (rho < k) {
    r.w_rho_next = w_matrix(pair, rho + 1);
    if (!(smallest_singular_value(r.w_rho_next) > threshold * pair.d11().norm()))
      throw Error(ErrorKind::SingularW, "W_" + std::to_string(rho + 1) + " is singular");
  } else {
    r.w_rho_next = ComplexMatrix(0, 0);
  }
  Eigen::PartialPivLU<ComplexMatrix> w_lu;
  if (hs > 0) w_lu.compute(r.w_rho_next);

  for (int j = 1; j <= rho; ++j) {
    ComplexMatrix z(hs, st.s(j));
    Index row = 0;
    for (int i = rho + 1; i <= k; ++i) {
      z.middleRows(row, st.s(i)) = pair.block(i, j, i, 1);
      row += st.s(i);
    }
    ComplexMatrix gj = hs > 0 ? ComplexMatrix(-w_lu.solve(z)) : ComplexMatrix(0, st.s(j));
    r.s_blocks.push_back(pair.block(rho, j, rho, 1) + r.w_cross * gj);
    r.g_blocks.push_back(std::move(gj));
  }
  r.s_rho = r.s_blocks.back();

  // Position of canonical column (j, m) inside the permuted column order.
  const Index n = st.dimension();
  std::vector<Index> where(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c) where[static_cast<std::size_t>(r.pi_r[static_cast<std::size_t>(c)])] = c;
  r.g = ComplexMatrix::Identity(n, n);
  for (int j = 1; j <= rho; ++j) {
    if (st.s(j) == 0) continue;
    const Index col = where[static_cast<std::size_t>(idx.offset(j, 1))];
    for (int q = rho + 1; q <= k; ++q) {
      if (st.s(q) == 0) continue;
      const Index row = where[static_cast<std::size_t>(idx.offset(q, 1))];
      r.g.block(row, col, st.s(q), st.s(j)) = r.g_rows(st, q, j);
    }
  }

  r.u_hat = r.transform(p.u0);
  r.v_hat = r.transform(p.v0);
  r.theta = r.v_hat.block(r.n1, r.n1, r.n2, r.n2);
  return r;
}

ComplexMatrix block_companion(const ComplexMatrix& s, int rho) {
  const Index w = s.rows();
  ComplexMatrix out = ComplexMatrix::Zero(rho * w, rho * w);
  for (int b = 0; b + 1 < rho; ++b) out.block(b * w, (b + 1) * w, w, w).setIdentity();
  out.block((rho - 1) * w, 0, w, w) += s;
  return out;
}

Complex rho_root(Complex gamma, int rho, int branch) {
  if (rho < 1) throw Error(ErrorKind::InvalidArgument, "root order must be positive");
  const double r = std::pow(std::abs(gamma), 1.0 / rho);
  const double arg = (std::arg(gamma) + 2.0 * std::numbers::pi * branch) / rho;
  return std::polar(r, arg);
}

std::vector<Complex> rho_roots(Complex gamma, int rho) {
  std::vector<Complex> out;
  for (int j = 0; j < rho; ++j) out.push_back(rho_root(gamma, rho, j));
  return out;
}

bool argument_less(Complex a, Complex b) {
  auto arg = [](Complex v) {
    const double x = std::arg(v);
    return x == -std::numbers::pi ? std::numbers::pi : x;
  };
  if (arg(a) != arg(b)) return arg(a) < arg(b);
  return std::abs(a) < std::abs(b);
}

void sort_by_argument(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), argument_less);
}

std::vector<Complex> theta_spectrum(const ReducedPencil& r) {
  std::vector<Complex> out;
  if (r.s_rho.rows() == 0) return out;
  for (const Complex& gamma : to_list(eig(r.s_rho).values))
    for (const Complex& mu : rho_roots(gamma, r.rho)) out.push_back(mu);
  sort_by_argument(out);
  return out;
}

std::vector<Complex> finite_pencil_eigs(const CanonicalPair& pair, int rho, double threshold) {
  const JordanStructure& st = pair.structure();
  if (rho < 1 || rho > st.k()) throw Error(ErrorKind::IndexOutOfRange, "rho out of range");
  const Index s = st.s(rho);
  if (s == 0) return {};
  if (rho < st.k() &&
      !(smallest_singular_value(w_matrix(pair, rho + 1)) > threshold * pair.d11().norm()))
    throw Error(ErrorKind::SingularW, "W_" + std::to_string(rho + 1) + " is singular");
  const ComplexMatrix w = w_matrix(pair, rho);
  const Index n = w.rows();
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e.topLeftCorner(s, s).setIdentity();

  // Shift-and-invert: finite gamma of (E, W) are sigma + 1/nu for the s largest |nu| of
  // (W - sigma E)^{-1} E.
  const double scale = std::max(1.0, w.norm());
  const Complex shifts[] = {{0.3711, 0.6143}, {-0.5821, 0.2279}, {0.1337, -0.8812}};
  for (const Complex& base : shifts) {
    const Complex sigma = base * scale;
    const ComplexMatrix shifted = w - sigma * e;
    if (!(smallest_singular_value(shifted) > 1e-8 * scale)) continue;
    const ComplexMatrix kmat = shifted.partialPivLu().solve(e);
    std::vector<Complex> nu = to_list(eig(kmat).values);
    std::sort(nu.begin(), nu.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    std::vector<Complex> out;
    for (Index i = 0; i < s; ++i) out.push_back(sigma + 1.0 / nu[static_cast<std::size_t>(i)]);
    sort_by_argument(out);
    return out;
  }
  throw Error(ErrorKind::NonConvergence, "no admissible shift for the pencil");
}

}  // namespace jordanperturb
