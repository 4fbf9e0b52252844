#include "jordanperturb/first_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

namespace jordanperturb {

namespace {

// Which eigenvalues of Theta belong to Omega: nearest theoretical root is a selected one.
std::function<bool(Complex)> omega_membership(const ReducedPencil& r,
                                              const SubspaceSelection& sel) {
  const auto clusters = gamma_clusters(r);
  std::vector<std::pair<Complex, bool>> roots;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int b = 0; b < r.rho; ++b) {
      bool chosen = false;
      for (const RootSelection& rs : sel.roots) chosen = chosen || (rs.cluster == c && rs.branch == b);
      roots.emplace_back(rho_root(clusters[c].center, r.rho, b), chosen);
    }
  return [roots](Complex l) {
    double best = std::numeric_limits<double>::infinity();
    bool chosen = false;
    for (const auto& [v, c] : roots) {
      const double d = std::abs(v - l);
      if (d < best) {
        best = d;
        chosen = c;
      }
    }
    return chosen;
  };
}

// Splits the last block P of Psi into M Q~ with Q~ Q = I when P Q is invertible.
void split_normalizer(const ComplexMatrix& p, const ComplexMatrix& q, ComplexMatrix& qt,
                      ComplexMatrix& m) {
  const Index r = p.rows();
  if (r == 0) {
    qt = p;
    m = ComplexMatrix(0, 0);
    return;
  }
  const ComplexMatrix k = p * q;
  if (smallest_singular_value(k) > 1e-8 * std::max(p.norm() * q.norm(), 1e-300)) {
    qt = k.partialPivLu().solve(p);
    m = k;
  } else {
    qt = p;
    m = ComplexMatrix::Identity(r, r);
  }
}

ComplexMatrix normalizer_sum(const ComplexMatrix& omega, const ComplexMatrix& qt,
                             const ComplexMatrix& q, int rho) {
  const Index r = omega.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(r, r);
  const ComplexMatrix inner = qt * q;
  std::vector<ComplexMatrix> pw{ComplexMatrix::Identity(r, r)};
  for (int j = 1; j < rho; ++j) pw.push_back(pw.back() * omega);
  for (int j = 0; j < rho; ++j)
    sum += pw[static_cast<std::size_t>(rho - 1 - j)] * inner * pw[static_cast<std::size_t>(j)];
  return sum;
}

}  // namespace

ComplementPair complement_pair(const ReducedPencil& r, const SubspaceSelection& sel) {
  ComplementPair out;
  const Index s = r.s_rho.rows();
  const Index n = r.theta.rows();
  const Index rc = sel.phi.cols();
  const auto in_omega = omega_membership(r, sel);
  const SchurForm f = ordered_schur(r.theta, [&](Complex l) { return !in_omega(l); });
  if (f.selected != n - rc)
    throw Error(ErrorKind::ClusterNotSeparated, "complement has the wrong dimension");
  out.phi_c = f.q.leftCols(f.selected);
  out.omega_c = f.t.topLeftCorner(f.selected, f.selected);
  out.q2 = out.phi_c.topRows(s);

  ComplexMatrix full(n, n);
  full << sel.phi, out.phi_c;
  if (!(smallest_singular_value(full) > 1e-10 * full.norm()))
    throw Error(ErrorKind::ClusterNotSeparated, "[Phi Phi_c] is singular");
  const ComplexMatrix inv = full.partialPivLu().inverse();
  out.psi_rho = inv.topRows(rc);
  out.psi_c = inv.bottomRows(n - rc);

  split_normalizer(out.psi_rho.rightCols(s), sel.q1, out.q1t, out.m);
  split_normalizer(out.psi_c.rightCols(s), out.q2, out.q2t, out.m_c);
  for (const auto& [omega, qt, q] :
       {std::tuple{sel.omega, out.q1t, sel.q1}, std::tuple{out.omega_c, out.q2t, out.q2}}) {
    if (omega.rows() == 0) continue;
    if (!(smallest_singular_value(normalizer_sum(omega, qt, q, r.rho)) > 1e-12))
      throw Error(ErrorKind::SingularNormalizer, "normalizer is not invertible");
  }
  return out;
}

namespace {

struct Blocks {
  const CanonicalPair& pair;
  const JordanStructure& st;
  const ReducedPencil& r;
  int rho;
  int k;

  // B^{(ij)}_{lm}, zero when the indices fall outside the block pattern.
  ComplexMatrix b(int i, int j, int l, int m) const {
    if (i < 1 || j < 1 || i > k || j > k || l < 1 || l > i || m < 1 || m > j)
      return ComplexMatrix::Zero(i >= 1 && i <= k ? st.s(i) : 0, j >= 1 && j <= k ? st.s(j) : 0);
    return pair.block(i, j, l, m);
  }
  ComplexMatrix g(int q, int j) const { return r.g_rows(st, q, j); }
  // B^^{(j l)}_{i1} = B^{(j l)}_{i1} + sum_{q > rho} B^{(j q)}_{i1} G_{q l}
  ComplexMatrix hatb(int j, int l, int i) const {
    ComplexMatrix out = b(j, l, i, 1);
    for (int q = rho + 1; q <= k; ++q) out += b(j, q, i, 1) * g(q, l);
    return out;
  }
  Index theta_block(int b) const { return (b - 1) * st.s(rho); }
};

}  // namespace

FirstOrderExpansion first_order_expansion(const ReducedPencil& r, const SubspaceSelection& sel,
                                          const ComplementPair& comp, const CanonicalPair& pair,
                                          const std::optional<ComplexMatrix>& xi) {
  const JordanStructure& st = pair.structure();
  const BlockIndex& idx = st.index();
  const int rho = r.rho;
  const int k = st.k();
  const Blocks bl{pair, st, r, rho, k};
  const Index s = st.s(rho);
  const Index hs = st.hat_s(rho + 1);
  const Index n = st.dimension();
  const Index nt = rho * s;
  const ComplexMatrix s_inv = r.s_rho.partialPivLu().inverse();
  Eigen::PartialPivLU<ComplexMatrix> w_lu;
  if (hs > 0) w_lu.compute(r.w_rho_next);

  FirstOrderExpansion out;
  out.omega = sel.omega;
  out.f1 = ComplexMatrix::Zero(n, nt);
  out.delta = ComplexMatrix::Zero(nt, nt);
  for (int j = rho + 1; j <= k; ++j) out.hatb.group_lower.push_back(bl.hatb(j, rho, j - 1));

  // first-order rows of X2 below the W rows: xrows[(i, m)] for i > rho, m = 2..i
  auto xrow = [&](int i, int m) -> ComplexMatrix {
    ComplexMatrix row = ComplexMatrix::Zero(st.s(i), nt);
    if (rho == 1) {
      row = -bl.hatb(i, 1, m - 1);
      if (m == 2) row += bl.g(i, 1) * r.s_rho;
      return row;
    }
    if (i == rho + 1) {
      if (m <= rho)
        row.middleCols(bl.theta_block(m), s) = bl.g(i, rho);
      else
        row.leftCols(s) = bl.g(i, rho) * r.s_rho - bl.hatb(i, rho, i - 1);
    } else {
      if (m == 2) row.middleCols(bl.theta_block(2), s) = bl.g(i, rho);
      if (m == i) row.leftCols(s) = -bl.hatb(i, rho, i - 1);
    }
    return row;
  };
  // the Theta column block in which the W-row solution sits
  const Index c_col = rho == 1 ? 0 : bl.theta_block(2);

  ComplexMatrix ea;
  if (rho >= 2) {
    out.hatb.previous_group = bl.hatb(rho - 1, rho, rho - 1);
    ea = out.hatb.previous_group * s_inv;
  }

  out.c_tilde = ComplexMatrix::Zero(hs, s);
  Index row = 0;
  for (int i = rho + 1; i <= k; ++i) {
    ComplexMatrix ci;
    if (rho == 1) {
      ci = xrow(i, i) * r.s_rho;
      for (int j = 2; j <= k; ++j)
        for (int m = 2; m <= j; ++m) ci -= bl.b(i, j, i, m) * xrow(j, m);
    } else {
      ci = -(bl.hatb(i, rho, i - 1) + bl.b(i, rho, i, 2));
      for (int q = rho + 1; q <= k; ++q) ci -= bl.b(i, q, i, 2) * bl.g(q, rho);
      if (i == rho + 1) ci += bl.g(i, rho) * r.s_rho;
    }
    out.c_tilde.middleRows(row, st.s(i)) = ci;
    row += st.s(i);
  }
  out.c_hat = hs > 0 ? ComplexMatrix(w_lu.solve(out.c_tilde)) : ComplexMatrix(0, s);
  out.c = out.c_hat;
  if (rho >= 2 && st.s(rho - 1) > 0 && hs > 0) out.c += r.g_blocks[static_cast<std::size_t>(rho - 2)] * ea;

  // Delta
  if (rho == 1) {
    ComplexMatrix d = r.w_cross * out.c_hat;
    for (int j = 2; j <= k; ++j)
      for (int m = 2; m <= j; ++m) d += bl.b(1, j, 1, m) * xrow(j, m);
    out.hatb.rho_rho_second = d;
    out.delta = d;
  } else {
    out.hatb.rho_rho_lower = bl.hatb(rho, rho, rho - 1);
    ComplexMatrix second = bl.b(rho, rho, rho, 2) + r.w_cross * out.c;
    if (st.s(rho - 1) > 0) second += bl.b(rho, rho - 1, rho, 1) * ea;
    for (int q = rho + 1; q <= k; ++q) second += bl.b(rho, q, rho, 2) * bl.g(q, rho);
    out.hatb.rho_rho_second = second;
    out.delta.block(bl.theta_block(rho - 1), 0, s, s) = out.hatb.rho_rho_lower;
    out.delta.block(bl.theta_block(rho), bl.theta_block(2), s, s) = second;
  }

  // z-coefficient of F in canonical rows
  if (rho >= 2 && st.s(rho - 1) > 0)
    for (int l = 1; l <= rho - 1; ++l)
      out.f1.block(idx.offset(rho - 1, l), bl.theta_block(l + 1), st.s(rho - 1), s) = ea;
  row = 0;
  for (int i = rho + 1; i <= k; ++i) {
    if (st.s(i) > 0) {
      out.f1.block(idx.offset(i, 1), c_col, st.s(i), s) = out.c.middleRows(row, st.s(i));
      for (int m = 2; m <= i; ++m) out.f1.middleRows(idx.offset(i, m), st.s(i)) = xrow(i, m);
    }
    row += st.s(i);
  }

  // Delta blocks in the Phi basis
  const Index rc = sel.phi.cols();
  ComplexMatrix psi(nt, nt), basis(nt, nt);
  psi << comp.psi_rho, comp.psi_c;
  basis << sel.phi, comp.phi_c;
  const ComplexMatrix blocks = psi * out.delta * basis;
  out.delta11 = blocks.topLeftCorner(rc, rc);
  out.delta12 = blocks.topRightCorner(rc, nt - rc);
  out.delta21 = blocks.bottomLeftCorner(nt - rc, rc);
  out.delta22 = blocks.bottomRightCorner(nt - rc, nt - rc);
  out.y = solve_sylvester(comp.omega_c, sel.omega, out.delta21);

  // H0, H1
  const ComplexMatrix q2y = comp.q2 * out.y;
  const ComplexMatrix h0 = eigenspace_lift(r, st, sel.q1);
  ComplexMatrix h1 = ComplexMatrix::Zero(n, rc);
  const ComplexMatrix q1w = rho == 1 ? sel.q1 : ComplexMatrix(sel.q1 * sel.omega);
  h1.middleRows(idx.offset(rho, 1), s) = q2y;
  if (rho >= 2) {
    h1.middleRows(idx.offset(rho, 2), s) = q1w;
    if (st.s(rho - 1) > 0) h1.middleRows(idx.offset(rho - 1, 1), st.s(rho - 1)) = ea * q1w;
  }
  row = 0;
  for (int i = rho + 1; i <= k; ++i) {
    if (st.s(i) > 0) {
      const ComplexMatrix gi = bl.g(i, rho);
      const ComplexMatrix ci = (rho == 1 ? out.c_hat : out.c).middleRows(row, st.s(i));
      h1.middleRows(idx.offset(i, 1), st.s(i)) = ci * q1w + gi * q2y;
      if (rho >= 2) {
        h1.middleRows(idx.offset(i, 2), st.s(i)) = gi * q1w;
      } else {
        for (int m = 2; m <= i; ++m) h1.middleRows(idx.offset(i, m), st.s(i)) = xrow(i, m) * sel.q1;
      }
    }
    row += st.s(i);
  }
  out.h0 = xi ? ComplexMatrix(*xi * h0) : h0;
  out.h1 = xi ? ComplexMatrix(*xi * h1) : h1;
  return out;
}

SemisimpleExpansion semisimple_expansion(const ReducedPencil& r, Complex gamma, int root_index,
                                         const CanonicalPair& pair) {
  const auto clusters = gamma_clusters(r);
  std::size_t which = clusters.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < clusters.size(); ++c)
    if (std::abs(clusters[c].center - gamma) < best) {
      best = std::abs(clusters[c].center - gamma);
      which = c;
    }
  if (which == clusters.size() || best > 1e-6 * std::max(1.0, std::abs(gamma)))
    throw Error(ErrorKind::InvalidArgument, "gamma is not an eigenvalue of S_rho");
  const Index mult = static_cast<Index>(clusters[which].members.size());
  const Index s = r.s_rho.rows();
  ComplexMatrix shifted = r.s_rho;
  shifted.diagonal().array() -= clusters[which].center;
  Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
  const auto sv = svd.singularValues();
  Index small = 0;
  for (Index i = 0; i < s; ++i) small += sv(i) <= 1e-8 * std::max(1.0, r.s_rho.norm()) ? 1 : 0;
  if (small != mult) throw Error(ErrorKind::NotSemisimple, "eigenvalue is defective");

  SemisimpleExpansion out;
  out.mu = rho_root(clusters[which].center, r.rho, root_index);
  out.selection = select_roots(r, {{which, root_index}});
  SubspaceSelection& sel = out.selection;
  sel.omega = out.mu * ComplexMatrix::Identity(mult, mult);
  ComplexMatrix block = sel.q1;
  for (int b = 0; b < r.rho; ++b) {
    sel.phi.middleRows(b * s, s) = block;
    block = block * sel.omega;
  }
  out.complement = complement_pair(r, sel);
  out.expansion = first_order_expansion(r, sel, out.complement, pair);
  if (r.rho >= 2) {
    const FirstOrderExpansion& e = out.expansion;
    out.delta11_closed_form = out.complement.q1t *
                              (e.hatb.rho_rho_lower + e.hatb.rho_rho_second) * sel.q1 /
                              (static_cast<double>(r.rho) * std::pow(out.mu, r.rho - 2));
  } else {
    out.delta11_closed_form = out.expansion.delta11;
  }
  return out;
}

GeneralSubspace lift_to_general(const ReducedProblem& red, const ComplexMatrix& h0c,
                                const ComplexMatrix& h1c, int rho) {
  GeneralSubspace out;
  out.h0 = red.xi * h0c;
  out.h1 = red.xi * h1c;
  if (rho == 1 && red.xi_c.cols() > 0) out.h1 += red.xi_c * red.p1 * h0c;
  return out;
}

RiccatiSolution solve_riccati(const AssembledPencil& p, const ReducedPencil& r, double z,
                              double tol, int max_iter) {
  if (!(z > 0.0)) throw Error(ErrorKind::InvalidArgument, "z must be positive");
  const Index n1 = r.n1, n2 = r.n2, n3 = r.n3;
  const ComplexMatrix vz = r.transform(p.v(z));
  const ComplexMatrix euh = r.transform(p.eu);
  const ComplexMatrix& v = r.v_hat;
  const ComplexMatrix& u = r.u_hat;
  if (tol < 0.0) tol = 1e-12 * std::max(1.0, v.norm());

  auto blk = [&](const ComplexMatrix& m, int a, int b) {
    const Index ro[] = {0, n1, n1 + n2}, sz[] = {n1, n2, n3};
    return ComplexMatrix(m.block(ro[a], ro[b], sz[a], sz[b]));
  };
  const ComplexMatrix ev = vz - v;
  const ComplexMatrix v11 = blk(v, 0, 0), v33 = blk(v, 2, 2), u33 = blk(u, 2, 2);
  Eigen::PartialPivLU<ComplexMatrix> v33_lu;
  ComplexMatrix nil;
  if (n3 > 0) {
    v33_lu.compute(v33);
    nil = v33_lu.solve(u33);
  }

  RiccatiSolution sol;
  sol.z = z;
  sol.x1 = ComplexMatrix::Zero(n1, n2);
  sol.x2 = ComplexMatrix::Zero(n3, n2);
  auto theta_of = [&](const ComplexMatrix& x1, const ComplexMatrix& x2) {
    return ComplexMatrix(blk(vz, 1, 0) * x1 + blk(vz, 1, 1) + blk(vz, 1, 2) * x2);
  };
  const double blowup = 1e8 * std::max(1.0, v.norm());
  for (int it = 1; it <= max_iter; ++it) {
    const ComplexMatrix th = theta_of(sol.x1, sol.x2);
    ComplexMatrix x1 = sol.x1, x2 = sol.x2;
    if (n1 > 0) {
      const ComplexMatrix c1 = blk(ev, 0, 0) * sol.x1 + blk(ev, 0, 1) + blk(ev, 0, 2) * sol.x2;
      x1 = solve_sylvester(v11, th, c1);
    }
    if (n3 > 0) {
      const ComplexMatrix rhs =
          z * (blk(euh, 2, 0) * sol.x1 + blk(euh, 2, 1) + blk(euh, 2, 2) * sol.x2) * th -
          blk(ev, 2, 0) * sol.x1 - blk(ev, 2, 1) - blk(ev, 2, 2) * sol.x2;
      // V33 X - U33 X th = rhs via the nilpotent series in V33^{-1} U33
      ComplexMatrix term = v33_lu.solve(rhs);
      x2 = term;
      for (Index j = 0; j < n3; ++j) {
        term = nil * term * th;
        x2 += term;
      }
    }
    const double change = std::max((x1 - sol.x1).norm(), (x2 - sol.x2).norm());
    sol.x1 = std::move(x1);
    sol.x2 = std::move(x2);
    sol.iterations = it;
    if (!std::isfinite(change) || sol.x1.norm() + sol.x2.norm() > blowup)
      throw Error(ErrorKind::NonConvergence, "Riccati iteration diverged");
    if (change <= tol) break;
    if (it == max_iter) throw Error(ErrorKind::NonConvergence, "Riccati iteration budget exceeded");
  }
  sol.theta_hat = theta_of(sol.x1, sol.x2);

  ComplexMatrix x(n1 + n2 + n3, n2);
  x << sol.x1, ComplexMatrix::Identity(n2, n2), sol.x2;
  const ComplexMatrix uz = r.transform(p.u(z));
  sol.residual = (vz * x - uz * x * sol.theta_hat).norm();
  sol.x_tilde = p.scaling.right(z) * r.lift(x);
  return sol;
}

ComplexMatrix perturbed_subspace(const ComplexMatrix& theta_hat, const ComplexMatrix& omega,
                                 const ComplexMatrix& psi_rho) {
  const Index rc = omega.rows();
  const std::vector<Complex> target = to_list(eig(omega).values);
  std::vector<double> dist;
  for (const Complex& l : to_list(eig(theta_hat).values)) {
    double d = std::numeric_limits<double>::infinity();
    for (const Complex& w : target) d = std::min(d, std::abs(l - w));
    dist.push_back(d);
  }
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const double cut = static_cast<std::size_t>(rc) < sorted.size()
                         ? 0.5 * (sorted[static_cast<std::size_t>(rc - 1)] + sorted[static_cast<std::size_t>(rc)])
                         : std::numeric_limits<double>::infinity();
  const SchurForm f = ordered_schur(theta_hat, [&](Complex l) {
    double d = std::numeric_limits<double>::infinity();
    for (const Complex& w : target) d = std::min(d, std::abs(l - w));
    return d < cut;
  });
  if (f.selected != rc) throw Error(ErrorKind::ClusterNotSeparated, "perturbed cluster lost");
  const ComplexMatrix qs = f.q.leftCols(rc);
  return qs * (psi_rho * qs).partialPivLu().inverse();
}

}  // namespace jordanperturb
