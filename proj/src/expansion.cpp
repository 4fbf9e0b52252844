#include "jordanperturb/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace jordanperturb {

Complex EigenvalueExpansion::predict(double t, int branch) const {
  return lambda0 + std::pow(t, 1.0 / rho) * mus.at(static_cast<std::size_t>(branch));
}

double cluster_tolerance(const ReducedPencil& r) {
  double radius = 0.0;
  if (r.s_rho.rows() > 0)
    for (const Complex& g : to_list(eig(r.s_rho).values)) radius = std::max(radius, std::abs(g));
  return 1e-6 * radius;
}

std::vector<GammaCluster> gamma_clusters(const ReducedPencil& r) {
  std::vector<GammaCluster> out;
  if (r.s_rho.rows() == 0) return out;
  const std::vector<Complex> values = to_list(eig(r.s_rho).values);
  const double tol = cluster_tolerance(r);
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      out.push_back({});
      it = roots.end() - 1;
    }
    out[static_cast<std::size_t>(it - roots.begin())].members.push_back(values[i]);
  }
  for (GammaCluster& c : out) {
    Complex sum = 0.0;
    for (const Complex& v : c.members) sum += v;
    c.center = sum / static_cast<double>(c.members.size());
  }
  std::stable_sort(out.begin(), out.end(), [](const GammaCluster& a, const GammaCluster& b) {
    return argument_less(a.center, b.center);
  });
  return out;
}

std::vector<EigenvalueExpansion> eigenvalue_expansions(const ReducedPencil& r) {
  std::vector<EigenvalueExpansion> out;
  const auto clusters = gamma_clusters(r);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const Complex& gamma : clusters[c].members) {
      EigenvalueExpansion e;
      e.rho = r.rho;
      e.gamma = gamma;
      e.mus = rho_roots(gamma, r.rho);
      e.lambda0 = r.lambda0;
      e.simple = clusters[c].members.size() == 1;
      e.order_next = e.simple ? Rational(2, r.rho) : Rational(1, r.rho);
      e.cluster = c;
      out.push_back(std::move(e));
    }
  return out;
}

ComplexMatrix triangular_root(const ComplexMatrix& t, int rho, Complex target) {
  const Index n = t.rows();
  if (rho == 1) return t;
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    Complex best = 0.0;
    double dist = -1.0;
    for (const Complex& mu : rho_roots(t(i, i), rho)) {
      const double d = std::abs(mu - target);
      if (dist < 0.0 || d < dist) {
        dist = d;
        best = mu;
      }
    }
    r(i, i) = best;
  }
  // powers[q] holds R^q
  std::vector<ComplexMatrix> powers(static_cast<std::size_t>(rho + 1), ComplexMatrix::Zero(n, n));
  for (int q = 1; q <= rho; ++q)
    for (Index i = 0; i < n; ++i) powers[static_cast<std::size_t>(q)](i, i) = std::pow(r(i, i), q);
  std::vector<Complex> a(static_cast<std::size_t>(rho + 1)), b(static_cast<std::size_t>(rho + 1));
  for (Index j = 0; j < n; ++j)
    for (Index i = j - 1; i >= 0; --i) {
      a[1] = 1.0;
      b[1] = 0.0;
      for (int q = 1; q < rho; ++q) {
        const auto uq = static_cast<std::size_t>(q);
        Complex inner = 0.0;
        for (Index k = i + 1; k < j; ++k) inner += powers[uq](i, k) * r(k, j);
        a[uq + 1] = a[uq] * r(j, j) + powers[uq](i, i);
        b[uq + 1] = b[uq] * r(j, j) + inner;
      }
      const Complex ar = a[static_cast<std::size_t>(rho)];
      if (std::abs(ar) <= 1e-14 * std::max(1.0, std::abs(r(i, i))))
        throw Error(ErrorKind::MatrixRootFailure, "root recurrence is singular");
      r(i, j) = (t(i, j) - b[static_cast<std::size_t>(rho)]) / ar;
      for (int q = 1; q <= rho; ++q) {
        const auto uq = static_cast<std::size_t>(q);
        powers[uq](i, j) = a[uq] * r(i, j) + b[uq];
      }
    }
  return r;
}

namespace {

std::size_t nearest_cluster(const std::vector<GammaCluster>& clusters, Complex value) {
  std::size_t best = 0;
  double dist = -1.0;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const Complex& m : clusters[c].members) {
      const double d = std::abs(m - value);
      if (dist < 0.0 || d < dist) {
        dist = d;
        best = c;
      }
    }
  return best;
}

}  // namespace

SubspaceSelection select_roots(const ReducedPencil& r, const std::vector<RootSelection>& roots) {
  const auto clusters = gamma_clusters(r);
  const int rho = r.rho;
  SubspaceSelection sel;
  sel.rho = rho;
  sel.roots = roots;
  const Index s = r.s_rho.rows();

  std::vector<Complex> chosen, others;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int b = 0; b < rho; ++b) {
      int count = 0;
      for (const RootSelection& rs : roots) count += (rs.cluster == c && rs.branch == b);
      if (count > 1) throw Error(ErrorKind::InvalidArgument, "root selected twice");
      (count ? chosen : others).push_back(rho_root(clusters[c].center, rho, b));
    }
  for (const RootSelection& rs : roots)
    if (rs.cluster >= clusters.size() || rs.branch < 0 || rs.branch >= rho)
      throw Error(ErrorKind::IndexOutOfRange, "root selection out of range");
  double radius = 0.0;
  for (const GammaCluster& c : clusters) radius = std::max(radius, std::abs(c.center));
  const double gap = 1e-6 * std::pow(radius, 1.0 / rho);
  if (!chosen.empty() && !others.empty() && !(min_separation(chosen, others) > gap))
    throw Error(ErrorKind::ClusterNotSeparated, "selected roots are not separated from the rest");

  std::vector<ComplexMatrix> qs, omegas;
  Index total = 0;
  for (const RootSelection& rs : roots) {
    const std::size_t c = rs.cluster;
    const SchurForm f =
        ordered_schur(r.s_rho, [&](Complex l) { return nearest_cluster(clusters, l) == c; });
    if (f.selected != static_cast<Index>(clusters[c].members.size()))
      throw Error(ErrorKind::ClusterNotSeparated, "cluster extraction lost eigenvalues");
    const ComplexMatrix t11 = f.t.topLeftCorner(f.selected, f.selected);
    omegas.push_back(triangular_root(t11, rho, rho_root(clusters[c].center, rho, rs.branch)));
    qs.push_back(f.q.leftCols(f.selected));
    sel.block_sizes.push_back(f.selected);
    total += f.selected;
  }
  sel.q1 = ComplexMatrix(s, total);
  sel.omega = ComplexMatrix::Zero(total, total);
  Index col = 0;
  for (std::size_t b = 0; b < qs.size(); ++b) {
    const Index w = qs[b].cols();
    sel.q1.middleCols(col, w) = qs[b];
    sel.omega.block(col, col, w, w) = omegas[b];
    col += w;
  }
  sel.phi = ComplexMatrix(rho * s, total);
  ComplexMatrix block = sel.q1;
  for (int b = 0; b < rho; ++b) {
    sel.phi.middleRows(b * s, s) = block;
    block = block * sel.omega;
  }
  return sel;
}

SubspaceSelection select_subspace(const ReducedPencil& r,
                                  const std::function<bool(Complex)>& cluster,
                                  const std::vector<int>& root_index) {
  const auto clusters = gamma_clusters(r);
  std::vector<std::size_t> picked;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    std::size_t hits = 0;
    for (const Complex& m : clusters[c].members) hits += cluster(m) ? 1 : 0;
    if (hits == 0) continue;
    if (hits != clusters[c].members.size())
      throw Error(ErrorKind::ClusterNotSeparated, "predicate splits a multiple eigenvalue");
    picked.push_back(c);
  }
  if (picked.empty()) throw Error(ErrorKind::InvalidArgument, "cluster predicate selects nothing");
  if (root_index.size() != 1 && root_index.size() != picked.size())
    throw Error(ErrorKind::InvalidArgument, "need one root index per selected cluster");
  std::vector<RootSelection> roots;
  for (std::size_t i = 0; i < picked.size(); ++i)
    roots.push_back({picked[i], root_index[root_index.size() == 1 ? 0 : i]});
  return select_roots(r, roots);
}

std::vector<OrderEntry> h_order_table(const JordanStructure& st, int rho) {
  std::vector<OrderEntry> out;
  for (int i = 1; i <= st.k(); ++i) {
    if (st.s(i) == 0) continue;
    for (int l = 1; l <= i; ++l) {
      Rational e;
      if (i < rho)
        e = Rational(rho - i + l - 1, rho);
      else if (i == rho)
        e = Rational(l, rho);
      else if (l == 1)
        e = Rational(1, rho);
      else if (l <= rho)
        e = Rational(l - 1, rho);
      else
        e = Rational(1);
      out.push_back({i, l, e});
    }
  }
  return out;
}

std::vector<OrderEntry> x_order_table(const JordanStructure& st, int rho) {
  std::vector<OrderEntry> out;
  for (const OrderEntry& e : h_order_table(st, rho))
    if (e.group != rho) out.push_back(e);
  return out;
}

ComplexMatrix eigenspace_lift(const ReducedPencil& r, const JordanStructure& st,
                              const ComplexMatrix& y) {
  const BlockIndex& idx = st.index();
  const int rho = r.rho;
  ComplexMatrix out = ComplexMatrix::Zero(st.dimension(), y.cols());
  out.middleRows(idx.offset(rho, 1), st.s(rho)) = y;
  for (int q = rho + 1; q <= st.k(); ++q)
    if (st.s(q) > 0) out.middleRows(idx.offset(q, 1), st.s(q)) = r.g_rows(st, q, rho) * y;
  return out;
}

SubspaceExpansion subspace_expansion(const ReducedPencil& r, const SubspaceSelection& sel,
                                     const CanonicalPair& pair,
                                     const std::optional<ComplexMatrix>& xi, bool with_x) {
  const JordanStructure& st = pair.structure();
  SubspaceExpansion out;
  out.rho = r.rho;
  out.lambda0 = st.lambda0();
  out.omega = sel.omega;
  const ComplexMatrix h = eigenspace_lift(r, st, sel.q1);
  out.h0 = xi ? ComplexMatrix(*xi * h) : h;
  out.order_table = h_order_table(st, r.rho);
  if (with_x) {
    const Index s = st.s(r.rho);
    ComplexMatrix y = ComplexMatrix::Zero(s, r.rho * s);
    y.leftCols(s).setIdentity();
    const ComplexMatrix x = eigenspace_lift(r, st, y);
    out.x_full = xi ? ComplexMatrix(*xi * x) : x;
  }
  return out;
}

EigenvectorExpansion eigenvector_expansion(const ReducedPencil& r, std::size_t which,
                                           int root_index, const CanonicalPair& pair,
                                           const std::optional<ComplexVector>& phi) {
  const auto clusters = gamma_clusters(r);
  if (which >= clusters.size()) throw Error(ErrorKind::IndexOutOfRange, "eigenvalue index");
  if (clusters[which].members.size() != 1)
    throw Error(ErrorKind::NotSimple, "eigenvalue of S_rho is not simple");
  EigenvectorExpansion out;
  if (phi) {
    out.phi = *phi;
  } else {
    const SubspaceSelection sel = select_roots(r, {{which, root_index}});
    out.phi = sel.q1.col(0);
  }
  out.mu = rho_root(clusters[which].center, r.rho, root_index);
  out.constant = eigenspace_lift(r, pair.structure(), out.phi);
  out.order_table = h_order_table(pair.structure(), r.rho);
  return out;
}

}  // namespace jordanperturb
