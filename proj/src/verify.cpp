#include "jordanperturb/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "jordanperturb/generator.hpp"

namespace jordanperturb {

double min_resolvable_t(int rho) { return 10.0 * std::pow(kEps, static_cast<double>(rho) / (rho + 1)); }

void SweepPlan::validate() const {
  if (rho < 1) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
  if (t_values.empty()) throw Error(ErrorKind::InvalidArgument, "empty sweep");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > min_resolvable_t(rho)) || !std::isfinite(t_values[i]))
      throw Error(ErrorKind::InvalidArgument, "t below the resolvable limit");
    if (i > 0 && !(t_values[i] < t_values[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "t values must be strictly decreasing");
  }
  if (!(slack >= 0.0) || !(min_r_squared <= 1.0) || !(radius_constant > 0.0))
    throw Error(ErrorKind::InvalidArgument, "invalid fit thresholds");
}

SweepPlan default_plan(int rho, int points, double t_max, double t_min) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "need at least two sweep points");
  SweepPlan plan;
  plan.rho = rho;
  t_min = std::max(t_min, 2.0 * min_resolvable_t(rho));
  if (!(t_max > t_min)) throw Error(ErrorKind::InvalidArgument, "empty t range");
  const double step = std::log(t_min / t_max) / (points - 1);
  for (int i = 0; i < points; ++i) plan.t_values.push_back(t_max * std::exp(step * i));
  plan.t_values.back() = t_min;
  return plan;
}

unsigned sweep_threads(std::size_t points) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("JORDANPERTURB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::clamp<std::size_t>(points, 1, n));
}

ConvergenceReport slope_fit(const std::vector<Sample>& samples, Rational claimed,
                            const FitOptions& opts) {
  ConvergenceReport rep;
  rep.quantity = opts.quantity;
  rep.variable = opts.variable;
  rep.claimed = claimed;
  rep.weak = opts.weak;
  rep.min_slope = opts.weak ? claimed.value() + kWeakMargin : claimed.value() - opts.slack;
  rep.samples = samples;
  std::vector<double> xs, ys;
  for (const Sample& s : samples)
    if (s.x > 0.0 && std::isfinite(s.error) && s.error >= std::max(opts.floor, s.floor)) {
      xs.push_back(std::log(s.x));
      ys.push_back(std::log(s.error));
    }
  rep.used = xs.size();
  if (xs.size() < 5)
    throw Error(ErrorKind::InsufficientSamples,
                opts.quantity + ": " + std::to_string(xs.size()) + " samples above the floor");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientSamples, "samples share one abscissa");
  rep.fitted_slope = sxy / sxx;
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  const bool slope_ok = opts.weak ? rep.fitted_slope > rep.min_slope : rep.fitted_slope >= rep.min_slope;
  rep.pass = slope_ok && rep.r_squared >= opts.min_r_squared;
  return rep;
}

namespace {

// argument in (-pi, pi], with rounding noise around the negative real axis mapped to pi
double arg_of(Complex z) {
  const double a = std::arg(z);
  return a < -std::numbers::pi + 1e-8 ? a + 2.0 * std::numbers::pi : a;
}

// Hungarian algorithm for an n x m cost matrix with n <= m; returns column per row.
std::vector<std::size_t> assign(const std::vector<std::vector<double>>& cost, std::size_t m) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> out(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) out[p[j] - 1] = j - 1;
  return out;
}

}  // namespace

Matching match_into(const std::vector<Complex>& predicted, const std::vector<Complex>& observed) {
  if (predicted.size() > observed.size())
    throw Error(ErrorKind::CardinalityMismatch, "more predictions than observed eigenvalues");
  Matching out;
  if (predicted.empty()) return out;
  std::vector<std::vector<double>> cost(predicted.size(), std::vector<double>(observed.size()));
  for (std::size_t i = 0; i < predicted.size(); ++i)
    for (std::size_t j = 0; j < observed.size(); ++j) cost[i][j] = std::abs(predicted[i] - observed[j]);
  out.pairing = assign(cost, observed.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double c = cost[i][out.pairing[i]];
    out.cost += c;
    out.max_error = std::max(out.max_error, c);
  }
  return out;
}

Matching match_eigenvalues(const std::vector<Complex>& predicted,
                           const std::vector<Complex>& observed) {
  if (predicted.size() != observed.size())
    throw Error(ErrorKind::CardinalityMismatch, "predicted and observed lists differ in length");
  return match_into(predicted, observed);
}

std::vector<Complex> oracle_eigs(const ComplexMatrix& a, const ComplexMatrix& d, double t,
                                 Complex lambda0, Rational radius_exponent, double c) {
  const ComplexMatrix m = t == 0.0 ? a : ComplexMatrix(a + t * d);
  const double radius = t == 0.0 ? c * 1e-6 : c * std::pow(t, radius_exponent.value());
  std::vector<Complex> out;
  for (const Complex& l : to_list(eig(m).values))
    if (std::abs(l - lambda0) <= radius) out.push_back(l);
  std::sort(out.begin(), out.end(), [&](Complex x, Complex y) {
    const double ax = arg_of(x - lambda0), ay = arg_of(y - lambda0);
    if (std::abs(ax - ay) > 1e-8) return ax < ay;
    return std::abs(x - lambda0) < std::abs(y - lambda0);
  });
  return out;
}

bool all_pass(const std::vector<ConvergenceReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ConvergenceReport& r) { return r.pass; });
}

namespace {

struct Tracked {
  std::string name;
  SubspaceSelection sel;
  ComplementPair comp;
  FirstOrderExpansion fo;
  ComplexMatrix h0, h1;    // in the coordinates of the verified matrices
  ComplexMatrix omega;     // used in the residual (shifted for the control hook)
};

struct Claim {
  std::string quantity;
  Rational claimed;
  bool weak = false;
  std::string variable = "t";
};

struct Problem {
  const CanonicalPair& pair;
  ComplexMatrix a, d;
  std::optional<ReducedProblem> general;
};

std::string roots_name(const std::vector<RootSelection>& roots) {
  std::string out;
  for (const RootSelection& r : roots) {
    if (!out.empty()) out += "+";
    out += "c" + std::to_string(r.cluster) + "b" + std::to_string(r.branch);
  }
  return out;
}

ComplexMatrix power(const ComplexMatrix& m, int q) {
  ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < q; ++i) out = out * m;
  return out;
}

template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const unsigned workers = sweep_threads(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

// With d = 0 nothing moves: the eigenvalues near lambda0 stay put and every error is zero.
std::vector<ConvergenceReport> unperturbed_report(const Problem& prob, int rho,
                                                  const SweepPlan& plan) {
  const Complex l0 = prob.pair.structure().lambda0();
  ConvergenceReport rep;
  rep.quantity = "eigenvalues/unperturbed";
  rep.claimed = Rational(2, rho);
  rep.min_slope = rep.claimed.value() - plan.slack;
  for (double t : plan.t_values) {
    double err = 0.0;
    for (const Complex& l : oracle_eigs(prob.a, prob.d, t, l0, Rational(1, rho + 1), plan.radius_constant))
      err = std::max(err, std::abs(l - l0));
    rep.samples.push_back({t, err});
    rep.used += err >= 100.0 * kEps * std::max(1.0, prob.a.norm()) ? 1 : 0;
  }
  rep.pass = rep.used < 5;
  rep.floor_limited = true;
  rep.note = "zero perturbation: no expansion to verify";
  return {rep};
}

std::vector<ConvergenceReport> run_sweep(const Problem& prob, int rho, const SweepPlan& plan) {
  plan.validate();
  if (plan.rho != rho) throw Error(ErrorKind::InvalidArgument, "plan rho differs from rho");
  const CanonicalPair& pair = prob.pair;
  const JordanStructure& st = pair.structure();
  const auto valid = st.valid_rhos();
  if (std::find(valid.begin(), valid.end(), rho) == valid.end())
    throw Error(ErrorKind::IndexOutOfRange, "no Jordan block of size rho");
  const bool canonical = !prob.general.has_value();
  const Complex l0 = st.lambda0();
  if (prob.d.norm() == 0.0) return unperturbed_report(prob, rho, plan);
  const AssembledPencil pencil = assemble_pencil(pair, rho);
  const ReducedPencil r = reduce_pencil(pencil, pair);
  const auto clusters = gamma_clusters(r);
  const Rational radius_exp = plan.radius_exponent.value_or(Rational(1, rho + 1));
  const double scale = std::max(1.0, prob.a.norm());
  const double floor = 100.0 * kEps * scale;

  // tracked subspaces
  std::vector<std::vector<RootSelection>> selections;
  if (plan.roots.empty()) {
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (int b = 0; b < rho; ++b) selections.push_back({{c, b}});
  } else {
    selections.push_back(plan.roots);
  }
  std::vector<Tracked> tracked;
  for (const auto& roots : selections) {
    Tracked tr;
    tr.name = roots_name(roots);
    tr.sel = select_roots(r, roots);
    tr.comp = complement_pair(r, tr.sel);
    tr.fo = first_order_expansion(r, tr.sel, tr.comp, pair);
    tr.omega = tr.sel.omega;
    if (plan.branch_shift != 0) {
      std::vector<RootSelection> shifted = roots;
      for (RootSelection& s : shifted) s.branch = ((s.branch + plan.branch_shift) % rho + rho) % rho;
      tr.omega = select_roots(r, shifted).omega;
    }
    ComplexMatrix h1c = tr.fo.h1;
    if (plan.h1_noise > 0.0) {
      const ComplexMatrix e = GaussianStream(0x5eedULL).matrix(h1c.rows(), h1c.cols());
      h1c += plan.h1_noise / e.norm() * e;
    }
    if (canonical) {
      tr.h0 = tr.fo.h0;
      tr.h1 = h1c;
    } else {
      const GeneralSubspace g = lift_to_general(*prob.general, tr.fo.h0, h1c, rho);
      tr.h0 = g.h0;
      tr.h1 = g.h1;
    }
    tracked.push_back(std::move(tr));
  }

  // claims, in report order
  std::vector<Claim> claims;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const bool simple = clusters[c].members.size() == 1;
    claims.push_back({"eigenvalues/c" + std::to_string(c), simple ? Rational(2, rho) : Rational(1, rho),
                      !simple});
  }
  const std::size_t first_residual = claims.size();
  for (const Tracked& tr : tracked) claims.push_back({"residual/" + tr.name, Rational(2, rho)});
  const bool riccati = canonical && plan.riccati;
  const bool tables = canonical && plan.order_tables;
  const std::vector<OrderEntry> h_table = h_order_table(st, rho);
  const std::vector<OrderEntry> x_table = x_order_table(st, rho);
  const std::size_t first_h = claims.size();
  if (tables) {
    for (const Tracked& tr : tracked)
      for (const OrderEntry& e : h_table)
        claims.push_back({"h_block/" + tr.name + "/g" + std::to_string(e.group) + "l" +
                              std::to_string(e.block),
                          e.exponent});
    for (const OrderEntry& e : x_table)
      claims.push_back(
          {"x_block/g" + std::to_string(e.group) + "l" + std::to_string(e.block), e.exponent});
  }
  const std::size_t theta_claim = claims.size();
  if (riccati) claims.push_back({"riccati_theta", Rational(2), false, "z"});

  // predictions for the eigenvalue claims
  std::vector<std::size_t> owner;
  std::vector<Complex> mus;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int b = 0; b < rho; ++b)
      for (std::size_t k = 0; k < clusters[c].members.size(); ++k) {
        owner.push_back(c);
        mus.push_back(rho_root(clusters[c].center, rho, b));
      }

  SubspaceExpansion constant;
  if (tables) {
    constant = subspace_expansion(r, tracked.front().sel, pair, std::nullopt, true);
  }
  const BlockIndex& idx = st.index();
  const std::size_t points = plan.t_values.size();
  std::vector<std::vector<double>> errors(points, std::vector<double>(claims.size(), std::nan("")));
  std::vector<std::string> riccati_notes(points);

  parallel_for(points, [&](std::size_t p) {
    const double t = plan.t_values[p];
    const double z = std::pow(t, 1.0 / rho);
    std::vector<double>& err = errors[p];
    const std::vector<Complex> observed = oracle_eigs(prob.a, prob.d, t, l0, radius_exp, plan.radius_constant);
    std::vector<Complex> predicted;
    for (const Complex& mu : mus) predicted.push_back(l0 + z * mu);
    const Matching m = match_into(predicted, observed);
    for (std::size_t c = 0; c < clusters.size(); ++c) err[c] = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
      err[owner[i]] = std::max(err[owner[i]], std::abs(predicted[i] - observed[m.pairing[i]]));

    const ComplexMatrix at = prob.a + t * prob.d;
    for (std::size_t k = 0; k < tracked.size(); ++k) {
      const Tracked& tr = tracked[k];
      const Index rc = tr.omega.rows();
      const ComplexMatrix h = tr.h0 + z * tr.h1;
      const ComplexMatrix c = l0 * ComplexMatrix::Identity(rc, rc) + z * tr.omega + z * z * tr.fo.delta11;
      err[first_residual + k] = (at * h - h * c).norm();
    }
    if (!riccati) return;
    RiccatiSolution sol;
    try {
      sol = solve_riccati(pencil, r, z);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonConvergence) throw;
      riccati_notes[p] = "no Riccati convergence at t=" + std::to_string(t);
      return;
    }
    err[theta_claim] = (sol.theta_hat - r.theta - z * tracked.front().fo.delta).norm();
    if (!tables) return;
    std::size_t claim = first_h;
    for (const Tracked& tr : tracked) {
      const ComplexMatrix basis = perturbed_subspace(sol.theta_hat, tr.sel.omega, tr.comp.psi_rho);
      const ComplexMatrix h = sol.x_tilde * basis;
      for (const OrderEntry& e : h_table) {
        const Index rows = st.s(e.group), off = idx.offset(e.group, e.block);
        ComplexMatrix diff = h.middleRows(off, rows) - tr.fo.h0.middleRows(off, rows);
        if (e.group == rho && e.block >= 2) diff -= tr.sel.q1 * power(z * tr.sel.omega, e.block - 1);
        err[claim++] = diff.norm();
      }
    }
    for (const OrderEntry& e : x_table) {
      const Index rows = st.s(e.group), off = idx.offset(e.group, e.block);
      err[claim++] = (sol.x_tilde.middleRows(off, rows) - constant.x_full->middleRows(off, rows)).norm();
    }
  });

  std::vector<ConvergenceReport> reports;
  std::size_t skipped = 0;
  for (const std::string& n : riccati_notes) skipped += n.empty() ? 0 : 1;
  for (std::size_t c = 0; c < claims.size(); ++c) {
    const Claim& cl = claims[c];
    std::vector<Sample> samples;
    for (std::size_t p = 0; p < points; ++p) {
      const double t = plan.t_values[p];
      if (std::isnan(errors[p][c])) continue;
      // oracle eigenvalues of a size-rho cluster carry rounding amplified by t^{1/rho - 1}
      const double sample_floor = c < first_residual ? floor * std::pow(t, 1.0 / rho - 1.0) : 0.0;
      samples.push_back({cl.variable == "z" ? std::pow(t, 1.0 / rho) : t, errors[p][c], sample_floor});
    }
    FitOptions opts;
    opts.slack = plan.slack;
    opts.min_r_squared = plan.min_r_squared;
    opts.floor = floor;
    opts.weak = cl.weak;
    opts.quantity = cl.quantity;
    opts.variable = cl.variable;
    ConvergenceReport rep;
    const bool from_riccati = c >= first_h;
    try {
      rep = slope_fit(samples, cl.claimed, opts);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientSamples) throw;
      rep.quantity = cl.quantity;
      rep.variable = cl.variable;
      rep.claimed = cl.claimed;
      rep.weak = cl.weak;
      rep.samples = samples;
      std::size_t above = 0;
      for (const Sample& s : samples) above += s.error >= std::max(floor, s.floor) ? 1 : 0;
      rep.used = above;
      if (from_riccati && samples.size() < 5) {
        rep.pass = false;
        rep.note = "too few converged Riccati points";
      } else {
        rep.pass = true;
        rep.floor_limited = true;
        rep.note = "floor-limited: " + std::to_string(above) + " samples above the floor";
      }
    }
    if (from_riccati && skipped > 0) {
      if (!rep.note.empty()) rep.note += "; ";
      rep.note += std::to_string(skipped) + " sweep points without Riccati convergence";
    }
    if (cl.weak) rep.note += rep.note.empty() ? "weakly verified o() claim" : "; weakly verified o() claim";
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace

std::vector<ConvergenceReport> verify_all(const CanonicalPair& pair, int rho, const SweepPlan& plan) {
  const Problem prob{pair, pair.a(), pair.d11(), std::nullopt};
  return run_sweep(prob, rho, plan);
}

std::vector<ConvergenceReport> verify_general(const ReducedProblem& red, const ComplexMatrix& a,
                                              const ComplexMatrix& d, int rho,
                                              const SweepPlan& plan) {
  const Problem prob{red.pair, a, d, red};
  return run_sweep(prob, rho, plan);
}

}  // namespace jordanperturb
