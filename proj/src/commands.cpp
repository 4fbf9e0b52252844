#include "jordanperturb/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "jordanperturb/generator.hpp"

namespace jordanperturb {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::IoError:
      return kExitParse;
    default:
      return kExitPrecondition;
  }
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

Json complex_list(const std::vector<Complex>& values) {
  Json j = Json::array();
  for (Complex z : values) j.push_back(complex_to_json(z));
  return j;
}

std::string join(const std::vector<Complex>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + fmt(values[i]);
  return s;
}

Json order_table_json(const std::vector<OrderEntry>& table) {
  Json j = Json::array();
  for (const OrderEntry& e : table)
    j.push_back({{"group", e.group}, {"block", e.block}, {"exponent", e.exponent.str()}});
  return j;
}

void require_rho(const JordanStructure& st, int rho) {
  const auto valid = st.valid_rhos();
  if (std::find(valid.begin(), valid.end(), rho) == valid.end())
    throw Error(ErrorKind::IndexOutOfRange, "no Jordan block of size " + std::to_string(rho));
}

}  // namespace

CommandOutput cmd_analyze(const ProblemFile& problem, const AnalyzeOptions& opts) {
  const CanonicalPair pair = problem.canonical_pair();
  const JordanStructure& st = pair.structure();
  const GenericityReport gen = check_generic(pair, opts.threshold);
  CommandOutput out;
  std::ostringstream text;

  out.json["structure"] = {{"lambda0", complex_to_json(st.lambda0())},
                           {"sizes", st.sizes()},
                           {"k", st.k()},
                           {"dimension", st.dimension()},
                           {"valid_rhos", st.valid_rhos()}};
  out.json["general_form"] = problem.general.has_value();
  text << "lambda0 = " << fmt(st.lambda0()) << ", k = " << st.k() << ", m = " << st.dimension()
       << ", sizes = (";
  for (int j = 1; j <= st.k(); ++j) text << (j > 1 ? "," : "") << st.s(j);
  text << ")\n\n  i  s_i  sigma_min(W_i)\n";
  Json sigma = Json::array();
  for (int i = 1; i <= st.k(); ++i) {
    const auto& s = gen.sigma_min[static_cast<std::size_t>(i - 1)];
    sigma.push_back({{"i", i}, {"s", st.s(i)}, {"sigma_min", s ? Json(*s) : Json(nullptr)}});
    text << "  " << i << "  " << st.s(i) << "    " << (s ? fmt(*s) : std::string("-")) << "\n";
  }
  out.json["sigma_min"] = sigma;
  out.json["generic"] = gen.generic;
  out.json["threshold"] = gen.threshold;
  text << "\ngeneric: " << (gen.generic ? "yes" : "no") << " (threshold " << fmt(gen.threshold)
       << ")\n";

  std::vector<int> rhos = opts.rhos.empty() ? st.valid_rhos() : opts.rhos;
  for (int rho : rhos) require_rho(st, rho);
  Json per_rho = Json::array();
  bool singular = false;
  for (int rho : rhos) {
    Json entry{{"rho", rho}};
    text << "\nrho = " << rho << "\n";
    try {
      const ReducedPencil r = reduce_pencil(assemble_pencil(pair, rho), pair, opts.threshold);
      std::vector<Complex> gammas = to_list(eig(r.s_rho).values);
      sort_by_argument(gammas);
      const std::vector<Complex> theta = theta_spectrum(r);
      entry["s_rho_spectrum"] = complex_list(gammas);
      entry["theta_spectrum"] = complex_list(theta);
      entry["w_rho"] = matrix_to_json(r.w_rho);
      text << "  Lambda(S_rho):   " << join(gammas) << "\n";
      text << "  Lambda(Theta):   " << join(theta) << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularW) throw;
      singular = true;
      entry["error"] = e.what();
      text << "  " << e.what() << "\n";
    }
    per_rho.push_back(std::move(entry));
  }
  out.json["rhos"] = per_rho;
  out.text = text.str();
  out.exit_code = (gen.generic && !singular) ? kExitOk : kExitPrecondition;
  return out;
}

std::vector<std::size_t> parse_cluster_selector(const std::string& selector,
                                                const std::vector<GammaCluster>& clusters) {
  std::vector<std::size_t> picked;
  auto numbers = [&](const std::string& body) {
    std::vector<double> v;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() || !std::isfinite(x))
        throw Error(ErrorKind::InvalidArgument, "bad number in cluster selector: " + item);
      v.push_back(x);
    }
    return v;
  };
  if (selector == "all") {
    for (std::size_t c = 0; c < clusters.size(); ++c) picked.push_back(c);
  } else if (selector.rfind("idx:", 0) == 0) {
    for (double x : numbers(selector.substr(4))) {
      if (x < 0 || x != std::floor(x) || x >= static_cast<double>(clusters.size()))
        throw Error(ErrorKind::IndexOutOfRange, "cluster index " + fmt(x) + " out of range");
      picked.push_back(static_cast<std::size_t>(x));
    }
  } else if (selector.rfind("val:", 0) == 0) {
    const std::vector<double> v = numbers(selector.substr(4));
    if (v.size() != 2 && v.size() != 3)
      throw Error(ErrorKind::InvalidArgument, "value selector is val:RE,IM[,RADIUS]");
    const Complex center(v[0], v[1]);
    const double radius = v.size() == 3 ? v[2] : 1e-6 * std::max(1.0, std::abs(center));
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      std::size_t inside = 0;
      for (Complex g : clusters[c].members) inside += std::abs(g - center) <= radius ? 1 : 0;
      if (inside == clusters[c].members.size()) picked.push_back(c);
      else if (inside > 0)
        throw Error(ErrorKind::ClusterNotSeparated,
                    "disc around " + fmt(center) + " splits cluster " + std::to_string(c));
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "cluster selector must be idx:, val: or all");
  }
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  if (picked.empty()) throw Error(ErrorKind::InvalidArgument, "cluster selector matches nothing");
  return picked;
}

CommandOutput cmd_expand(const ProblemFile& problem, const ExpandOptions& opts) {
  if (opts.order != 0 && opts.order != 1)
    throw Error(ErrorKind::InvalidArgument, "order must be 0 or 1");
  const CanonicalPair pair = problem.canonical_pair();
  const JordanStructure& st = pair.structure();
  const int rho = opts.rho;
  require_rho(st, rho);
  const ReducedPencil r = reduce_pencil(assemble_pencil(pair, rho), pair);
  const auto clusters = gamma_clusters(r);
  const auto picked = parse_cluster_selector(opts.cluster, clusters);
  if (opts.roots.size() != 1 && opts.roots.size() != picked.size())
    throw Error(ErrorKind::InvalidArgument, "give one root for all clusters or one per cluster");
  std::vector<RootSelection> roots;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const int b = opts.roots.size() == 1 ? opts.roots[0] : opts.roots[i];
    if (b < 0 || b >= rho)
      throw Error(ErrorKind::IndexOutOfRange, "root must lie in [0, rho)");
    roots.push_back({picked[i], b});
  }
  const SubspaceSelection sel = select_roots(r, roots);

  CommandOutput out;
  std::ostringstream text;
  Json& j = out.json;
  j["rho"] = rho;
  j["order"] = opts.order;
  j["lambda0"] = complex_to_json(st.lambda0());
  Json cl = Json::array();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto it = std::find(picked.begin(), picked.end(), c);
    Json e{{"index", c},
           {"center", complex_to_json(clusters[c].center)},
           {"members", complex_list(clusters[c].members)},
           {"selected", it != picked.end()}};
    if (it != picked.end()) e["root"] = roots[static_cast<std::size_t>(it - picked.begin())].branch;
    cl.push_back(std::move(e));
  }
  j["clusters"] = cl;
  Json eigs = Json::array();
  text << "rho = " << rho << ", lambda0 = " << fmt(st.lambda0()) << "\n\n"
       << "  cluster  gamma                  simple  next order\n";
  for (const EigenvalueExpansion& e : eigenvalue_expansions(r)) {
    eigs.push_back({{"cluster", e.cluster},
                    {"gamma", complex_to_json(e.gamma)},
                    {"mus", complex_list(e.mus)},
                    {"simple", e.simple},
                    {"order_next", e.order_next.str()}});
    text << "  " << e.cluster << "        " << fmt(e.gamma) << "    " << (e.simple ? "yes" : "no")
         << "     " << e.order_next.str() << "\n";
  }
  j["eigenvalues"] = eigs;

  const std::optional<ComplexMatrix> xi =
      problem.general ? std::optional<ComplexMatrix>(problem.general->xi) : std::nullopt;
  const SubspaceExpansion sub = subspace_expansion(r, sel, pair, std::nullopt, false);
  j["omega"] = matrix_to_json(sel.omega);
  j["q1"] = matrix_to_json(sel.q1);
  j["h_order_table"] = order_table_json(sub.order_table);
  j["x_order_table"] = order_table_json(x_order_table(st, rho));
  text << "\nselected " << sel.omega.rows() << " column(s); Lambda(Omega) = "
       << join(to_list(eig(sel.omega).values)) << "\n\n  H order table (group, block: exponent)\n";
  for (const OrderEntry& e : sub.order_table)
    text << "    (" << e.group << ", " << e.block << "): " << e.exponent.str() << "\n";

  if (opts.order == 0) {
    j["h0"] = matrix_to_json(xi ? ComplexMatrix(*xi * sub.h0) : sub.h0);
    if (xi) j["h0_canonical"] = matrix_to_json(sub.h0);
  } else {
    const ComplementPair comp = complement_pair(r, sel);
    const FirstOrderExpansion fo = first_order_expansion(r, sel, comp, pair);
    if (problem.general) {
      const GeneralSubspace g = lift_to_general(problem.reduced(), fo.h0, fo.h1, rho);
      j["h0"] = matrix_to_json(g.h0);
      j["h1"] = matrix_to_json(g.h1);
      j["h0_canonical"] = matrix_to_json(fo.h0);
      j["h1_canonical"] = matrix_to_json(fo.h1);
    } else {
      j["h0"] = matrix_to_json(fo.h0);
      j["h1"] = matrix_to_json(fo.h1);
    }
    j["delta11"] = matrix_to_json(fo.delta11);
    j["y"] = matrix_to_json(fo.y);
    j["c_hat"] = matrix_to_json(fo.c_hat);
    j["m"] = matrix_to_json(comp.m);
    j["omega_c"] = matrix_to_json(comp.omega_c);
    text << "\n||H1||_F = " << fmt(fo.h1.norm()) << ", ||Delta11||_F = " << fmt(fo.delta11.norm())
         << ", Lambda(Delta11) = " << join(to_list(eig(fo.delta11).values)) << "\n";
  }
  out.text = text.str();
  return out;
}

Json report_to_json(const ConvergenceReport& rep) {
  Json samples = Json::array();
  for (const Sample& s : rep.samples) samples.push_back(Json::array({s.x, s.error}));
  return {{"quantity", rep.quantity},
          {"variable", rep.variable},
          {"claimed", rep.claimed.str()},
          {"min_slope", rep.min_slope},
          {"fitted_slope", rep.fitted_slope},
          {"r_squared", rep.r_squared},
          {"pass", rep.pass},
          {"floor_limited", rep.floor_limited},
          {"weak", rep.weak},
          {"used", rep.used},
          {"note", rep.note},
          {"samples", samples}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string reports_to_csv(const std::vector<std::pair<int, ConvergenceReport>>& reports) {
  std::string csv = "quantity,t,error\r\n";
  for (const auto& [rho, rep] : reports) {
    const std::string name = csv_field("rho" + std::to_string(rho) + "/" + rep.quantity);
    for (const Sample& s : rep.samples) {
      const double t = rep.variable == "z" ? std::pow(s.x, rho) : s.x;
      csv += name + "," + csv_number(t) + "," + csv_number(s.error) + "\r\n";
    }
  }
  return csv;
}

CommandOutput cmd_verify(const ProblemFile& problem, const VerifyOptions& opts) {
  const JordanStructure st = problem.structure();
  std::vector<int> rhos;
  if (opts.rho) {
    require_rho(st, *opts.rho);
    rhos.push_back(*opts.rho);
  } else {
    rhos = st.valid_rhos();
  }
  const CanonicalPair pair = problem.canonical_pair();
  std::optional<ReducedProblem> red;
  if (problem.general) red = problem.reduced();

  CommandOutput out;
  std::ostringstream text;
  std::vector<std::pair<int, ConvergenceReport>> all;
  bool pass = true;
  Json per_rho = Json::array();
  for (int rho : rhos) {
    SweepPlan plan = default_plan(rho, opts.points, opts.t_max, opts.t_min);
    plan.h1_noise = opts.perturb_h1;
    plan.branch_shift = opts.branch_shift;
    const auto reports = red ? verify_general(*red, problem.general->a, problem.general->d, rho, plan)
                             : verify_all(pair, rho, plan);
    Json list = Json::array();
    text << "rho = " << rho << " (t from " << fmt(plan.t_values.front()) << " to "
         << fmt(plan.t_values.back()) << ")\n";
    for (const ConvergenceReport& rep : reports) {
      list.push_back(report_to_json(rep));
      all.emplace_back(rho, rep);
      pass = pass && rep.pass;
      char line[256];
      std::snprintf(line, sizeof line, "  %-4s %-34s claimed %-5s slope %8.4f  r2 %.4f%s%s\n",
                    rep.pass ? "ok" : "FAIL", rep.quantity.c_str(), rep.claimed.str().c_str(),
                    rep.fitted_slope, rep.r_squared, rep.floor_limited ? "  floor-limited" : "",
                    rep.weak ? "  weak" : "");
      text << line;
      if (!rep.note.empty()) text << "       " << rep.note << "\n";
    }
    per_rho.push_back({{"rho", rho}, {"pass", all_pass(reports)}, {"reports", list}});
  }
  text << (pass ? "all reports pass\n" : "verification FAILED\n");
  out.json = {{"pass", pass}, {"rhos", per_rho}};
  out.text = text.str();
  out.csv = reports_to_csv(all);
  out.exit_code = pass ? kExitOk : kExitVerifyFailed;
  return out;
}

ProblemFile cmd_generate(const GenerateOptions& opts) {
  CaseSpec spec;
  spec.structure = JordanStructure(opts.lambda0, opts.sizes);
  spec.seed = opts.seed;
  spec.scale = opts.scale;
  spec.ensure_generic = opts.scale > 0.0;
  const CanonicalPair pair = generate(spec);
  ProblemFile p;
  p.lambda0 = opts.lambda0;
  p.sizes = opts.sizes;
  // -0 from zero scale is written as 0
  p.d11 = (pair.d11().array() + Complex(0.0, 0.0)).matrix();
  return p;
}

}  // namespace jordanperturb
