#include "jordanperturb/generator.hpp"

#include <cmath>
#include <numbers>

#include "jordanperturb/expansion.hpp"

namespace jordanperturb {

GaussianStream::GaussianStream(std::uint64_t seed) : engine_(seed) {}

double GaussianStream::uniform() {
  // 53 random bits mapped to (0, 1]
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phase = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(phase);
  return r * std::cos(phase);
}

Complex GaussianStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::numbers::sqrt2 * 0.5;
}

ComplexMatrix GaussianStream::matrix(Index rows, Index cols, double scale) {
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = scale * complex_normal();
  return out;
}

namespace {

bool distinct_gammas(const CanonicalPair& pair) {
  for (int rho : pair.structure().valid_rhos()) {
    const ReducedPencil r = reduce_pencil(assemble_pencil(pair, rho), pair);
    for (const GammaCluster& c : gamma_clusters(r))
      if (c.members.size() > 1) return false;
    const std::vector<Complex> g = to_list(eig(r.s_rho).values);
    double radius = 0.0;
    for (const Complex& v : g) radius = std::max(radius, std::abs(v));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        if (std::abs(g[i] - g[j]) < 1e-3 * radius) return false;
  }
  return true;
}

}  // namespace

CanonicalPair generate(const CaseSpec& spec) {
  if (!(spec.scale >= 0.0) || !std::isfinite(spec.scale))
    throw Error(ErrorKind::InvalidArgument, "scale must be a finite non-negative number");
  if (spec.scale == 0.0 && (spec.ensure_generic || spec.ensure_distinct_gammas))
    throw Error(ErrorKind::InvalidArgument, "a zero perturbation cannot be generic");
  const Index m = spec.structure.dimension();
  GaussianStream stream(spec.seed);
  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    CanonicalPair pair(spec.structure, stream.matrix(m, m, spec.scale));
    if (spec.ensure_generic && !check_generic(pair, spec.generic_margin).generic) continue;
    if (spec.ensure_distinct_gammas && !distinct_gammas(pair)) continue;
    return pair;
  }
  throw Error(ErrorKind::GenerationExhausted, "no admissible draw within the retry budget");
}

namespace {

constexpr std::uint64_t kTwoBlockSeed = 20240611;

KnownCase example1() {
  KnownCase c;
  c.name = "example1";
  c.structure = JordanStructure(0.0, {0, 0, 0, 1});
  c.a = build_nilpotent(c.structure);
  c.d = ComplexMatrix::Zero(4, 4);
  c.d(3, 0) = 1.0;
  c.d11 = c.d;
  c.rho = 4;
  c.gammas = {1.0};
  const Complex i(0.0, 1.0);
  ComplexMatrix h0 = ComplexMatrix::Zero(4, 3), h1 = ComplexMatrix::Zero(4, 3);
  h0.row(0) << 1.0, 1.0, 1.0;
  h1.row(1) << 1.0, i, -1.0;
  c.expected["h0"] = h0;
  c.expected["h1"] = h1;
  c.expected["omega"] = ComplexMatrix(Eigen::Vector3cd(1.0, i, -1.0).asDiagonal());
  c.eigenvalue_formula = "t^(1/4) exp(i pi (j-1)/2), j = 1..4";
  return c;
}

KnownCase rho1_diagonal() {
  KnownCase c;
  c.name = "rho1-diagonal";
  const Complex lambda0(1.0, 0.0);
  c.structure = JordanStructure(lambda0, {3});
  c.a = lambda0 * ComplexMatrix::Identity(3, 3);
  c.d = ComplexMatrix::Zero(3, 3);
  c.d.diagonal() << 1.0, Complex(2.0, 1.0), -1.5;
  c.d(0, 1) = 0.5;
  c.d(0, 2) = Complex(0.0, -0.25);
  c.d(1, 2) = 0.75;
  c.d11 = c.d;
  c.rho = 1;
  c.gammas = {1.0, Complex(2.0, 1.0), -1.5};
  c.eigenvalue_formula = "lambda0 + t gamma, gamma in the spectrum of D11";
  return c;
}

KnownCase two_block_mixed() {
  KnownCase c;
  c.name = "two-block-mixed";
  c.structure = JordanStructure(0.0, {1, 2});
  GaussianStream stream(kTwoBlockSeed);
  c.d11 = stream.matrix(5, 5, 0.2);
  c.a = build_nilpotent(c.structure);
  c.d = c.d11;
  c.rho = 2;
  // spectra recorded from a run on this draw; an oracle fit at t = 1e-12 agrees to 4e-5
  c.gammas = {Complex(-0.077349901445800312, -0.21863371047539201),
              Complex(-0.0115415026372966, 0.14672233562637935)};
  c.expected["gamma_rho1"] =
      ComplexMatrix::Constant(1, 1, Complex(0.018405066202203051, 0.23388546985690584));
  c.eigenvalue_formula = "lambda0 + t^(1/2) mu, mu^2 in the spectrum of S_2";
  return c;
}

}  // namespace

std::vector<std::string> known_case_names() {
  return {"example1", "rho1-diagonal", "two-block-mixed"};
}

KnownCase known_case(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "rho1-diagonal") return rho1_diagonal();
  if (name == "two-block-mixed") return two_block_mixed();
  throw Error(ErrorKind::UnknownCase, "unknown case: " + name);
}

}  // namespace jordanperturb
