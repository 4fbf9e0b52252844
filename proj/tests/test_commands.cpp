#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jordanperturb/commands.hpp"
#include "jordanperturb/generator.hpp"

using namespace jordanperturb;

namespace {

ProblemFile from_case(const std::string& name) {
  const KnownCase kc = known_case(name);
  ProblemFile p;
  p.lambda0 = kc.structure.lambda0();
  p.sizes = kc.structure.sizes();
  p.d11 = kc.d11;
  return p;
}

std::vector<Complex> complexes(const Json& list) {
  std::vector<Complex> out;
  for (const Json& z : list) out.push_back(complex_from_json(z, "test"));
  return out;
}

double dist(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return 1e300;
  return match_eigenvalues(a, b).max_error;
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "/jp_" + name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Analyze, Example1) {
  AnalyzeOptions opts;
  opts.rhos = {4};
  const CommandOutput out = cmd_analyze(from_case("example1"), opts);
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_TRUE(out.json["generic"].get<bool>());
  const Json& r = out.json["rhos"][0];
  EXPECT_EQ(matrix_from_json(r["w_rho"], "w"), ComplexMatrix::Ones(1, 1));
  const std::vector<Complex> expected{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  EXPECT_LT(dist(complexes(r["theta_spectrum"]), expected), 1e-12);
  EXPECT_NE(out.text.find("generic: yes"), std::string::npos);
}

TEST(Analyze, ZeroPerturbationIsNotGeneric) {
  ProblemFile p = from_case("example1");
  p.d11->setZero();
  const CommandOutput out = cmd_analyze(p);
  EXPECT_FALSE(out.json["generic"].get<bool>());
  EXPECT_EQ(out.exit_code, kExitPrecondition);
}

TEST(Analyze, GeneratedTwoGroupTable) {
  GenerateOptions g;
  g.sizes = {1, 1};
  g.seed = 7;
  const CommandOutput out = cmd_analyze(cmd_generate(g));
  ASSERT_EQ(out.json["sigma_min"].size(), 2u);
  const CanonicalPair pair = cmd_generate(g).canonical_pair();
  for (int i = 1; i <= 2; ++i)
    EXPECT_NEAR(out.json["sigma_min"][i - 1]["sigma_min"].get<double>(),
                smallest_singular_value(w_matrix(pair, i)), 1e-14);
  EXPECT_EQ(out.exit_code, kExitOk);
}

TEST(Expand, Example1FirstOrder) {
  ExpandOptions opts;
  opts.rho = 4;
  opts.order = 1;
  const CommandOutput out = cmd_expand(from_case("example1"), opts);
  const ComplexMatrix h0 = matrix_from_json(out.json["h0"], "h0");
  const ComplexMatrix h1 = matrix_from_json(out.json["h1"], "h1");
  EXPECT_LT((h0 - ComplexMatrix::Identity(4, 1)).norm(), 1e-12);
  ComplexMatrix e2 = ComplexMatrix::Zero(4, 1);
  e2(1, 0) = 1.0;
  EXPECT_LT((h1 - e2).norm(), 1e-12);
  EXPECT_LT(matrix_from_json(out.json["delta11"], "d").norm(), 1e-12);
  EXPECT_EQ(out.json["h_order_table"].size(), 4u);
}

TEST(Expand, OrderZeroHasNoFirstOrderKeys) {
  ExpandOptions opts;
  opts.rho = 2;
  const CommandOutput out = cmd_expand(from_case("two-block-mixed"), opts);
  EXPECT_FALSE(out.json.contains("delta11"));
  EXPECT_FALSE(out.json.contains("h1"));
  EXPECT_TRUE(out.json.contains("h0"));
}

TEST(Expand, TwoBlockMixed) {
  const KnownCase kc = known_case("two-block-mixed");
  ExpandOptions opts;
  opts.rho = 2;
  opts.cluster = "all";
  opts.order = 1;
  const CommandOutput out = cmd_expand(from_case("two-block-mixed"), opts);
  EXPECT_EQ(out.json["clusters"].size(), 2u);
  std::vector<Complex> gammas;
  for (const Json& e : out.json["eigenvalues"]) gammas.push_back(complex_from_json(e["gamma"], "g"));
  EXPECT_LT(dist(gammas, kc.gammas), 1e-12);
  // two selected roots: 5 x 2 subspace, groups 1 and 2 listed
  EXPECT_EQ(matrix_from_json(out.json["h0"], "h0").cols(), 2);
  EXPECT_EQ(matrix_from_json(out.json["h1"], "h1").rows(), 5);
  EXPECT_EQ(matrix_from_json(out.json["delta11"], "d").rows(), 2);
  EXPECT_EQ(out.json["h_order_table"].size(), 3u);
  EXPECT_EQ(out.json["x_order_table"].size(), 1u);
}

TEST(Expand, ClusterSelectors) {
  std::vector<GammaCluster> clusters{{Complex(1, 0), {Complex(1, 0)}},
                                     {Complex(2, 0), {Complex(2, 0), Complex(2.001, 0)}}};
  EXPECT_EQ(parse_cluster_selector("idx:1", clusters), std::vector<std::size_t>{1});
  EXPECT_EQ(parse_cluster_selector("idx:1,0", clusters), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(parse_cluster_selector("all", clusters), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(parse_cluster_selector("val:1,0", clusters), std::vector<std::size_t>{0});
  EXPECT_EQ(parse_cluster_selector("val:2,0,0.01", clusters), std::vector<std::size_t>{1});
  try {
    parse_cluster_selector("val:2,0,0.0005", clusters);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClusterNotSeparated);
  }
  EXPECT_THROW(parse_cluster_selector("idx:2", clusters), Error);
  EXPECT_THROW(parse_cluster_selector("val:9,9", clusters), Error);
  EXPECT_THROW(parse_cluster_selector("idx:x", clusters), Error);
  EXPECT_THROW(parse_cluster_selector("near:1", clusters), Error);
}

TEST(Verify, Example1PassesWithCsv) {
  VerifyOptions opts;
  const CommandOutput out = cmd_verify(from_case("example1"), opts);
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_TRUE(out.json["pass"].get<bool>());
  EXPECT_EQ(out.csv.rfind("quantity,t,error\r\n", 0), 0u);
  std::size_t rows = 0;
  for (const Json& rep : out.json["rhos"][0]["reports"]) rows += rep["samples"].size();
  std::size_t lines = 0;
  for (char c : out.csv) lines += c == '\n' ? 1 : 0;
  EXPECT_EQ(lines, rows + 1);
}

TEST(Verify, CorruptedH1Fails) {
  VerifyOptions opts;
  opts.perturb_h1 = 0.1;
  const CommandOutput out = cmd_verify(from_case("example1"), opts);
  EXPECT_EQ(out.exit_code, kExitVerifyFailed);
  bool residual_failed = false;
  for (const Json& rep : out.json["rhos"][0]["reports"])
    if (rep["quantity"].get<std::string>().rfind("residual/", 0) == 0 && !rep["pass"].get<bool>())
      residual_failed = true;
  EXPECT_TRUE(residual_failed);
}

TEST(Verify, TwoBlockMixedPasses) {
  const CommandOutput out = cmd_verify(from_case("two-block-mixed"), VerifyOptions{});
  for (const Json& r : out.json["rhos"])
    for (const Json& rep : r["reports"])
      EXPECT_TRUE(rep["pass"].get<bool>()) << rep["quantity"] << " " << rep["fitted_slope"];
  EXPECT_EQ(out.exit_code, kExitOk);
}

TEST(Generate, DeterministicAndRoundTrips) {
  GenerateOptions g;
  g.sizes = {2, 1, 1};
  g.seed = 3;
  const std::string a = write_problem(cmd_generate(g));
  EXPECT_EQ(a, write_problem(cmd_generate(g)));
  const ProblemFile back = parse_problem(a);
  EXPECT_EQ(write_problem(back), a);
  EXPECT_EQ(cmd_analyze(back).json["structure"]["k"].get<int>(), 3);
}

TEST(Generate, ZeroScaleGivesExample1Topology) {
  GenerateOptions g;
  g.sizes = {0, 0, 0, 1};
  g.scale = 0.0;
  ProblemFile p = cmd_generate(g);
  EXPECT_EQ(p.d11->norm(), 0.0);
  (*p.d11)(3, 0) = 1.0;  // the manual edit
  EXPECT_EQ(write_problem(p), write_problem(from_case("example1")));
}

TEST(Cli, ExitCodes) {
  const std::string ex1 = temp_path("ex1.json");
  save_text(ex1, write_problem(from_case("example1")));
  EXPECT_EQ(run_cli("analyze " + ex1 + " --rho 4"), kExitOk);
  EXPECT_EQ(run_cli("verify " + ex1), kExitOk);
  EXPECT_EQ(run_cli("verify " + ex1 + " --perturb-h1 0.1"), kExitVerifyFailed);
  EXPECT_EQ(run_cli("expand " + ex1 + " --rho 3"), kExitPrecondition);

  ProblemFile zero = from_case("example1");
  zero.d11->setZero();
  const std::string z = temp_path("zero.json");
  save_text(z, write_problem(zero));
  EXPECT_EQ(run_cli("analyze " + z), kExitPrecondition);

  const std::string bad = temp_path("bad.json");
  save_text(bad, "{\"lambda0\": [0, 0], \"sizes\": [1], \"d11\": [[[NaN, 0]]]}");
  EXPECT_EQ(run_cli("analyze " + bad), kExitParse);
  EXPECT_EQ(run_cli("analyze " + temp_path("missing.json")), kExitParse);
  EXPECT_EQ(run_cli("frobnicate"), kExitPrecondition);
  EXPECT_EQ(run_cli("--help"), kExitOk);
}

TEST(Cli, GenerateFilesAreStable) {
  const std::string a = temp_path("gen_a.json"), b = temp_path("gen_b.json");
  ASSERT_EQ(run_cli("generate --sizes 1,1 --seed 7 --out " + a), kExitOk);
  ASSERT_EQ(run_cli("generate --sizes 1,1 --seed 7 --out " + b), kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(run_cli("analyze " + a), kExitOk);
}

TEST(Cli, JsonAndCsvOutputs) {
  const std::string ex1 = temp_path("ex1b.json"), js = temp_path("out.json"),
                    csv = temp_path("out.csv");
  save_text(ex1, write_problem(from_case("example1")));
  ASSERT_EQ(run_cli("expand " + ex1 + " --rho 4 --order 1 --json " + js), kExitOk);
  const Json j = Json::parse(slurp(js));
  EXPECT_TRUE(j.contains("delta11"));
  EXPECT_EQ(canonical_dump(j), slurp(js));
  ASSERT_EQ(run_cli("verify " + ex1 + " --points 7 --csv " + csv), kExitOk);
  EXPECT_EQ(slurp(csv).rfind("quantity,t,error", 0), 0u);
}
