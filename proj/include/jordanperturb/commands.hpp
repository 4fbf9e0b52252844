#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jordanperturb/problem_io.hpp"
#include "jordanperturb/verify.hpp"

namespace jordanperturb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitParse = 3;

int exit_code_for(ErrorKind kind);

// Output of one subcommand: machine-readable JSON, a human-readable table and the exit code.
struct CommandOutput {
  Json json;
  std::string text;
  std::string csv;  // verify only
  int exit_code = kExitOk;
};

struct AnalyzeOptions {
  std::vector<int> rhos;  // empty: every valid rho
  double threshold = kDefaultGenericThreshold;
};

CommandOutput cmd_analyze(const ProblemFile& problem, const AnalyzeOptions& opts = {});

// Cluster selector: "idx:I[,J...]", "val:RE,IM[,RADIUS]" or "all".
std::vector<std::size_t> parse_cluster_selector(const std::string& selector,
                                                const std::vector<GammaCluster>& clusters);

struct ExpandOptions {
  int rho = 1;
  std::string cluster = "idx:0";
  std::vector<int> roots{0};  // one branch per selected cluster, or one for all
  int order = 0;
};

CommandOutput cmd_expand(const ProblemFile& problem, const ExpandOptions& opts);

struct VerifyOptions {
  std::optional<int> rho;  // empty: every valid rho
  double t_min = 1e-8;
  double t_max = 1e-2;
  int points = 13;
  double perturb_h1 = 0.0;  // negative-control hook
  int branch_shift = 0;     // negative-control hook
};

CommandOutput cmd_verify(const ProblemFile& problem, const VerifyOptions& opts);

Json report_to_json(const ConvergenceReport& rep);
// RFC-4180 rows quantity,t,error; z samples are converted back to t = z^rho.
std::string reports_to_csv(const std::vector<std::pair<int, ConvergenceReport>>& reports);

struct GenerateOptions {
  std::vector<Index> sizes;
  std::uint64_t seed = 0;
  double scale = 1.0;
  Complex lambda0{0.0, 0.0};
};

ProblemFile cmd_generate(const GenerateOptions& opts);

}  // namespace jordanperturb
