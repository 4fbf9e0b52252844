#include <complex>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jordanperturb/commands.hpp"

namespace jp = jordanperturb;

namespace {

// "-" writes to stdout
void emit(const std::string& path, const std::string& text) {
  if (path == "-") std::cout << text;
  else jp::save_text(path, text);
}

int finish(const jp::CommandOutput& out, const std::string& json_path) {
  if (json_path != "-") std::cout << out.text;
  if (!json_path.empty()) emit(json_path, jp::canonical_dump(out.json));
  return out.exit_code;
}

jp::Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw jp::Error(jp::ErrorKind::InvalidArgument, "expected RE[,IM], got " + s);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-order perturbation expansions at a defective eigenvalue"};
  app.require_subcommand(1);

  std::string file, json_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", file, "problem file (JSON)")->required();
    sub->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
  };

  auto* analyze = app.add_subcommand("analyze", "structure, genericity and leading spectra");
  add_common(analyze);
  jp::AnalyzeOptions aopt;
  analyze->add_option("--rho", aopt.rhos, "block sizes to analyze (default: all)")->delimiter(',');
  analyze->add_option("--threshold", aopt.threshold, "sigma_min threshold for W_i");

  auto* expand = app.add_subcommand("expand", "eigenvalue and invariant subspace expansion");
  add_common(expand);
  jp::ExpandOptions eopt;
  eopt.roots.clear();
  expand->add_option("--rho", eopt.rho, "Jordan block size")->required();
  expand->add_option("--cluster", eopt.cluster, "idx:I[,J..] | val:RE,IM[,RADIUS] | all");
  expand->add_option("--root", eopt.roots, "root branch per selected cluster")->delimiter(',');
  expand->add_option("--order", eopt.order, "0 or 1")->check(CLI::IsMember({0, 1}));

  auto* verify = app.add_subcommand("verify", "check predictions against a dense eigensolver");
  add_common(verify);
  jp::VerifyOptions vopt;
  std::optional<int> vrho;
  std::string csv_path;
  verify->add_option("--rho", vrho, "Jordan block size (default: all)");
  verify->add_option("--tmin", vopt.t_min, "smallest t");
  verify->add_option("--tmax", vopt.t_max, "largest t");
  verify->add_option("--points", vopt.points, "sweep points");
  verify->add_option("--csv", csv_path, "write quantity,t,error rows here ('-' for stdout)");
  verify->add_option("--perturb-h1", vopt.perturb_h1, "test hook: add noise of this norm to H1");
  verify->add_option("--branch-shift", vopt.branch_shift, "test hook: use a rotated root branch");

  auto* gen = app.add_subcommand("generate", "write a seeded random problem file");
  jp::GenerateOptions gopt;
  std::string out_path = "-", lambda0 = "0";
  gen->add_option("--sizes", gopt.sizes, "s_1,...,s_k")->delimiter(',')->required();
  gen->add_option("--seed", gopt.seed, "random seed");
  gen->add_option("--scale", gopt.scale, "perturbation scale");
  gen->add_option("--lambda0", lambda0, "RE[,IM]");
  gen->add_option("--out", out_path, "output file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? jp::kExitOk : jp::kExitPrecondition;
  }

  try {
    if (*gen) {
      gopt.lambda0 = parse_complex(lambda0);
      emit(out_path, jp::write_problem(jp::cmd_generate(gopt)));
      return jp::kExitOk;
    }
    const jp::ProblemFile problem = jp::read_problem(file);
    if (*analyze) return finish(jp::cmd_analyze(problem, aopt), json_path);
    if (*expand) {
      if (eopt.roots.empty()) eopt.roots = {0};
      return finish(jp::cmd_expand(problem, eopt), json_path);
    }
    vopt.rho = vrho;
    const jp::CommandOutput out = jp::cmd_verify(problem, vopt);
    if (!csv_path.empty()) emit(csv_path, out.csv);
    return finish(out, json_path);
  } catch (const jp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return jp::exit_code_for(e.kind());
  }
}
