#include <iostream>

#include "CLI11.hpp"

#include "axivort/cli.hpp"

int main(int argc, char** argv) {
  using namespace axivort::cli;

  CLI::App app{"Axisymmetric vortex ring asymptotics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  BasisOptions basis;
  auto* basis_cmd = app.add_subcommand("basis", "Tabulate eigenmodes and check orthonormality and eigenrelations");
  basis_cmd->add_option("--max-level", basis.max_level, "Highest level 2*lambda")->capture_default_str();
  basis_cmd->add_option("--quad-nodes", basis.quad_nodes, "Gauss nodes per direction")->capture_default_str();
  basis_cmd->add_option("--out", basis.out, "Output directory")->capture_default_str();

  std::string config;
  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the rescaled vorticity equation from a config file");
  evolve_cmd->add_option("config", config, "INI configuration")->required();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run an acceptance suite and write a JSON summary");
  verify_cmd->add_option("--suite", verify.suite, "basis, linear, nonlinear, corollaries, inequalities or all")
      ->capture_default_str();
  verify_cmd->add_option("--n", verify.n, "Grid cells per direction")->capture_default_str();
  verify_cmd->add_option("--dt", verify.dt, "Time step")->capture_default_str();
  verify_cmd->add_option("--t-end", verify.t_end, "Final rescaled time")->capture_default_str();
  verify_cmd->add_option("--out", verify.out, "Output directory (default: output root/verify)");

  std::string run_dir, format = "csv";
  auto* report_cmd = app.add_subcommand("report", "Emit decay curves and fitted rates for a run directory");
  report_cmd->add_option("run_dir", run_dir, "Directory written by evolve")->required();
  report_cmd->add_option("--format", format, "csv, json or gnuplot")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  if (*basis_cmd) return cmd_basis(basis, std::cout, std::cerr);
  if (*evolve_cmd) return cmd_evolve(config, std::cout, std::cerr);
  if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
  return cmd_report(run_dir, format, std::cout, std::cerr);
}
