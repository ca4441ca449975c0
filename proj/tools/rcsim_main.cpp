// rcsim: run self-triggered resilient consensus scenarios and check graphs.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rcsim/cli.hpp"

namespace {

void add_generator_options(CLI::App* cmd, rcsim::GeneratorSpec& spec) {
  cmd->add_option("--n", spec.n, "Node count (complete)");
  cmd->add_option("--lambda", spec.lambda, "Clique size minus one (clique_core)");
  cmd->add_option("--k", spec.k, "Nodes attached to the whole clique (clique_core)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-triggered resilient consensus simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  bool assert_verdicts = false;
  bool batch_traces = false;
  std::size_t seeds = 1;

  auto* run = app.add_subcommand("run", "Simulate one scenario file; writes trace.csv, dense.csv, summary.json");
  run->add_option("scenario", scenario, "Scenario file (YAML)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--assert", assert_verdicts, "Exit 1 when a verdict fails");

  auto* batch = app.add_subcommand("batch", "Run consecutive seeds of a scenario file and aggregate the verdicts");
  batch->add_option("scenario", scenario, "Scenario file (YAML)")->required();
  batch->add_option("--seeds", seeds, "Number of seeds, starting at the file's run.seed")->required();
  batch->add_option("--out", out_dir, "Output directory");
  batch->add_flag("--assert", assert_verdicts, "Exit 1 unless every seed passes");
  batch->add_flag("--traces", batch_traces, "Also write trace.csv and dense.csv per seed");

  rcsim::cli::GraphSource check_source;
  std::string check_path;
  std::size_t F = 0;
  std::string variant = "generic";
  auto* check = app.add_subcommand("check-graph", "Check the common-neighbor condition for a misbehavior budget F");
  check->add_option("graph", check_path, "Edge-list file");
  check->add_option("--generator", check_source.generator.name, "clique_core | complete | fig1 | fig1_reduced");
  add_generator_options(check, check_source.generator);
  check->add_option("--F", F, "Misbehavior budget")->required();
  check->add_option("--variant", variant, "generic (3F+1) | acq_timing (2F+1)");

  rcsim::GeneratorSpec gen_spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-graph", "Write a generated topology as an edge list");
  gen->add_option("generator", gen_spec.name, "clique_core | complete | fig1 | fig1_reduced")->required();
  add_generator_options(gen, gen_spec);
  gen->add_option("--out", gen_out, "Output edge-list path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rcsim::cli::kInvalidInput;
  }

  if (run->parsed()) return rcsim::cli::cmd_run(scenario, out_dir, assert_verdicts, std::cout, std::cerr);
  if (batch->parsed()) {
    return rcsim::cli::cmd_batch(scenario, seeds, out_dir, assert_verdicts, batch_traces, std::cout, std::cerr);
  }
  if (check->parsed()) {
    if (!check_path.empty()) check_source.path = check_path;
    if (!check_source.path && check_source.generator.name.empty()) {
      std::cerr << "check-graph needs an edge-list file or --generator\n";
      return rcsim::cli::kInvalidInput;
    }
    return rcsim::cli::cmd_check_graph(check_source, F, variant, std::cout, std::cerr);
  }
  return rcsim::cli::cmd_gen_graph(gen_spec, gen_out, std::cout, std::cerr);
}
