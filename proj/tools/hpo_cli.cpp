#include <CLI11.hpp>

#include <iostream>

#include "hpo/cli/commands.hpp"
#include "hpo/core/errors.hpp"

using namespace hpo;

int main(int argc, char** argv) {
  CLI::App app{"Hyperparameter optimization runs, nested evaluation and tuner benchmarks"};
  app.require_subcommand(1);

  std::string config_path, level, out, report_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--level", level, "parallelization level")
        ->check(CLI::IsMember({"outer", "batch", "config", "fold", "combined"}));
    sub->add_option("--out", out, "output directory");
  };
  auto* tune_cmd = app.add_subcommand("tune", "tune one learner or synthetic objective");
  auto* nested_cmd = app.add_subcommand("nested", "nested resampling of a self-tuning learner");
  auto* bench_cmd = app.add_subcommand("benchmark", "compare tuners under one budget");
  auto* report_cmd = app.add_subcommand("report", "summarize an archive");
  for (auto* s : {tune_cmd, nested_cmd, bench_cmd}) add_common(s);
  report_cmd->add_option("archive", report_path, "archive.jsonl or a run directory")->required();
  report_cmd->add_option("--out", out, "write report.json and report.txt here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report_cmd) {
      cmd_report(report_path, out.empty() ? std::nullopt : std::optional<std::string>(out), std::cout);
      return 0;
    }
    Overrides ov;
    ov.seed = seed;
    ov.workers = workers;
    if (!level.empty()) ov.level = parse_parallel_level(level);
    if (!out.empty()) ov.out = out;
    const auto doc = read_json_file(config_path);
    if (*tune_cmd) cmd_tune(parse_run_config(doc, ov), std::cout);
    else if (*nested_cmd) cmd_nested(parse_run_config(doc, ov), std::cout);
    else cmd_benchmark(parse_benchmark_config(doc, ov), std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
