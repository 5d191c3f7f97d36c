// cotred: run reduction experiments from a JSON config.
//
//   cotred simulate CONFIG        trajectory CSV + manifest
//   cotred phase CONFIG           phase report JSON + manifest
//   cotred kaluza-compare CONFIG  Kaluza-Klein comparison JSON + manifest
//   cotred batch FILE             fan out {"command", "configs"} in parallel
//   cotred selftest               reduced-scale invariant suites

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cotred/app/commands.hpp"
#include "cotred/app/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cotangent-bundle reduction experiments"};
  app.set_version_flag("--version", std::string(COTRED_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string manifest;
  auto add_run = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--manifest", manifest, "manifest path (overrides output.manifest)");
    return sub;
  };
  auto* simulate = add_run("simulate", "integrate the unreduced system and write a CSV trajectory");
  auto* phase = add_run("phase", "reconstruction phase of a periodic orbit, all formulas vs. direct");
  auto* kaluza = add_run("kaluza-compare", "compare Lorentz, Answer 1/2 and Kaluza-Klein dynamics");

  std::string batch_file;
  std::string batch_output;
  auto* batch = app.add_subcommand("batch", "run one command over many configs in parallel");
  batch->add_option("file", batch_file, "JSON {\"command\": ..., \"configs\": [...]}")
      ->required()
      ->check(CLI::ExistingFile);
  batch->add_option("-o,--output", batch_output, "merged results path");

  std::string fault;
  auto* selftest = app.add_subcommand("selftest", "run the reduced-scale invariant suites");
  selftest->add_option("--inject-fault", fault, "mutation check")->check(CLI::IsMember({"euler-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cotred::app::exit_code::config_error;
  }

  if (selftest->parsed()) {
    cotred::app::SelftestOptions options;
    options.flip_euler_sign = (fault == "euler-sign");
    return cotred::app::report_selftest(cotred::app::run_selftest(options), std::cout);
  }
  if (batch->parsed()) return cotred::app::execute_batch(batch_file, batch_output, std::cerr);
  const std::string command = simulate->parsed() ? "simulate" : phase->parsed() ? "phase" : "kaluza-compare";
  (void)kaluza;
  return cotred::app::execute(command, config, manifest, std::cerr);
}
