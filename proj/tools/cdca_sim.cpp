// cdca_sim — command-line front end for the highway congestion simulator.
//
// Subcommands:
//   run      — execute a scenario, write metrics.csv / events.csv /
//              config_echo.cfg into --out
//   plot     — render an SVG chart from one or two metrics.csv files
//   validate — parse and validate a scenario file
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration or input,
// 3 runtime failure (invariant breach, I/O).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdca/chart.hpp"
#include "cdca/engine.hpp"
#include "cdca/metrics.hpp"
#include "cdca/scenario.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string cdca_mode;  // "", "on", "off"
  double duration = 0.0;
  bool duration_set = false;
  bool no_cessation = false;
  double threshold = 0.0;
  bool threshold_set = false;
};

int do_run(const RunArgs& args) {
  cdca::ScenarioConfig config = cdca::load_scenario(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  if (args.cdca_mode == "on") config.cdca_enabled = true;
  if (args.cdca_mode == "off") config.cdca_enabled = false;
  if (args.duration_set) config.duration = args.duration;
  if (args.no_cessation) config.cessation_enabled = false;
  if (args.threshold_set) config.congestion_threshold = args.threshold;
  cdca::validate(config);

  const cdca::RunResult result = cdca::run(config);
  cdca::write_outputs(result.series, result.log, result.config_echo,
                      args.out_dir);
  std::cout << "ticks=" << result.series.size()
            << " blocked=" << result.blocked_final
            << " congested=" << result.congested_final
            << " messages=" << result.messages_total
            << " diversions=" << result.diversions_total << "\n";
  return 0;
}

int do_plot(const std::string& kind_name,
            const std::vector<std::string>& inputs,
            const std::string& out_path) {
  cdca::ChartKind kind = cdca::ChartKind::congestion_vs_time;
  if (kind_name == "congestion_vs_time") {
    kind = cdca::ChartKind::congestion_vs_time;
  } else if (kind_name == "speed_histogram") {
    kind = cdca::ChartKind::speed_histogram;
  } else if (kind_name == "overhead_vs_time") {
    kind = cdca::ChartKind::overhead_vs_time;
  }
  cdca::render_chart(inputs, kind, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int do_validate(const std::string& config_path) {
  cdca::load_scenario(config_path);
  std::cout << config_path << ": OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Highway congestion warning and diversion simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario");
  run_cmd->add_option("--config", run_args.config_path, "Scenario file")
      ->required();
  run_cmd->add_option("--out", run_args.out_dir, "Output directory")
      ->required();
  CLI::Option* seed_opt =
      run_cmd->add_option("--seed", run_args.seed, "Override the RNG seed");
  run_cmd->add_option("--cdca", run_args.cdca_mode,
                      "Enable or disable the warning protocol")
      ->check(CLI::IsMember({"on", "off"}));
  CLI::Option* duration_opt = run_cmd->add_option(
      "--duration", run_args.duration, "Override the run duration (s)");
  run_cmd->add_flag("--no-cessation", run_args.no_cessation,
                    "Keep rebroadcasting after diversion (overhead baseline)");
  CLI::Option* threshold_opt = run_cmd->add_option(
      "--threshold", run_args.threshold,
      "Congestion speed threshold in m/s (default 0: exact standstill)");

  std::string kind_name;
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render an SVG chart");
  plot_cmd
      ->add_option("--kind", kind_name, "Chart kind")
      ->required()
      ->check(CLI::IsMember(
          {"congestion_vs_time", "speed_histogram", "overhead_vs_time"}));
  plot_cmd
      ->add_option("--in", plot_inputs,
                   "metrics.csv input (repeat for a second series)")
      ->required()
      ->expected(1, 2);
  plot_cmd->add_option("--out", plot_out, "SVG output path")->required();

  std::string validate_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("--config", validate_path, "Scenario file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  run_args.seed_set = seed_opt->count() > 0;
  run_args.duration_set = duration_opt->count() > 0;
  run_args.threshold_set = threshold_opt->count() > 0;

  try {
    if (run_cmd->parsed()) return do_run(run_args);
    if (plot_cmd->parsed()) return do_plot(kind_name, plot_inputs, plot_out);
    if (validate_cmd->parsed()) return do_validate(validate_path);
  } catch (const cdca::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cdca::SchemaMismatchError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const cdca::RuntimeBreachError& e) {
    std::cerr << "runtime breach: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
