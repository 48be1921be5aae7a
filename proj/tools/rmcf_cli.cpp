// rmcf: command line driver.
//
//   rmcf run <config> [--resume <checkpoint>] [--no-plots]
//   rmcf verify <config>
//   rmcf sweep <config>
//   rmcf plot <csv> [--column name]... [--linear]
//
// Output goes to $RMCF_OUTPUT_DIR (default ./rmcf_out). Exit codes: 0 success,
// 1 usage or input error, 2 Undetermined with require_outcome set, 3 aborted.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmcf/checkpoint.hpp"
#include "rmcf/config.hpp"
#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/plot.hpp"
#include "rmcf/scenario.hpp"
#include "rmcf/sweep.hpp"

namespace {

std::string output_dir() {
  const char* env = std::getenv("RMCF_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? env : "rmcf_out";
}

// Tees log lines to stderr and <dir>/<stem>.log.
class Log {
 public:
  Log(const std::string& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    file_.open(std::filesystem::path(dir) / (stem + ".log"));
  }
  void flush_to(const std::string& text) {
    std::cerr << text;
    file_ << text;
  }
  std::ostringstream buffer;
  ~Log() { flush_to(buffer.str()); }

 private:
  std::ofstream file_;
};

int cmd_run(const std::string& path, const std::string& resume, bool plots) {
  const rmcf::FlowConfig config = rmcf::load_config(path);
  const std::string dir = output_dir();
  Log log(dir, config.scenario);
  rmcf::RunOptions opt;
  opt.out_dir = dir;
  opt.log = &log.buffer;
  opt.plots = plots;
  if (!resume.empty()) opt.resume = rmcf::load_checkpoint_file(resume);
  const rmcf::ScenarioResult r = rmcf::run_scenario(config, opt);
  rmcf::write_verify_table(std::cout, r.checks);
  std::cout << "outcome " << rmcf::to_string(r.outcome) << (r.aborted ? " (aborted)" : "") << '\n';
  return rmcf::exit_code(config, r);
}

int cmd_verify(const std::string& path) {
  const rmcf::FlowConfig config = rmcf::load_config(path);
  const std::string dir = output_dir();
  Log log(dir, config.scenario + "_verify");
  for (const auto& d : config.defaults_applied) log.buffer << "default " << d << '\n';
  const auto rows = rmcf::verify_suite(config);
  rmcf::write_verify_table(std::cout, rows);
  std::ofstream csv(std::filesystem::path(dir) / (config.scenario + "_verify.csv"));
  rmcf::write_verify_csv(csv, rows);
  std::ofstream txt(std::filesystem::path(dir) / (config.scenario + "_verify.txt"));
  rmcf::write_verify_table(txt, rows);
  return 0;
}

int cmd_sweep(const std::string& path) {
  const rmcf::FlowConfig config = rmcf::load_config(path);
  const std::string dir = output_dir();
  Log log(dir, config.scenario + "_sweep");
  for (const auto& d : config.defaults_applied) log.buffer << "default " << d << '\n';
  const rmcf::SweepResult r = rmcf::run_sweep(config, dir);
  std::ofstream csv(std::filesystem::path(dir) / (config.scenario + "_sweep.csv"));
  rmcf::write_sweep_csv(csv, r);
  rmcf::write_sweep_csv(std::cout, r);
  for (const auto& c : r.cells)
    if (c.status == "aborted") log.buffer << "cell " << c.index << " aborted: " << c.reason << '\n';
  if (!r.axes.empty() && r.axes.front().key == "rho0")
    log.buffer << "monotone boundary along rho0: " << (rmcf::monotone_boundary(r, "rho0") ? "yes" : "no") << '\n';
  return r.aborted() > 0 ? 3 : 0;
}

int cmd_plot(const std::string& path, const std::vector<std::string>& columns, bool linear) {
  std::ifstream in(path);
  if (!in) throw rmcf::Error("cannot open " + path);
  const rmcf::CsvTable table = rmcf::read_csv(in);
  std::vector<rmcf::PlotSpec> specs;
  if (columns.empty()) {
    specs = rmcf::default_plot_specs(table);
  } else {
    for (const auto& c : columns) specs.push_back({c, !linear && rmcf::is_decay_quantity(c)});
  }
  if (linear)
    for (auto& s : specs) s.log_scale = false;
  const std::string stem = std::filesystem::path(path).stem().string();
  for (const auto& f : rmcf::emit_plots(table, specs, output_dir(), stem)) std::cout << f << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled normalized Ricci flow and mean curvature flow of rotationally symmetric hypersurfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string resume;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--resume", resume, "Checkpoint to resume from");
  run->add_flag("--no-plots", no_plots, "Skip SVG output");

  auto* verify = app.add_subcommand("verify", "Identity residuals, refinement orders and oracle checks");
  verify->add_option("config", config_path, "Config file")->required();

  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of the [sweep] axes");
  sweep->add_option("config", config_path, "Config file")->required();

  std::string csv_path;
  std::vector<std::string> columns;
  bool linear = false;
  auto* plot = app.add_subcommand("plot", "SVG plots of a monitor CSV");
  plot->add_option("csv", csv_path, "Monitor CSV")->required();
  plot->add_option("--column", columns, "Columns to plot (default: all)");
  plot->add_flag("--linear", linear, "Linear axes for every plot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, resume, !no_plots);
    if (*verify) return cmd_verify(config_path);
    if (*sweep) return cmd_sweep(config_path);
    if (*plot) return cmd_plot(csv_path, columns, linear);
  } catch (const rmcf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
