// Batch experiment runner: reads a key = value config, runs the sweep and
// writes CSV / gnuplot files.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "stmrta/config.hpp"
#include "stmrta/sweep.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synchronous-transmission multi-robot task allocation simulator"};
  std::filesystem::path config_path;
  std::filesystem::path trace_path;
  std::filesystem::path out_dir = "out";
  app.add_option("--config", config_path, "key = value experiment file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* trace_opt = app.add_option("--trace", trace_path, "write per-slot round logs here");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = stmrta::load_config(config_path);
    std::optional<std::filesystem::path> trace_dir;
    if (trace_opt->count() > 0) trace_dir = trace_path;
    const auto rows = stmrta::run_sweep(cfg, trace_dir);
    stmrta::write_outputs(cfg, rows, out_dir);
    std::cout << rows.size() << " runs written to " << out_dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
