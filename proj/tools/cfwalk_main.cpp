// Command-line front end: analyze, export and validate run configs.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cfwalk/errors.hpp"
#include "cfwalk/report.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cfwalk::ConfigurationError("cli-report", "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone types, path grammars and return probabilities of random walks on labelled graphs"};
  app.require_subcommand(1);

  std::string config_path, what, out_dir;
  int series_n = -1;
  double tol = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--series-n", series_n, "series length N");
    sub->add_option("--tol", tol, "classification tolerance");
    sub->add_option("--out-dir", out_dir, "output directory");
  };
  auto* analyze = app.add_subcommand("analyze", "full pipeline and report.json");
  add_common(analyze);
  auto* exporter = app.add_subcommand("export", "write one artifact");
  add_common(exporter);
  exporter->add_option("--what", what, "ball-dot, types-dot, grammar, series-csv, depgraph-dot, types-json, grammar-json, lambda-csv")
      ->required();
  auto* validate = app.add_subcommand("validate", "exactness and structure checks only");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto config = cfwalk::load_config(config_path);
    if (series_n >= 0) {
      if (series_n < 200) throw cfwalk::ConfigurationError("cli-report", "--series-n must be >= 200");
      config.series_n = series_n;
      config.n_ball = std::min(config.n_ball, series_n);
    }
    if (tol >= 0) {
      if (!(tol > 0)) throw cfwalk::ConfigurationError("cli-report", "--tol must be positive");
      config.classify_tol = tol;
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    const fs::path dir(config.output_dir);

    if (*exporter) {
      for (const auto& [name, text] : cfwalk::run_export(config, what)) {
        write_file(dir / name, text);
        std::cout << (dir / name).string() << "\n";
      }
      return 0;
    }
    const auto report = *analyze ? cfwalk::run_analyze(config) : cfwalk::run_validate(config);
    write_file(dir / (*analyze ? "report.json" : "validate.json"), report.json);
    std::cout << report.summary;
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfwalk::exit_code_for(e);
  }
}
