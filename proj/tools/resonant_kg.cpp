#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rkg/runner.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_usage = 1;
constexpr int exit_threshold = 2;

void print_verdicts(const rkg::RunSummary& s) {
  for (const auto& v : s.verdicts) {
    std::printf("%-4s %-28s %.6g %s %.6g\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.value, v.relation.c_str(),
                v.threshold);
  }
  std::printf("%s: %s (%.1f s)\n", rkg::to_string(s.experiment), s.pass() ? "pass" : "FAIL", s.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonant Klein-Gordon experiments"};
  std::string experiment, config_path, out_dir;
  std::vector<std::string> overrides;
  app.add_option("experiment", experiment, "cauchy | scatter | resonance | poincare | poincare-check | asymptotics")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--override", overrides, "key.path=value, value parsed as JSON when possible")->take_all();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_pass : exit_usage;
  }

  rkg::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw rkg::ConfigError("/", "cannot read " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw rkg::ConfigError("/", "malformed JSON in " + config_path);
    doc["experiment"] = experiment;
    if (!out_dir.empty()) doc["output"]["dir"] = out_dir;
    for (const auto& o : overrides) rkg::apply_override(doc, o);
    cfg = rkg::parse_config(doc);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    const rkg::RunSummary s = rkg::run(cfg);
    print_verdicts(s);
    return s.pass() ? exit_pass : exit_threshold;
  } catch (const rkg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
}
