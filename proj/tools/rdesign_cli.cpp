// Command-line front end: rdesign <solve|sample|bounds|validate|exp-e|exp-bai>
//   --config <path> --out <path> --seed <u64>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rdesign/error.hpp"
#include "rdesign/harness.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

rdesign::Json load_config(const std::string& path) {
  if (path.empty()) return rdesign::Json::object();
  std::ifstream in(path);
  if (!in) throw rdesign::UsageError("cannot open config file '" + path + "'");
  try {
    return rdesign::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw rdesign::UsageError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized E- and G-optimal experimental design toolkit"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"solve", "sample", "bounds", "validate", "exp-e", "exp-bai"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--seed", seed, "master seed, overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    rdesign::Json config = load_config(config_path);
    if (!config.is_object()) throw rdesign::UsageError("config must be a JSON object");
    if (seed) config["master_seed"] = *seed;
    const std::string text = rdesign::run_command(command, config);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
      out << text;
      if (!out) throw std::runtime_error("failed writing '" + out_path + "'");
    }
  } catch (const rdesign::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rdesign::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
