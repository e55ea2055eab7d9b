#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tweetmine/pipeline.hpp"

namespace {

using nlohmann::json;

// "a.b.c=value" applied onto the config tree; the value is parsed as JSON
// when possible and taken as a string otherwise.
void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw tweetmine::ConfigError("--set", "expected key.path=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* cur = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string part =
        path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty())
      throw tweetmine::ConfigError("--set", "empty key segment in " + path);
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      break;
    }
    if (!cur->contains(part) || !(*cur)[part].is_object())
      (*cur)[part] = json::object();
    cur = &(*cur)[part];
    pos = dot + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tweet corpus mining and predictive modeling pipeline"};
  app.get_formatter()->column_width(30);

  std::string stage;
  std::string config_path = "config.json";
  std::vector<std::string> overrides;
  std::string out_dir;
  std::int64_t seed = -1;

  std::vector<std::string> stages = tweetmine::stage_names();
  stages.push_back("all");
  app.add_option("stage", stage, "pipeline stage to run")
      ->required()
      ->check(CLI::IsMember(stages));
  app.add_option("-c,--config", config_path, "pipeline config file (JSON)");
  app.add_option("-s,--set", overrides,
                 "override a config value, e.g. --set model.horizon=2");
  app.add_option("-o,--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "root seed (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    std::ifstream in(config_path);
    if (!in)
      throw tweetmine::ConfigError("config", "cannot open " + config_path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
      throw tweetmine::ConfigError("config",
                                   "not a valid JSON object: " + config_path);
    for (const auto& o : overrides) apply_override(doc, o);
    if (!out_dir.empty()) doc["output_dir"] = out_dir;
    if (seed >= 0) doc["seed"] = static_cast<std::uint64_t>(seed);

    const auto base =
        std::filesystem::path(config_path).parent_path().string();
    const auto cfg = tweetmine::PipelineConfig::from_json(doc, base);
    tweetmine::run_stage(cfg, stage, std::cerr);
    return 0;
  } catch (const tweetmine::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
