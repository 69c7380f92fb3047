// Copyright 2026 The scilist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scilist/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 2, kStage = 3, kRuntime = 4 };

struct Command {
  CLI::App* app;
  std::vector<scilist::Stage> stages;
  std::string config;
  std::map<std::string, std::string> overrides;
};

void add_setting_flags(Command& cmd) {
  for (const auto& s : scilist::settings()) {
    bool used = false;
    for (auto st : cmd.stages) used = used || s.stages.count(st);
    if (!used) continue;
    std::string help = s.help;
    if (s.fallback) help += " [default: " + *s.fallback + "]";
    if (!s.choices.empty()) {
      help += " {";
      for (std::size_t i = 0; i < s.choices.size(); ++i) help += (i ? "|" : "") + s.choices[i];
      help += "}";
    }
    help += " (" + s.key + ")";
    cmd.app->add_option("--" + s.flag, cmd.overrides[s.key], help);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using scilist::Stage;
  CLI::App app{"Discover, classify and analyse scientists on a social platform"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scilist::pipeline::kToolVersion);

  std::vector<Command> commands;
  commands.reserve(std::size(scilist::kStages) + 1);
  for (Stage s : scilist::kStages) {
    const std::string name(scilist::to_string(s));
    commands.push_back({app.add_subcommand(name, "run the " + name + " stage"), {s}, {}, {}});
  }
  commands.push_back({app.add_subcommand("all", "run every stage in order"),
                      std::vector<Stage>(std::begin(scilist::kStages), std::end(scilist::kStages)), {}, {}});
  for (auto& cmd : commands) {
    cmd.app->add_option("-c,--config", cmd.config, "INI configuration file");
    add_setting_flags(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      scilist::PipelineConfig cfg;
      if (!cmd.config.empty()) cfg = scilist::PipelineConfig::from_ini(cmd.config);
      for (const auto& [key, value] : cmd.overrides) {
        if (cmd.app->count("--" + scilist::setting(key).flag)) cfg.set(key, value);
      }
      scilist::pipeline::run(cmd.stages, cfg);
      return kOk;
    } catch (const scilist::ConfigError& e) {
      std::cerr << "configuration error:\n";
      for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
      return kUsage;
    } catch (const scilist::StageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kStage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kRuntime;
    }
  }
  return kUsage;
}
