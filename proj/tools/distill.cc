//
// Copyright 2026 The bilstm-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line entry point: one subcommand per pipeline stage.
//
// Settings come from, in increasing precedence, built-in defaults, the file
// named by $DISTILL_CONFIG, the file given with --config, and flags.

#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "distill/commands.h"
#include "distill/config.h"

namespace {

using Command = std::function<void(const distill::RunConfig&, std::ostream&)>;

struct Subcommand {
  const char* name;
  const char* help;
  Command run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BiLSTM students distilled from teacher logits"};
  app.require_subcommand(1);
  app.fallthrough();  // --config may follow the subcommand
  std::string config_file;
  app.add_option("--config", config_file, "configuration file of 'key = value' lines");

  const Subcommand subs[] = {
      {"augment", "write an augmented tagged corpus", distill::cmd_augment},
      {"label", "attach teacher logits to a corpus as transfer JSONL", distill::cmd_label},
      {"train", "train a student (baseline or distill)", distill::cmd_train},
      {"eval", "report accuracy and F1 of a checkpoint", distill::cmd_eval},
      {"bench", "time batched inference of a checkpoint", distill::cmd_bench},
      {"synth", "generate the synthetic token-pattern task", distill::cmd_synth},
  };

  // Flag values, keyed by config key; only flags actually given are applied.
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, Command> commands;
  for (const Subcommand& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    commands[s.name] = s.run;
    for (const distill::ConfigKey& key : distill::RunConfig::keys()) {
      const std::string name(key.name);
      std::string help(key.help);
      if (!key.default_value.empty()) help += " (default " + std::string(key.default_value) + ")";
      options[std::string(s.name) + "/" + name] =
          sub->add_option("--" + name, flags[std::string(s.name) + "/" + name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    distill::RunConfig config;
    if (const char* env = std::getenv(distill::kConfigEnvVar); env != nullptr && *env != '\0') {
      config.merge_file(env);
    }
    if (!config_file.empty()) config.merge_file(config_file);
    for (CLI::App* sub : app.get_subcommands()) {
      const std::string prefix = sub->get_name() + "/";
      for (const distill::ConfigKey& key : distill::RunConfig::keys()) {
        const std::string id = prefix + std::string(key.name);
        if (options[id]->count() > 0) config.set(key.name, flags[id]);
      }
      commands[sub->get_name()](config, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
