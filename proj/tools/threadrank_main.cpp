/**
 * Copyright (c) 2026 the threadrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * threadrank CLI: each pipeline stage is a subcommand. A config file
 * provides the defaults; any --key flags override it. Exit codes: 0 ok,
 * 1 validation problem (bad config, missing input or upstream artifact),
 * 2 runtime failure.
 */

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "threadrank/pipeline.hpp"
#include "threadrank/util.hpp"

namespace {

constexpr const char* kStages[] = {"synth",    "ingest",  "extract",
                                   "train",    "evaluate", "posthoc",
                                   "users",    "report"};

int fail_validation(const std::vector<std::string>& errors) {
  std::cerr << "configuration errors:\n";
  for (const auto& e : errors) std::cerr << "  - " << e << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threadrank: rank community discussion comments and analyze "
               "what separates high scorers from low scorers"};
  app.set_version_flag("--version", std::string(threadrank::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  for (const char* stage : kStages) {
    CLI::App* sub = app.add_subcommand(stage, std::string("run the ") + stage +
                                                  " stage");
    sub->add_option("-c,--config", config_path,
                    "key = value config file (see data/example.conf)");
    sub->add_option(
        "-s,--set", overrides,
        "override one config key, e.g. --set outdir=/tmp/run (repeatable)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string stage = app.get_subcommands().front()->get_name();

  std::vector<std::string> errors;
  threadrank::pipeline::RunConfig config;
  if (!config_path.empty()) {
    config = threadrank::pipeline::load_config(config_path, errors);
  }
  for (const auto& assignment : overrides) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
      errors.push_back("--set expects key=value, got '" + assignment + "'");
      continue;
    }
    config.apply(std::string(threadrank::trim(assignment.substr(0, eq))),
                 std::string(threadrank::trim(assignment.substr(eq + 1))),
                 errors);
  }
  config.collect_errors(errors);
  if (config.outdir.empty()) {
    errors.push_back("config key 'outdir' is required");
  }
  if (!errors.empty()) return fail_validation(errors);

  try {
    threadrank::pipeline::run_stage(stage, config);
  } catch (const threadrank::ValidationError& e) {
    return fail_validation({e.what()});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
