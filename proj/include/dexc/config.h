// Copyright 2026 The dexc Authors
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

#ifndef DEXC_CONFIG_H_
#define DEXC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dexc/env.h"
#include "dexc/eval.h"
#include "dexc/trainer.h"

namespace dexc {

// Everything a pipeline run needs, loaded from one key-value file with
// [section] headers.
struct RunConfig {
  // [task]
  std::string script = "lift-open-close";
  int frames = 300;
  double dt = 0.02;
  std::string demo;  // existing demo file; overrides the script
  // [assets]; empty paths select the built-in toy assets
  std::string object_asset;
  std::string hand_asset;
  // [prep]
  PrepOptions prep;
  // [train], [curriculum], [action], [reward], [sim] live in here.
  TrainConfig train;
  // [eval]
  EvalConfig eval;
  // [run]
  std::string output = "runs";
  std::string method;  // defaults to the curriculum mode name

  std::string MethodName() const;
};

// key=value pairs, "section.key" form, applied after the file.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

RunConfig ParseRunConfig(std::string_view text,
                         const ConfigOverrides& overrides = {});
RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const ConfigOverrides& overrides = {});
// Splits "section.key=value".
std::pair<std::string, std::string> ParseOverride(std::string_view arg);

// Fully resolved config in file syntax, one key per line, fixed order.
std::string CanonicalConfig(const RunConfig& cfg);
// 16 hex digits of FNV-1a over the canonical text.
std::string ConfigHash(const RunConfig& cfg);
// Hash over the reward weights and the contact mismatch distance only.
std::string RewardHash(const RunConfig& cfg);
std::string Fnv1aHex(std::string_view text);

// Output root: $DEXC_OUT when set, otherwise `fallback`.
std::filesystem::path OutputRoot(const std::filesystem::path& fallback);

}  // namespace dexc

#endif  // DEXC_CONFIG_H_
