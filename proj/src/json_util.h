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

#ifndef DEXC_SRC_JSON_UTIL_H_
#define DEXC_SRC_JSON_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dexc/geometry.h"
#include "dexc/models.h"

namespace dexc::internal {

using Json = nlohmann::json;

// Fetches a required member, throwing SchemaError naming `where`.
const Json& Require(const Json& j, const std::string& key,
                    const std::string& where);
double RequireNumber(const Json& j, const std::string& key,
                     const std::string& where);

Json ToJson(const Vec3& v);
Vec3 Vec3FromJson(const Json& j, const std::string& where);
Json ToJson(const VecX& v);
VecX VecXFromJson(const Json& j, const std::string& where);
Json ToJson(const std::vector<Vec3>& points);
std::vector<Vec3> PointsFromJson(const Json& j, const std::string& where);

Json ReadJsonFile(const std::filesystem::path& path);
// Writes with a trailing newline; output is a pure function of `j`.
void WriteJsonFile(const Json& j, const std::filesystem::path& path,
                   int indent = -1);

}  // namespace dexc::internal

#endif  // DEXC_SRC_JSON_UTIL_H_
