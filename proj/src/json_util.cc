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

#include "json_util.h"

#include <fstream>
#include <sstream>

#include "dexc/error.h"

namespace dexc::internal {

const Json& Require(const Json& j, const std::string& key,
                    const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double RequireNumber(const Json& j, const std::string& key,
                     const std::string& where) {
  const Json& v = Require(j, key, where);
  if (!v.is_number()) {
    throw SchemaError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

Json ToJson(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 Vec3FromJson(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw SchemaError(where + ": expected a 3-vector");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw SchemaError(where + ": non-numeric entry");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json ToJson(const VecX& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VecX VecXFromJson(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(where + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json ToJson(const std::vector<Vec3>& points) {
  Json out = Json::array();
  for (const Vec3& p : points) out.push_back(ToJson(p));
  return out;
}

std::vector<Vec3> PointsFromJson(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a point list");
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(Vec3FromJson(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const Json& j, const std::filesystem::path& path,
                   int indent) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(indent) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace dexc::internal
