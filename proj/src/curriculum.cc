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

#include "dexc/curriculum.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "dexc/error.h"

namespace dexc {

void CurriculumConfig::Validate() const {
  if (!(kp >= 0.0) || !(kv >= 0.0)) {
    throw InvalidArgument("curriculum gains must be nonnegative");
  }
  if (!(phi_p > 0.0 && phi_p < 1.0) || !(phi_v > 0.0 && phi_v < 1.0)) {
    throw InvalidArgument("decay ratios must lie in (0, 1)");
  }
  if (window < 1) throw InvalidArgument("curriculum window must be >= 1");
  if (!(zero_threshold >= 0.0)) {
    throw InvalidArgument("zeroing threshold must be nonnegative");
  }
}

GainCurriculum::GainCurriculum(const CurriculumConfig& cfg, double kv0,
                               int max_length)
    : cfg_(cfg), kp_(cfg.kp), kv_(kv0), zeroed_(cfg.kp == 0.0),
      max_length_(max_length) {
  cfg_.Validate();
  if (max_length < 1) throw InvalidArgument("L_max must be >= 1");
  if (!(kv0 >= 0.0)) throw InvalidArgument("k_v must be nonnegative");
  if (zeroed_) kv_ = 0.0;
}

void GainCurriculum::RecordEpisode(
    int length, const std::array<double, kNumTerms>& returns) {
  if (length < 1 || length > max_length_) {
    throw InvalidArgument("episode length " + std::to_string(length) +
                          " outside [1, " + std::to_string(max_length_) + "]");
  }
  for (int z = 0; z < kNumTerms; ++z) {
    if (!std::isfinite(returns[z])) {
      throw InvalidArgument("episode return is not finite");
    }
    std::deque<double>& d = history_[z];
    d.push_back(returns[z] / max_length_);
    while (static_cast<int>(d.size()) > cfg_.window) d.pop_front();
  }
}

std::optional<double> GainCurriculum::Mean(int term) const {
  const std::deque<double>& d = history_[term];
  if (d.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

bool GainCurriculum::MaybeDecay() {
  if (kp_ == 0.0) return false;
  for (int z = 0; z < kNumTerms; ++z) {
    std::optional<double> m = Mean(z);
    if (!m || !(*m > cfg_.thresholds[z])) return false;
  }
  kp_ *= cfg_.phi_p;
  if (kp_ <= cfg_.zero_threshold) {
    kp_ = 0.0;
    kv_ = 0.0;
    zeroed_ = true;
  }
  kv_ *= cfg_.phi_v;
  ++decay_events_;
  return true;
}

void GainCurriculum::Restore(
    double kp, double kv, bool zeroed, int decay_events,
    const std::array<std::deque<double>, kNumTerms>& history) {
  kp_ = kp;
  kv_ = kv;
  zeroed_ = zeroed;
  decay_events_ = decay_events;
  history_ = history;
}

CurriculumSnapshot Snapshot(const GainCurriculum& curriculum, long iteration) {
  CurriculumSnapshot s;
  s.iteration = iteration;
  s.kp = curriculum.kp();
  s.kv = curriculum.kv();
  s.zeroed = curriculum.zeroed();
  for (int z = 0; z < kNumTerms; ++z) s.means[z] = curriculum.Mean(z);
  return s;
}

std::string CurriculumCsvHeader() {
  return "iteration,k_p,k_v,zeroed,mean_task,mean_imi,mean_bc,mean_con";
}

namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string ToCsvRow(const CurriculumSnapshot& s) {
  std::string row = std::to_string(s.iteration) + "," + FormatDouble(s.kp) +
                    "," + FormatDouble(s.kv) + "," + (s.zeroed ? "1" : "0");
  for (const auto& m : s.means) {
    row += ",";
    if (m) row += FormatDouble(*m);
  }
  return row;
}

CurriculumSnapshot ParseCurriculumCsvRow(std::string_view row) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : row) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\n' && c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 4 + kNumTerms) {
    throw SchemaError("curriculum row needs " + std::to_string(4 + kNumTerms) +
                      " fields");
  }
  CurriculumSnapshot s;
  try {
    s.iteration = std::stol(fields[0]);
    s.kp = std::stod(fields[1]);
    s.kv = std::stod(fields[2]);
    s.zeroed = fields[3] == "1";
    for (int z = 0; z < kNumTerms; ++z) {
      if (!fields[4 + z].empty()) s.means[z] = std::stod(fields[4 + z]);
    }
  } catch (const std::logic_error&) {
    throw SchemaError("malformed curriculum row");
  }
  return s;
}

BaselineSchedule BaselineSchedule::Default(long max_iteration, long interval) {
  BaselineSchedule s;
  s.max_iteration = max_iteration;
  s.interval = interval;
  s.ranges[static_cast<int>(ScheduledParam::kObjectPositionTolerance)] = {0.20, 0.05};
  s.ranges[static_cast<int>(ScheduledParam::kObjectRotationTolerance)] = {1.0, 0.3};
  s.ranges[static_cast<int>(ScheduledParam::kFingerTolerance)] = {0.10, 0.03};
  s.ranges[static_cast<int>(ScheduledParam::kGravity)] = {kStandardGravity,
                                                         kPseudoGravityFloor};
  s.ranges[static_cast<int>(ScheduledParam::kFriction)] = {4.0, 1.0};
  return s;
}

void BaselineSchedule::Validate() const {
  for (const ScheduleRange& r : ranges) {
    if (!(r.init > 0.0) || !(r.final > 0.0)) {
      throw InvalidArgument("schedule endpoints must be positive");
    }
  }
  if (max_iteration < 1) throw InvalidArgument("schedule needs I >= 1");
  if (interval < 1) throw InvalidArgument("schedule needs v >= 1");
}

double BaselineValue(const BaselineSchedule& schedule, ScheduledParam param,
                     double t) {
  const ScheduleRange& r = schedule.ranges[static_cast<int>(param)];
  if (!(r.init > 0.0) || !(r.final > 0.0)) {
    throw InvalidArgument("schedule endpoints must be positive");
  }
  const double total = static_cast<double>(schedule.max_iteration);
  if (t < 0.0 || t > total) {
    throw InvalidArgument("schedule time outside [0, I]");
  }
  if (t == 0.0) return r.init;
  if (t == total) return r.final;
  return r.init * std::pow(r.final / r.init, t / total);
}

double ScheduledValue(const BaselineSchedule& schedule, ScheduledParam param,
                      long iteration) {
  long t = std::max(0L, iteration);
  t = (t / schedule.interval) * schedule.interval;
  t = std::min(t, schedule.max_iteration);
  return BaselineValue(schedule, param, static_cast<double>(t));
}

double AppliedGravity(const BaselineSchedule& schedule, long iteration) {
  if (iteration >= schedule.max_iteration) return -kStandardGravity;
  double g_bar = ScheduledValue(schedule, ScheduledParam::kGravity, iteration);
  return -(kStandardGravity - g_bar);
}

}  // namespace dexc
