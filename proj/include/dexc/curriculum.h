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

#ifndef DEXC_CURRICULUM_H_
#define DEXC_CURRICULUM_H_

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

namespace dexc {

enum RewardTerm { kTermTask = 0, kTermImi, kTermBc, kTermCon, kNumTerms };

struct CurriculumConfig {
  double kp = 1e4;
  double kv = 0.0;  // 0 means critical damping against the object mass
  double phi_p = 0.9;
  double phi_v = 0.95;
  std::array<double, kNumTerms> thresholds = {0.6, 0.5, 0.5, 0.5};
  int window = 50;
  double zero_threshold = 0.01;

  void Validate() const;
};

// Gain-decay curriculum. Episodes feed the per-term deques and MaybeDecay
// shrinks the virtual gains once every term is above its threshold.
class GainCurriculum {
 public:
  GainCurriculum() = default;
  GainCurriculum(const CurriculumConfig& cfg, double kv0, int max_length);

  // Appends R_z / L_max for each term. Requires 1 <= length <= L_max.
  void RecordEpisode(int length, const std::array<double, kNumTerms>& returns);
  // Returns true when the gains were decayed.
  bool MaybeDecay();

  double kp() const { return kp_; }
  double kv() const { return kv_; }
  bool zeroed() const { return zeroed_; }
  int max_length() const { return max_length_; }
  int decay_events() const { return decay_events_; }
  const CurriculumConfig& config() const { return cfg_; }
  const std::deque<double>& history(int term) const { return history_[term]; }
  std::optional<double> Mean(int term) const;

  // Restores a saved state.
  void Restore(double kp, double kv, bool zeroed, int decay_events,
               const std::array<std::deque<double>, kNumTerms>& history);

 private:
  CurriculumConfig cfg_;
  double kp_ = 0.0;
  double kv_ = 0.0;
  bool zeroed_ = true;
  int max_length_ = 1;
  int decay_events_ = 0;
  std::array<std::deque<double>, kNumTerms> history_;
};

struct CurriculumSnapshot {
  long iteration = 0;
  double kp = 0.0;
  double kv = 0.0;
  bool zeroed = false;
  std::array<std::optional<double>, kNumTerms> means;
};

CurriculumSnapshot Snapshot(const GainCurriculum& curriculum, long iteration);
std::string CurriculumCsvHeader();
std::string ToCsvRow(const CurriculumSnapshot& snapshot);
CurriculumSnapshot ParseCurriculumCsvRow(std::string_view row);

// Exponential schedule of the gravity/friction baseline curriculum.
enum class ScheduledParam {
  kObjectPositionTolerance = 0,
  kObjectRotationTolerance,
  kFingerTolerance,
  kGravity,  // pseudo value g_bar; applied gravity is -(9.81 - g_bar)
  kFriction,
};
inline constexpr int kNumScheduledParams = 5;

struct ScheduleRange {
  double init = 1.0;
  double final = 1.0;
};

struct BaselineSchedule {
  std::array<ScheduleRange, kNumScheduledParams> ranges;
  long max_iteration = 1;  // I
  long interval = 1;       // v

  // Defaults: tolerances 0.20->0.05 m, 1.0->0.3 rad, 0.10->0.03 m;
  // pseudo gravity 9.81->1e-3; friction 4->1.
  static BaselineSchedule Default(long max_iteration, long interval);
  void Validate() const;
};

inline constexpr double kStandardGravity = 9.81;
inline constexpr double kPseudoGravityFloor = 1e-3;

// w_init * (w_final / w_init)^(t / I) for 0 <= t <= I.
double BaselineValue(const BaselineSchedule& schedule, ScheduledParam param,
                     double t);
// Value in effect at a training iteration: t is held at multiples of v and
// saturates at I.
double ScheduledValue(const BaselineSchedule& schedule, ScheduledParam param,
                      long iteration);
// Applied z gravity; exactly -9.81 once iteration >= I.
double AppliedGravity(const BaselineSchedule& schedule, long iteration);

}  // namespace dexc

#endif  // DEXC_CURRICULUM_H_
