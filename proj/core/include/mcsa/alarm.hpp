#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/signature.hpp"

namespace mcsa {

// Two-threshold hysteresis with hold counters. Scores at or above
// incipient_threshold raise an incipient condition; on_hold_frames
// consecutive frames at or above on_threshold escalate it to an alarm; a
// return to normal needs off_hold_frames consecutive frames below
// off_threshold (or with no classification at all).
struct AlarmConfig {
  double on_threshold = 0.8;
  double incipient_threshold = 0.5;
  double off_threshold = 0.3;
  std::size_t on_hold_frames = 3;
  std::size_t off_hold_frames = 5;

  void validate() const;
};

enum class AlarmTransition { Raised, Escalated, ReturnedToNormal };

struct AlarmEvent {
  double frame_time_s = 0.0;
  AlarmTransition transition = AlarmTransition::Raised;
  std::string label;
  double score = 0.0;
};

struct AlarmState {
  enum class Phase { Normal, Incipient, Alarm };

  Phase phase = Phase::Normal;
  std::string label;  // active label when not Normal
  std::size_t on_count = 0;
  std::size_t off_count = 0;
  double last_frame_time_s = -std::numeric_limits<double>::infinity();
};

// One frame of the fault predictor. Frame times must be strictly increasing
// across successive calls. A step may emit several events at the same frame
// time (Raised immediately followed by Escalated when the hold is 1); their
// order in the returned list is the causal order.
std::pair<AlarmState, std::vector<AlarmEvent>> alarm_step(
    const AlarmState& state, const std::vector<LabelScore>& classification,
    double frame_time_s, const AlarmConfig& cfg);

// Folds alarm_step over a time-ordered classification sequence starting from
// the Normal state.
std::vector<AlarmEvent> run_monitor(
    const std::vector<std::pair<double, std::vector<LabelScore>>>& classified_frames,
    const AlarmConfig& cfg);

const char* alarm_transition_name(AlarmTransition t);

// One JSON object per event with fields {time_s, transition, label, score}.
std::string alarm_event_json_line(const AlarmEvent& event);

}  // namespace mcsa
