#include "mcsa/alarm.hpp"

#include <stdexcept>

#include <json.hpp>

namespace mcsa {

void AlarmConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(on_threshold) || !in_unit(incipient_threshold) || !in_unit(off_threshold)) {
    throw std::invalid_argument("alarm: thresholds must lie in [0, 1]");
  }
  if (!(off_threshold < incipient_threshold && incipient_threshold <= on_threshold)) {
    throw std::invalid_argument(
        "alarm: need off_threshold < incipient_threshold <= on_threshold");
  }
  if (on_hold_frames == 0 || off_hold_frames == 0) {
    throw std::invalid_argument("alarm: hold frame counts must be >= 1");
  }
}

std::pair<AlarmState, std::vector<AlarmEvent>> alarm_step(
    const AlarmState& state, const std::vector<LabelScore>& classification,
    double frame_time_s, const AlarmConfig& cfg) {
  cfg.validate();
  if (frame_time_s <= state.last_frame_time_s) {
    throw std::invalid_argument("alarm: frame times must be strictly increasing");
  }

  AlarmState next = state;
  next.last_frame_time_s = frame_time_s;
  std::vector<AlarmEvent> events;

  const LabelScore* top = classification.empty() ? nullptr : &classification.front();
  const bool below_off = top == nullptr || top->score < cfg.off_threshold;

  if (next.phase == AlarmState::Phase::Normal) {
    next.off_count = 0;
    if (top != nullptr && top->score >= cfg.incipient_threshold) {
      next.phase = AlarmState::Phase::Incipient;
      next.label = top->label;
      events.push_back({frame_time_s, AlarmTransition::Raised, top->label, top->score});
      next.on_count = top->score >= cfg.on_threshold ? 1 : 0;
      if (next.on_count >= cfg.on_hold_frames) {
        next.phase = AlarmState::Phase::Alarm;
        events.push_back(
            {frame_time_s, AlarmTransition::Escalated, top->label, top->score});
      }
    }
    return {next, events};
  }

  // Incipient or Alarm.
  if (below_off) {
    next.on_count = 0;
    if (++next.off_count >= cfg.off_hold_frames) {
      events.push_back({frame_time_s, AlarmTransition::ReturnedToNormal, next.label,
                        top != nullptr ? top->score : 0.0});
      next = AlarmState{};
      next.last_frame_time_s = frame_time_s;
    }
    return {next, events};
  }

  next.off_count = 0;
  // The state machine tracks the top label only; it hands over to a new
  // label once that label carries at least incipient-level evidence.
  if (top->label != next.label && top->score >= cfg.incipient_threshold) {
    next.label = top->label;
    next.on_count = 0;
    events.push_back({frame_time_s, AlarmTransition::Raised, top->label, top->score});
  }
  if (top->score >= cfg.on_threshold && top->label == next.label) {
    ++next.on_count;
  } else {
    next.on_count = 0;
  }
  if (next.phase == AlarmState::Phase::Incipient &&
      next.on_count >= cfg.on_hold_frames) {
    next.phase = AlarmState::Phase::Alarm;
    events.push_back({frame_time_s, AlarmTransition::Escalated, next.label, top->score});
  }
  return {next, events};
}

std::vector<AlarmEvent> run_monitor(
    const std::vector<std::pair<double, std::vector<LabelScore>>>& classified_frames,
    const AlarmConfig& cfg) {
  AlarmState state;
  std::vector<AlarmEvent> events;
  for (const auto& [time_s, classification] : classified_frames) {
    auto [next, frame_events] = alarm_step(state, classification, time_s, cfg);
    state = std::move(next);
    events.insert(events.end(), frame_events.begin(), frame_events.end());
  }
  return events;
}

const char* alarm_transition_name(AlarmTransition t) {
  switch (t) {
    case AlarmTransition::Raised: return "raised";
    case AlarmTransition::Escalated: return "escalated";
    case AlarmTransition::ReturnedToNormal: return "returned_to_normal";
  }
  return "raised";
}

std::string alarm_event_json_line(const AlarmEvent& event) {
  nlohmann::json j;
  j["time_s"] = event.frame_time_s;
  j["transition"] = alarm_transition_name(event.transition);
  j["label"] = event.label;
  j["score"] = event.score;
  return j.dump();
}

}  // namespace mcsa
