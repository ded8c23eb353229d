#include <doctest.h>

#include <json.hpp>

#include "mcsa/alarm.hpp"
#include "mcsa/rng.hpp"

using namespace mcsa;

namespace {

std::vector<LabelScore> hit(const std::string& label, double score) {
  return {{label, score}};
}

using Frame = std::pair<double, std::vector<LabelScore>>;

std::vector<Frame> frames_from_scores(const std::vector<double>& scores,
                                      const std::string& label) {
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    if (scores[i] > 0.0) {
      frames.emplace_back(t, hit(label, scores[i]));
    } else {
      frames.emplace_back(t, std::vector<LabelScore>{});
    }
  }
  return frames;
}

// Independent fold written against alarm_step only.
std::vector<AlarmEvent> fold_oracle(const std::vector<Frame>& frames,
                                    const AlarmConfig& cfg) {
  AlarmState state;
  std::vector<AlarmEvent> all;
  for (const auto& [t, cls] : frames) {
    auto [next, events] = alarm_step(state, cls, t, cfg);
    state = next;
    for (const auto& e : events) all.push_back(e);
  }
  return all;
}

bool same_events(const std::vector<AlarmEvent>& a, const std::vector<AlarmEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].frame_time_s != b[i].frame_time_s || a[i].transition != b[i].transition ||
        a[i].label != b[i].label || a[i].score != b[i].score) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("alarm") {

TEST_CASE("quiescent stream stays normal") {
  AlarmConfig cfg;
  std::vector<Frame> frames;
  for (int i = 1; i <= 20; ++i) frames.emplace_back(i, std::vector<LabelScore>{});
  CHECK(run_monitor(frames, cfg).empty());
}

TEST_CASE("hand-walked escalation sequence") {
  AlarmConfig cfg;
  cfg.on_threshold = 0.9;
  cfg.incipient_threshold = 0.5;
  cfg.off_threshold = 0.3;
  cfg.on_hold_frames = 3;
  cfg.off_hold_frames = 5;

  const auto events =
      run_monitor(frames_from_scores({0.95, 0.95, 0.95, 0.95, 0.95}, "f"), cfg);
  // Walked by hand: frame 1 raises (0.95 >= 0.5, hold count 1), frames 2 and 3
  // keep the hold counter growing, frame 3 reaches 3 consecutive >= 0.9 and
  // escalates. Nothing else happens.
  REQUIRE(events.size() == 2);
  CHECK(events[0].transition == AlarmTransition::Raised);
  CHECK(events[0].frame_time_s == doctest::Approx(1.0));
  CHECK(events[0].label == "f");
  CHECK(events[1].transition == AlarmTransition::Escalated);
  CHECK(events[1].frame_time_s == doctest::Approx(3.0));
}

TEST_CASE("oscillating scores neither chatter nor return") {
  AlarmConfig cfg;
  cfg.off_hold_frames = 3;
  std::vector<double> scores;
  for (int i = 0; i < 40; ++i) scores.push_back(i % 2 == 0 ? 0.95 : 0.0);
  const auto events = run_monitor(frames_from_scores(scores, "f"), cfg);

  std::size_t raised = 0, returned = 0;
  for (const auto& e : events) {
    if (e.transition == AlarmTransition::Raised) ++raised;
    if (e.transition == AlarmTransition::ReturnedToNormal) ++returned;
  }
  CHECK(raised == 1);
  CHECK(returned == 0);
}

TEST_CASE("healthy-fault-healthy gives one raise and one return, in order") {
  AlarmConfig cfg;
  std::vector<double> scores(8, 0.0);
  for (int i = 0; i < 10; ++i) scores.push_back(0.95);
  for (int i = 0; i < 12; ++i) scores.push_back(0.0);
  const auto events = run_monitor(frames_from_scores(scores, "f"), cfg);

  std::vector<AlarmTransition> transitions;
  for (const auto& e : events) transitions.push_back(e.transition);
  std::size_t raised = 0, returned = 0;
  for (auto t : transitions) {
    if (t == AlarmTransition::Raised) ++raised;
    if (t == AlarmTransition::ReturnedToNormal) ++returned;
  }
  REQUIRE(raised == 1);
  REQUIRE(returned == 1);
  CHECK(transitions.front() == AlarmTransition::Raised);
  CHECK(transitions.back() == AlarmTransition::ReturnedToNormal);
}

TEST_CASE("raised and returned alternate per label on random streams") {
  AlarmConfig cfg;
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> scores;
    for (int i = 0; i < 120; ++i) {
      scores.push_back(rng.bernoulli(0.5) ? rng.uniform(0.5, 1.0) : 0.0);
    }
    const auto events = run_monitor(frames_from_scores(scores, "x"), cfg);
    int parity = 0;  // expect Raised when 0, ReturnedToNormal when 1
    for (const auto& e : events) {
      if (e.transition == AlarmTransition::Escalated) continue;
      if (parity == 0) {
        CHECK(e.transition == AlarmTransition::Raised);
        parity = 1;
      } else {
        CHECK(e.transition == AlarmTransition::ReturnedToNormal);
        parity = 0;
      }
    }
  }
}

TEST_CASE("every alarm is preceded by a raise") {
  AlarmConfig cfg;
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores;
    for (int i = 0; i < 150; ++i) scores.push_back(rng.uniform(0.0, 1.0));
    const auto events = run_monitor(frames_from_scores(scores, "x"), cfg);
    bool armed = false;  // a Raised has happened with no ReturnedToNormal since
    for (const auto& e : events) {
      if (e.transition == AlarmTransition::Raised) armed = true;
      if (e.transition == AlarmTransition::ReturnedToNormal) armed = false;
      if (e.transition == AlarmTransition::Escalated) CHECK(armed);
    }
  }
}

TEST_CASE("run_monitor equals the independent fold") {
  AlarmConfig cfg;
  Rng rng(55);
  std::vector<Frame> frames;
  const std::vector<std::string> labels = {"a", "b"};
  for (int i = 1; i <= 200; ++i) {
    std::vector<LabelScore> cls;
    if (rng.bernoulli(0.7)) {
      cls.push_back({labels[rng.bernoulli(0.2) ? 1 : 0], rng.uniform(0.0, 1.0)});
    }
    frames.emplace_back(static_cast<double>(i), cls);
  }
  CHECK(same_events(run_monitor(frames, cfg), fold_oracle(frames, cfg)));
  CHECK(run_monitor({}, cfg).empty());
}

TEST_CASE("label handover re-raises for the new label") {
  AlarmConfig cfg;
  cfg.on_hold_frames = 1;
  std::vector<Frame> frames;
  frames.emplace_back(1.0, hit("a", 0.95));  // raise + escalate in one frame
  frames.emplace_back(2.0, hit("a", 0.95));
  frames.emplace_back(3.0, hit("b", 0.95));  // handover
  const auto events = run_monitor(frames, cfg);
  REQUIRE(events.size() == 3);
  CHECK(events[0].transition == AlarmTransition::Raised);
  CHECK(events[0].label == "a");
  CHECK(events[1].transition == AlarmTransition::Escalated);
  CHECK(events[1].frame_time_s == doctest::Approx(1.0));
  CHECK(events[2].transition == AlarmTransition::Raised);
  CHECK(events[2].label == "b");
}

TEST_CASE("monotonic time and config invariants are enforced") {
  AlarmConfig cfg;
  AlarmState state;
  auto [s1, e1] = alarm_step(state, {}, 1.0, cfg);
  CHECK_THROWS_AS(alarm_step(s1, {}, 1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(alarm_step(s1, {}, 0.5, cfg), std::invalid_argument);

  AlarmConfig bad;
  bad.off_threshold = 0.6;  // >= incipient
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  AlarmConfig bad2;
  bad2.on_hold_frames = 0;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_CASE("event json lines carry the documented fields") {
  AlarmEvent e;
  e.frame_time_s = 1.5;
  e.transition = AlarmTransition::Raised;
  e.label = "sideband";
  e.score = 0.875;
  const auto parsed = nlohmann::json::parse(alarm_event_json_line(e));
  CHECK(parsed["time_s"].get<double>() == doctest::Approx(1.5));
  CHECK(parsed["transition"].get<std::string>() == "raised");
  CHECK(parsed["label"].get<std::string>() == "sideband");
  CHECK(parsed["score"].get<double>() == doctest::Approx(0.875));
  CHECK(parsed.size() == 4);
}

}  // TEST_SUITE
