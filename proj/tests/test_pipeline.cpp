#include <doctest.h>

#include <cmath>

#include "mcsa/pipeline.hpp"
#include "oracles.hpp"

using namespace mcsa;

namespace {

PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.sample_rate_hz = 4000.0;
  cfg.decimation = 2;
  cfg.smoothing_window = 7;
  cfg.stft.window_len = 1024;
  cfg.stft.hop = 256;
  cfg.ica.learning_rate = 0.3;
  cfg.ica.max_iterations = 500;
  cfg.ica.tolerance = 1e-4;
  cfg.ica.seed = 7;
  cfg.window_seconds = 2.0;
  cfg.seed = 42;
  // thresholds matched to the score distribution of calibrated matches
  cfg.alarm.on_threshold = 0.30;
  cfg.alarm.incipient_threshold = 0.10;
  cfg.alarm.off_threshold = 0.03;
  cfg.alarm.on_hold_frames = 1;
  cfg.alarm.off_hold_frames = 2;
  cfg.cusum_feature = 1;  // the 30-45 Hz band
  return cfg;
}

// Pure single-fault calibration, one seed per case: enough for the unit
// tests; the acceptance suite exercises the full default plan.
CalibrationPlan reduced_plan(const OperatingPoint& op) {
  CalibrationPlan plan;
  for (const std::string& label : canonical_fault_labels()) {
    plan.classes.push_back({label, {{fault_for_label(label, op)}}});
  }
  plan.seeds_per_case = 1;
  plan.duration_s = 4.0;
  return plan;
}

const SignatureLibrary& calibrated_library() {
  static const SignatureLibrary lib = [] {
    const PipelineConfig cfg = fast_config();
    return calibrate_library(cfg, AnalysisMode::Hybrid, reduced_plan(cfg.op));
  }();
  return lib;
}

SignatureLibrary empty_library(const PipelineConfig& cfg) {
  SignatureLibrary lib;
  lib.schema = cfg.features.names();
  lib.normalization.assign(lib.schema.size(), 1.0);
  return lib;
}

MultiChannelRecord healthy_record(const PipelineConfig& cfg, double duration_s,
                                  std::uint64_t seed) {
  return generate_drive_record(cfg.op, {Healthy{}}, Gaussian{0.15}, cfg.sample_rate_hz,
                               duration_s, seed, 1);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("reports are byte-identical for identical inputs") {
  const auto cfg = fast_config();
  const auto rec = healthy_record(cfg, 4.0, 1);
  const auto lib = empty_library(cfg);
  const auto a = report_to_json(run_analyze(cfg, rec, lib), false);
  const auto b = report_to_json(run_analyze(cfg, rec, lib), false);
  CHECK(a == b);
  // and timing is the only thing that may differ
  const auto with_timing = report_to_json(run_analyze(cfg, rec, lib), true);
  CHECK(with_timing.find("timing") != std::string::npos);
  CHECK(a.find("timing") == std::string::npos);
}

TEST_CASE("healthy record classifies empty and raises no alarms") {
  const auto cfg = fast_config();
  const auto& lib = calibrated_library();
  const auto report = run_analyze(cfg, healthy_record(cfg, 4.0, 77), lib);
  REQUIRE(report.windows.size() == 2);
  for (const auto& w : report.windows) {
    CHECK(w.classification.empty());
  }
  CHECK(report.alarm_events.empty());
}

TEST_CASE("an injected fault is classified in post-onset windows") {
  const auto cfg = fast_config();
  const auto& lib = calibrated_library();
  ScenarioConfig sc;
  sc.op = cfg.op;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  sc.duration_s = 6.0;
  sc.onset_s = 2.0;
  const auto rec = spliced_fault_record(
      sc, {fault_for_label(kLabelSideband, cfg.op)},
      noise_for_regime(NoiseRegime::Gaussian, 10.0, cfg.op, cfg.sample_rate_hz), 5);
  const auto report = run_analyze(cfg, rec, lib);
  REQUIRE(report.windows.size() == 3);
  std::size_t hits = 0;
  for (const auto& w : report.windows) {
    if (w.index == 0) continue;  // pre-onset
    for (const auto& c : w.classification) {
      if (c.label == kLabelSideband) ++hits;
    }
  }
  CHECK(hits >= 1);
}

TEST_CASE("validation-case run reports a 50 Hz dominant peak") {
  auto cfg = fast_config();
  // the validation operating point is the OperatingPoint default
  const auto report =
      run_analyze(cfg, healthy_record(cfg, 4.0, 3), empty_library(cfg));
  const double bin_width = cfg.sample_rate_hz / cfg.decimation / 1024.0;
  for (const auto& w : report.windows) {
    CHECK(std::abs(w.dominant_peak_hz - 50.0) <= bin_width);
  }
}

TEST_CASE("run_analyze equals the manual stage composition") {
  const auto cfg = fast_config();
  const auto& lib = calibrated_library();
  const auto rec = healthy_record(cfg, 2.0, 9);
  const auto report = run_analyze(cfg, rec, lib);
  REQUIRE(report.windows.size() == 1);

  // documented order: decimate -> smooth -> whiten/fit/separate (unit-rms
  // sources) -> stft -> features -> fuse -> classify
  const auto decimated = smooth(decimate(rec, cfg.decimation), cfg.smoothing_window);
  auto [white, whitener] = center_whiten(decimated);
  UnmixingMatrix fit = ica_fit(white, cfg.ica);
  fit.whitener = whitener;
  auto sources = separate(fit, decimated);
  for (auto& ch : sources.channels) {
    double power = 0.0;
    for (double v : ch.samples) power += v * v;
    const double rms = std::sqrt(power / static_cast<double>(ch.samples.size()));
    for (auto& v : ch.samples) v /= rms;
  }
  std::vector<FeatureVector> features;
  for (std::size_t c = 0; c < sources.channel_count(); ++c) {
    features.push_back(extract_features(sources.channels[c].samples,
                                        stft(sources, c, cfg.stft), cfg.op,
                                        cfg.features));
  }
  const std::vector<double> weights(features.size(), 1.0 / features.size());
  const auto fused = fuse(features, weights);
  const auto classification = classify(fused, lib, 2);

  REQUIRE(report.windows[0].fused.values.size() == fused.values.size());
  for (std::size_t i = 0; i < fused.values.size(); ++i) {
    CHECK(report.windows[0].fused.values[i] ==
          doctest::Approx(fused.values[i]).epsilon(1e-12));
  }
  REQUIRE(report.windows[0].classification.size() == classification.size());
  for (std::size_t i = 0; i < classification.size(); ++i) {
    CHECK(report.windows[0].classification[i].label == classification[i].label);
  }
}

TEST_CASE("config json round trip and validation") {
  auto cfg = fast_config();
  cfg.fusion_weights = {0.25, 0.25, 0.25, 0.25};
  cfg.library_path = "lib.json";
  const auto text = config_to_json(cfg);
  const auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);

  auto bad = fast_config();
  bad.features.bands = {{5.0, 1500.0}};  // decimated Nyquist is 1000
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("exceeds the decimated Nyquist"),
                       std::invalid_argument);

  auto bad2 = fast_config();
  bad2.smoothing_window = 4;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);

  CHECK_THROWS_AS(config_from_json("{"), std::invalid_argument);
}

TEST_CASE("record and config sample rates must agree") {
  const auto cfg = fast_config();
  auto rec = healthy_record(cfg, 4.0, 1);
  rec.sample_rate_hz = 8000.0;
  CHECK_THROWS_WITH_AS(run_analyze(cfg, rec, empty_library(cfg)),
                       doctest::Contains("does not match record sample rate"),
                       std::invalid_argument);
}

TEST_CASE("an easy scenario is detected by every mode") {
  const auto cfg = fast_config();
  ScenarioConfig sc;
  sc.op = cfg.op;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  sc.duration_s = 6.0;
  sc.onset_s = 2.0;
  sc.snr_db = 40.0;  // practically noiseless

  Scenario scenario;
  scenario.name = "easy";
  scenario.expected_labels = {kLabelHarmonic};
  scenario.onset_s = sc.onset_s;
  scenario.record = spliced_fault_record(
      sc, {fault_for_label(kLabelHarmonic, cfg.op)},
      noise_for_regime(NoiseRegime::Gaussian, sc.snr_db, cfg.op, cfg.sample_rate_hz),
      31);

  auto plan = reduced_plan(cfg.op);
  plan.snr_db = sc.snr_db;  // calibrate for the quiet condition it will see
  const auto report = run_compare(
      cfg, {scenario},
      {AnalysisMode::Hybrid, AnalysisMode::StftOnly, AnalysisMode::FusionOnly}, plan);
  REQUIRE(report.modes.size() == 3);
  double hybrid_rate = 0.0;
  for (const auto& [name, metrics] : report.modes) {
    CHECK(metrics.scenarios == 1);
    CHECK(metrics.scenarios_detected == 1);
    CHECK(metrics.mean_latency_windows >= 0.0);
    if (name == "hybrid") hybrid_rate = metrics.detection_rate;
  }
  for (const auto& [name, metrics] : report.modes) {
    CHECK(hybrid_rate >= metrics.detection_rate - 1e-12);
  }
}

TEST_CASE("compare handles empty suites and rejects unknown modes") {
  const auto cfg = fast_config();
  const auto report = run_compare(cfg, {}, {AnalysisMode::Hybrid}, reduced_plan(cfg.op));
  REQUIRE(report.modes.size() == 1);
  CHECK(report.modes[0].first == "hybrid");
  CHECK(report.modes[0].second.scenarios == 0);

  CHECK_THROWS_AS(analysis_mode_from_name("wavelet"), std::invalid_argument);
  CHECK(analysis_mode_from_name("stft_only") == AnalysisMode::StftOnly);
  CHECK(analysis_mode_from_name("fusion_only") == AnalysisMode::FusionOnly);
}

TEST_CASE("alarm fold inside analyze matches run_monitor on the window stream") {
  const auto cfg = fast_config();
  const auto& lib = calibrated_library();
  ScenarioConfig sc;
  sc.op = cfg.op;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  sc.duration_s = 8.0;
  sc.onset_s = 4.0;
  const auto rec = spliced_fault_record(
      sc, {fault_for_label(kLabelHarmonic, cfg.op)},
      noise_for_regime(NoiseRegime::Gaussian, 10.0, cfg.op, cfg.sample_rate_hz), 8);
  const auto report = run_analyze(cfg, rec, lib);

  std::vector<std::pair<double, std::vector<LabelScore>>> frames;
  for (const auto& w : report.windows) frames.emplace_back(w.start_s, w.classification);
  const auto folded = run_monitor(frames, cfg.alarm);
  REQUIRE(report.alarm_events.size() == folded.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    CHECK(report.alarm_events[i].frame_time_s == folded[i].frame_time_s);
    CHECK(report.alarm_events[i].transition == folded[i].transition);
    CHECK(report.alarm_events[i].label == folded[i].label);
  }
}

TEST_CASE("stage timings add up to the measured total") {
  const auto cfg = fast_config();
  const auto report =
      run_analyze(cfg, healthy_record(cfg, 4.0, 2), empty_library(cfg));
  const auto& t = report.timing;
  const double stage_sum = t.decimate_s + t.smooth_s + t.bss_s + t.stft_s +
                           t.features_s + t.classify_s + t.alarm_s;
  CHECK(stage_sum <= t.total_s);
  CHECK(t.total_s - stage_sum <= 0.25 * t.total_s + 0.05);
}

TEST_CASE("bench runs the full path and fills every stage") {
  auto cfg = fast_config();
  const auto timing = pipeline_bench(cfg, 4, 2.0);
  CHECK(timing.total_s > 0.0);
  CHECK(timing.decimate_s > 0.0);
  CHECK(timing.bss_s > 0.0);
  CHECK(timing.stft_s > 0.0);
}

}  // TEST_SUITE
