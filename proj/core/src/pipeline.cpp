#include "mcsa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mcsa {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MultiChannelRecord slice_record(const MultiChannelRecord& x, std::size_t start,
                                std::size_t len) {
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.channels.resize(x.channel_count());
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    out.channels[c].label = x.channels[c].label;
    const auto& src = x.channels[c].samples;
    out.channels[c].samples.assign(src.begin() + static_cast<std::ptrdiff_t>(start),
                                   src.begin() + static_cast<std::ptrdiff_t>(start + len));
  }
  return out;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

json prior_to_json(const SourcePrior& prior) {
  switch (prior.mode) {
    case SourcePrior::Mode::Fixed:
      return prior.fixed_kind == ScoreKind::SuperGaussian ? "super_gaussian"
                                                          : "sub_gaussian";
    case SourcePrior::Mode::PerChannel: {
      json arr = json::array();
      for (ScoreKind k : prior.kinds) {
        arr.push_back(k == ScoreKind::SuperGaussian ? "super_gaussian"
                                                    : "sub_gaussian");
      }
      return arr;
    }
    case SourcePrior::Mode::Adaptive:
    default:
      return "adaptive";
  }
}

SourcePrior prior_from_json(const json& j) {
  auto kind_from = [](const std::string& s) {
    if (s == "super_gaussian") return ScoreKind::SuperGaussian;
    if (s == "sub_gaussian") return ScoreKind::SubGaussian;
    throw std::invalid_argument("config: unknown prior kind '" + s + "'");
  };
  if (j.is_array()) {
    std::vector<ScoreKind> kinds;
    for (const auto& e : j) kinds.push_back(kind_from(e.get<std::string>()));
    return SourcePrior::per_channel(std::move(kinds));
  }
  const std::string s = j.get<std::string>();
  if (s == "adaptive") return SourcePrior::adaptive();
  return SourcePrior{SourcePrior::Mode::Fixed, kind_from(s), {}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (sample_rate_hz <= 0.0) {
    throw std::invalid_argument("config: sample_rate_hz must be > 0");
  }
  if (decimation == 0) throw std::invalid_argument("config: decimation must be >= 1");
  if (smoothing_window != 0 && smoothing_window % 2 == 0) {
    throw std::invalid_argument("config: smoothing_window must be odd or 0");
  }
  if (window_seconds <= 0.0) {
    throw std::invalid_argument("config: window_seconds must be > 0");
  }
  if (cusum_drift < 0.0 || cusum_threshold <= 0.0) {
    throw std::invalid_argument("config: cusum parameters out of range");
  }
  if (cusum_feature >= features.feature_count()) {
    throw std::invalid_argument("config: cusum_feature index outside the schema");
  }
  stft.validate();
  ica.validate();
  alarm.validate();
  op.validate();
  const double decimated_nyquist = sample_rate_hz / (2.0 * decimation);
  for (const auto& [lo, hi] : features.bands) {
    if (!(lo >= 0.0 && lo < hi)) throw std::invalid_argument("config: malformed band");
    if (hi > decimated_nyquist) {
      throw std::invalid_argument(
          "config: band edge " + std::to_string(hi) +
          " Hz exceeds the decimated Nyquist frequency " +
          std::to_string(decimated_nyquist) + " Hz");
    }
  }
  if (!fusion_weights.empty()) {
    double sum = 0.0;
    for (double w : fusion_weights) {
      if (w < 0.0) throw std::invalid_argument("config: fusion weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("config: fusion weights must sum to 1");
    }
  }
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["decimation"] = cfg.decimation;
  j["smoothing_window"] = cfg.smoothing_window;
  j["stft"] = {{"window_len", cfg.stft.window_len},
               {"hop", cfg.stft.hop},
               {"window", window_kind_name(cfg.stft.window)}};
  j["ica"] = {{"learning_rate", cfg.ica.learning_rate},
              {"max_iterations", cfg.ica.max_iterations},
              {"tolerance", cfg.ica.tolerance},
              {"seed", cfg.ica.seed},
              {"prior", prior_to_json(cfg.ica.prior)}};
  json bands = json::array();
  for (const auto& [lo, hi] : cfg.features.bands) bands.push_back({lo, hi});
  j["features"] = {{"bands", bands},
                   {"sideband_offset_hz", cfg.features.sideband_offset_hz}};
  j["fusion_weights"] = cfg.fusion_weights;
  j["alarm"] = {{"on_threshold", cfg.alarm.on_threshold},
                {"incipient_threshold", cfg.alarm.incipient_threshold},
                {"off_threshold", cfg.alarm.off_threshold},
                {"on_hold_frames", cfg.alarm.on_hold_frames},
                {"off_hold_frames", cfg.alarm.off_hold_frames}};
  j["library_path"] = cfg.library_path;
  j["seed"] = cfg.seed;
  j["window_seconds"] = cfg.window_seconds;
  j["cusum_feature"] = cfg.cusum_feature;
  j["cusum_drift"] = cfg.cusum_drift;
  j["cusum_threshold"] = cfg.cusum_threshold;
  j["operating_point"] = {{"line_frequency_hz", cfg.op.line_frequency_hz},
                          {"supply_voltage_v", cfg.op.supply_voltage_v},
                          {"phase_shift_rad", cfg.op.phase_shift_rad},
                          {"speed_rpm", cfg.op.speed_rpm}};
  return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    if (j.contains("sample_rate_hz")) cfg.sample_rate_hz = j["sample_rate_hz"].get<double>();
    if (j.contains("decimation")) cfg.decimation = j["decimation"].get<unsigned>();
    if (j.contains("smoothing_window")) {
      cfg.smoothing_window = j["smoothing_window"].get<std::size_t>();
    }
    if (j.contains("stft")) {
      const auto& s = j["stft"];
      if (s.contains("window_len")) cfg.stft.window_len = s["window_len"].get<std::size_t>();
      if (s.contains("hop")) cfg.stft.hop = s["hop"].get<std::size_t>();
      if (s.contains("window")) {
        cfg.stft.window = window_kind_from_name(s["window"].get<std::string>());
      }
    }
    if (j.contains("ica")) {
      const auto& s = j["ica"];
      if (s.contains("learning_rate")) cfg.ica.learning_rate = s["learning_rate"].get<double>();
      if (s.contains("max_iterations")) {
        cfg.ica.max_iterations = s["max_iterations"].get<std::size_t>();
      }
      if (s.contains("tolerance")) cfg.ica.tolerance = s["tolerance"].get<double>();
      if (s.contains("seed")) cfg.ica.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("prior")) cfg.ica.prior = prior_from_json(s["prior"]);
    }
    if (j.contains("features")) {
      const auto& s = j["features"];
      if (s.contains("bands")) {
        cfg.features.bands.clear();
        for (const auto& b : s["bands"]) {
          cfg.features.bands.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
        }
      }
      if (s.contains("sideband_offset_hz")) {
        cfg.features.sideband_offset_hz = s["sideband_offset_hz"].get<double>();
      }
    }
    if (j.contains("fusion_weights")) {
      cfg.fusion_weights = j["fusion_weights"].get<std::vector<double>>();
    }
    if (j.contains("alarm")) {
      const auto& s = j["alarm"];
      if (s.contains("on_threshold")) cfg.alarm.on_threshold = s["on_threshold"].get<double>();
      if (s.contains("incipient_threshold")) {
        cfg.alarm.incipient_threshold = s["incipient_threshold"].get<double>();
      }
      if (s.contains("off_threshold")) cfg.alarm.off_threshold = s["off_threshold"].get<double>();
      if (s.contains("on_hold_frames")) {
        cfg.alarm.on_hold_frames = s["on_hold_frames"].get<std::size_t>();
      }
      if (s.contains("off_hold_frames")) {
        cfg.alarm.off_hold_frames = s["off_hold_frames"].get<std::size_t>();
      }
    }
    if (j.contains("library_path")) cfg.library_path = j["library_path"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("window_seconds")) cfg.window_seconds = j["window_seconds"].get<double>();
    if (j.contains("cusum_feature")) cfg.cusum_feature = j["cusum_feature"].get<std::size_t>();
    if (j.contains("cusum_drift")) cfg.cusum_drift = j["cusum_drift"].get<double>();
    if (j.contains("cusum_threshold")) cfg.cusum_threshold = j["cusum_threshold"].get<double>();
    if (j.contains("operating_point")) {
      const auto& s = j["operating_point"];
      if (s.contains("line_frequency_hz")) {
        cfg.op.line_frequency_hz = s["line_frequency_hz"].get<double>();
      }
      if (s.contains("supply_voltage_v")) {
        cfg.op.supply_voltage_v = s["supply_voltage_v"].get<double>();
      }
      if (s.contains("phase_shift_rad")) {
        cfg.op.phase_shift_rad = s["phase_shift_rad"].get<double>();
      }
      if (s.contains("speed_rpm")) cfg.op.speed_rpm = s["speed_rpm"].get<double>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << config_to_json(cfg) << "\n";
}

namespace {

struct WindowOutcome {
  FeatureVector fused;
  double dominant_peak_hz = 0.0;
  bool ica_converged = true;
  double ica_whiteness_error = 0.0;
};

// One window through the mode's feature path. Timing accumulators are
// optional so calibration can reuse the path without the bookkeeping.
WindowOutcome process_window(const PipelineConfig& cfg, const MultiChannelRecord& window,
                             AnalysisMode mode, StageTiming* timing,
                             WindowArtifacts* artifacts) {
  WindowOutcome outcome;
  MultiChannelRecord observed = window;

  if (mode == AnalysisMode::Hybrid) {
    auto t0 = Clock::now();
    observed = decimate(observed, cfg.decimation);
    if (timing != nullptr) timing->decimate_s += seconds_since(t0);

    if (cfg.smoothing_window >= 3) {
      t0 = Clock::now();
      observed = smooth(observed, cfg.smoothing_window);
      if (timing != nullptr) timing->smooth_s += seconds_since(t0);
    }
  }

  MultiChannelRecord analyzed;  // channels whose features are extracted
  if (mode == AnalysisMode::Hybrid) {
    const auto t0 = Clock::now();
    auto [white, whitener] = center_whiten(observed);
    UnmixingMatrix unmixing = ica_fit(white, cfg.ica);
    unmixing.whitener = whitener;
    outcome.ica_converged = unmixing.converged;
    outcome.ica_whiteness_error = unmixing.input_whiteness_error;
    analyzed = separate(unmixing, observed);
    // The separation scale is arbitrary (sources are recovered up to
    // permutation and scaling), so each source is standardized to unit rms
    // before feature extraction.
    for (auto& ch : analyzed.channels) {
      double power = 0.0;
      for (double v : ch.samples) power += v * v;
      const double rms = std::sqrt(power / static_cast<double>(ch.samples.size()));
      if (rms > 1e-12) {
        for (auto& v : ch.samples) v /= rms;
      }
    }
    if (timing != nullptr) timing->bss_s += seconds_since(t0);
  } else if (mode == AnalysisMode::FusionOnly) {
    analyzed = observed;
  } else {
    analyzed.sample_rate_hz = observed.sample_rate_hz;
    analyzed.channels.push_back(observed.channels.front());
  }

  auto t0 = Clock::now();
  std::vector<Spectrogram> spectra;
  spectra.reserve(analyzed.channel_count());
  for (std::size_t c = 0; c < analyzed.channel_count(); ++c) {
    spectra.push_back(stft(analyzed, c, cfg.stft));
  }
  // The observed first channel provides the reported dominant peak.
  const Spectrogram observed_spec = stft(observed, 0, cfg.stft);
  if (timing != nullptr) timing->stft_s += seconds_since(t0);

  {
    double best = -1.0;
    std::size_t best_bin = 0;
    for (std::size_t f = 0; f < observed_spec.frames(); ++f) {
      for (std::size_t b = 0; b < observed_spec.bins(); ++b) {
        if (observed_spec.magnitude(f, b) > best) {
          best = observed_spec.magnitude(f, b);
          best_bin = b;
        }
      }
    }
    outcome.dominant_peak_hz = observed_spec.bin_freqs_hz[best_bin];
  }

  t0 = Clock::now();
  std::vector<FeatureVector> features;
  features.reserve(analyzed.channel_count());
  for (std::size_t c = 0; c < analyzed.channel_count(); ++c) {
    features.push_back(
        extract_features(analyzed.channels[c].samples, spectra[c], cfg.op, cfg.features));
  }
  std::vector<double> weights = cfg.fusion_weights;
  if (weights.empty()) {
    weights = uniform_weights(features.size());
  } else if (weights.size() != features.size()) {
    throw std::invalid_argument(
        "analyze: " + std::to_string(weights.size()) + " fusion weights for " +
        std::to_string(features.size()) + " analyzed channels");
  }
  outcome.fused = fuse(features, weights);
  if (timing != nullptr) timing->features_s += seconds_since(t0);

  if (artifacts != nullptr) {
    artifacts->separated = analyzed;
    artifacts->source_spectrograms = spectra;
  }
  return outcome;
}

}  // namespace

AnalysisReport run_analyze(const PipelineConfig& cfg, const MultiChannelRecord& input,
                           const SignatureLibrary& lib,
                           std::vector<WindowArtifacts>* artifacts, AnalysisMode mode) {
  cfg.validate();
  input.validate();
  lib.validate();
  if (std::abs(cfg.sample_rate_hz - input.sample_rate_hz) > 1e-9) {
    throw std::invalid_argument(
        "analyze: config sample_rate_hz " + std::to_string(cfg.sample_rate_hz) +
        " does not match record sample rate " + std::to_string(input.sample_rate_hz));
  }
  const auto window_samples =
      static_cast<std::size_t>(std::llround(cfg.window_seconds * cfg.sample_rate_hz));
  if (window_samples == 0 || input.length() < window_samples) {
    throw std::invalid_argument("analyze: record shorter than one analysis window");
  }
  const std::size_t analyzed_rate_div = mode == AnalysisMode::Hybrid ? cfg.decimation : 1;
  if (window_samples / analyzed_rate_div < cfg.stft.window_len) {
    throw std::invalid_argument(
        "analyze: window_seconds too short for stft.window_len at the analyzed rate");
  }

  const auto total_start = Clock::now();
  AnalysisReport report;
  const std::size_t window_count = input.length() / window_samples;

  std::vector<std::pair<double, std::vector<LabelScore>>> classified_frames;
  for (std::size_t w = 0; w < window_count; ++w) {
    const MultiChannelRecord window_record =
        slice_record(input, w * window_samples, window_samples);
    WindowArtifacts window_artifacts;
    const WindowOutcome outcome =
        process_window(cfg, window_record, mode, &report.timing,
                       artifacts != nullptr ? &window_artifacts : nullptr);
    if (artifacts != nullptr) artifacts->push_back(std::move(window_artifacts));

    WindowResult result;
    result.index = w;
    result.start_s = static_cast<double>(w * window_samples) / cfg.sample_rate_hz;
    result.fused = outcome.fused;
    result.dominant_peak_hz = outcome.dominant_peak_hz;
    result.ica_converged = outcome.ica_converged;
    result.ica_whiteness_error = outcome.ica_whiteness_error;

    const auto t0 = Clock::now();
    result.classification = classify(outcome.fused, lib, 2);
    report.timing.classify_s += seconds_since(t0);

    classified_frames.emplace_back(result.start_s, result.classification);
    report.windows.push_back(std::move(result));
  }

  {
    const auto t0 = Clock::now();
    report.alarm_events = run_monitor(classified_frames, cfg.alarm);
    report.timing.alarm_s += seconds_since(t0);
  }

  // Change detection on the configured fused feature, drift/threshold scaled
  // by the warm-up reference level.
  if (!report.windows.empty() &&
      cfg.cusum_feature < report.windows.front().fused.values.size()) {
    std::vector<double> series;
    series.reserve(report.windows.size());
    for (const auto& w : report.windows) {
      series.push_back(w.fused.values[cfg.cusum_feature]);
    }
    const std::size_t warmup = std::clamp<std::size_t>(series.size() / 2, 1, kCusumWarmup);
    double ref = 0.0;
    for (std::size_t i = 0; i < warmup; ++i) ref += series[i];
    ref /= static_cast<double>(warmup);
    const double scale = std::max(std::abs(ref), 1e-12);
    ChangeDetector detector(cfg.cusum_drift * scale, cfg.cusum_threshold * scale, warmup);
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (auto idx = detector.push(series[i])) report.change_windows.push_back(*idx);
    }
  }

  report.timing.total_s = seconds_since(total_start);
  return report;
}

std::string report_to_json(const AnalysisReport& report, bool include_timing) {
  json j;
  j["windows"] = json::array();
  for (const auto& w : report.windows) {
    json cls = json::array();
    for (const auto& c : w.classification) {
      cls.push_back({{"label", c.label}, {"score", c.score}});
    }
    j["windows"].push_back({{"index", w.index},
                            {"start_s", w.start_s},
                            {"classification", cls},
                            {"features", w.fused.values},
                            {"dominant_peak_hz", w.dominant_peak_hz},
                            {"ica_converged", w.ica_converged},
                            {"ica_whiteness_error", w.ica_whiteness_error}});
  }
  j["alarm_events"] = json::array();
  for (const auto& e : report.alarm_events) {
    j["alarm_events"].push_back({{"time_s", e.frame_time_s},
                                 {"transition", alarm_transition_name(e.transition)},
                                 {"label", e.label},
                                 {"score", e.score}});
  }
  j["change_windows"] = report.change_windows;
  if (include_timing) {
    j["timing"] = {{"decimate_s", report.timing.decimate_s},
                   {"smooth_s", report.timing.smooth_s},
                   {"bss_s", report.timing.bss_s},
                   {"stft_s", report.timing.stft_s},
                   {"features_s", report.timing.features_s},
                   {"classify_s", report.timing.classify_s},
                   {"alarm_s", report.timing.alarm_s},
                   {"total_s", report.timing.total_s}};
  }
  return j.dump(2);
}

CalibrationPlan CalibrationPlan::defaults(const OperatingPoint& op) {
  CalibrationPlan plan;
  for (const std::string& label : canonical_fault_labels()) {
    CalibrationClass cls;
    cls.label = label;
    cls.fault_sets.push_back({fault_for_label(label, op)});
    for (const std::string& other : canonical_fault_labels()) {
      if (other == label) continue;
      cls.fault_sets.push_back(
          {fault_for_label(label, op), fault_for_label(other, op)});
    }
    plan.classes.push_back(std::move(cls));
  }
  return plan;
}

SignatureLibrary calibrate_library(const PipelineConfig& cfg, AnalysisMode mode,
                                   const CalibrationPlan& plan) {
  cfg.validate();
  if (plan.classes.empty()) throw std::invalid_argument("calibrate: empty plan");
  if (plan.seeds_per_case == 0) {
    throw std::invalid_argument("calibrate: seeds_per_case must be >= 1");
  }

  const NoiseRegime regimes[] = {NoiseRegime::Gaussian, NoiseRegime::UniformWhite,
                                 NoiseRegime::RandomImpulsive};

  auto windows_of = [&](const std::vector<FaultMode>& faults, std::uint64_t seed,
                        NoiseRegime regime) {
    const NoiseKind noise =
        noise_for_regime(regime, plan.snr_db, cfg.op, cfg.sample_rate_hz);
    const MultiChannelRecord record =
        generate_drive_record(cfg.op, faults, noise, cfg.sample_rate_hz,
                              plan.duration_s, seed, plan.aux_channels);
    const auto window_samples = static_cast<std::size_t>(
        std::llround(cfg.window_seconds * cfg.sample_rate_hz));
    const std::size_t count = record.length() / window_samples;
    std::vector<FeatureVector> features;
    for (std::size_t w = 0; w < count; ++w) {
      const MultiChannelRecord window =
          slice_record(record, w * window_samples, window_samples);
      features.push_back(process_window(cfg, window, mode, nullptr, nullptr).fused);
    }
    return features;
  };

  std::vector<std::pair<std::string, std::vector<FeatureVector>>> class_runs;
  std::uint64_t case_index = 0;
  for (const auto& cls : plan.classes) {
    std::vector<FeatureVector> runs;
    for (const auto& faults : cls.fault_sets) {
      for (NoiseRegime regime : regimes) {
        for (std::size_t s = 0; s < plan.seeds_per_case; ++s) {
          const std::uint64_t seed = cfg.seed ^ (0xCA11B000ULL + 7919 * case_index + s);
          auto w = windows_of(faults, seed, regime);
          runs.insert(runs.end(), w.begin(), w.end());
        }
        ++case_index;
      }
    }
    class_runs.emplace_back(cls.label, std::move(runs));
  }

  std::vector<FeatureVector> healthy_runs;
  for (NoiseRegime regime : regimes) {
    for (std::size_t s = 0; s < plan.seeds_per_case; ++s) {
      const std::uint64_t seed = cfg.seed ^ (0x8EA17900ULL + 104729 * s +
                                             static_cast<std::uint64_t>(regime));
      auto w = windows_of({Healthy{}}, seed, regime);
      healthy_runs.insert(healthy_runs.end(), w.begin(), w.end());
    }
  }

  return build_library(class_runs, healthy_runs, cfg.features.names(),
                       plan.radius_scale, plan.radius_floor);
}

CompareReport run_compare(const PipelineConfig& cfg,
                          const std::vector<Scenario>& scenarios,
                          const std::vector<AnalysisMode>& modes,
                          const CalibrationPlan& plan) {
  cfg.validate();
  CompareReport report;
  for (AnalysisMode mode : modes) {
    ModeMetrics metrics;
    if (!scenarios.empty()) {
      const SignatureLibrary lib = calibrate_library(cfg, mode, plan);
      for (const Scenario& scenario : scenarios) {
        const AnalysisReport analysis =
            run_analyze(cfg, scenario.record, lib, nullptr, mode);
        const auto onset_window = static_cast<std::size_t>(
            std::llround(scenario.onset_s / cfg.window_seconds));
        bool detected = false;
        std::size_t first_detection = 0;
        for (const auto& w : analysis.windows) {
          const bool post_onset =
              !scenario.expected_labels.empty() && w.index >= onset_window;
          if (post_onset) {
            ++metrics.post_onset_windows;
            bool all_found = true;
            for (const auto& expected : scenario.expected_labels) {
              bool found = false;
              for (const auto& c : w.classification) {
                if (c.label == expected) found = true;
              }
              all_found = all_found && found;
            }
            if (all_found) {
              ++metrics.detected_windows;
              if (!detected) {
                detected = true;
                first_detection = w.index;
              }
            }
          } else {
            ++metrics.healthy_windows;
            if (!w.classification.empty()) ++metrics.false_positive_windows;
          }
        }
        if (!scenario.expected_labels.empty()) {
          ++metrics.scenarios;
          if (detected) {
            ++metrics.scenarios_detected;
            metrics.mean_latency_windows +=
                static_cast<double>(first_detection - onset_window);
          }
        }
      }
      if (metrics.scenarios_detected > 0) {
        metrics.mean_latency_windows /= static_cast<double>(metrics.scenarios_detected);
      }
      if (metrics.post_onset_windows > 0) {
        metrics.detection_rate = static_cast<double>(metrics.detected_windows) /
                                 static_cast<double>(metrics.post_onset_windows);
      }
    }
    report.modes.emplace_back(analysis_mode_name(mode), metrics);
  }
  return report;
}

std::string compare_to_json(const CompareReport& report) {
  json j;
  j["modes"] = json::object();
  for (const auto& [name, m] : report.modes) {
    j["modes"][name] = {{"scenarios", m.scenarios},
                        {"scenarios_detected", m.scenarios_detected},
                        {"post_onset_windows", m.post_onset_windows},
                        {"detected_windows", m.detected_windows},
                        {"healthy_windows", m.healthy_windows},
                        {"false_positive_windows", m.false_positive_windows},
                        {"detection_rate", m.detection_rate},
                        {"mean_latency_windows", m.mean_latency_windows}};
  }
  return j.dump(2);
}

const char* analysis_mode_name(AnalysisMode mode) {
  switch (mode) {
    case AnalysisMode::StftOnly: return "stft_only";
    case AnalysisMode::FusionOnly: return "fusion_only";
    case AnalysisMode::Hybrid: return "hybrid";
  }
  return "hybrid";
}

AnalysisMode analysis_mode_from_name(const std::string& name) {
  if (name == "stft_only") return AnalysisMode::StftOnly;
  if (name == "fusion_only") return AnalysisMode::FusionOnly;
  if (name == "hybrid") return AnalysisMode::Hybrid;
  throw std::invalid_argument("unknown analysis mode: " + name);
}

StageTiming pipeline_bench(const PipelineConfig& cfg, std::size_t channels,
                           double duration_s) {
  cfg.validate();
  if (channels < 3) throw std::invalid_argument("bench: need at least 3 channels");
  const std::size_t aux = channels - 3;
  const MultiChannelRecord record = generate_drive_record(
      cfg.op, {Healthy{}}, Gaussian{0.1}, cfg.sample_rate_hz, duration_s, cfg.seed, aux);

  SignatureLibrary empty;
  empty.schema = cfg.features.names();
  empty.normalization.assign(empty.schema.size(), 1.0);

  return run_analyze(cfg, record, empty).timing;
}

void write_spectrogram_csv(const Spectrogram& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("spectrogram: cannot write " + path);
  out << "time_s";
  for (double f : spec.bin_freqs_hz) out << "," << f;
  out << "\n";
  for (std::size_t fr = 0; fr < spec.frames(); ++fr) {
    out << spec.frame_times_s[fr];
    for (std::size_t b = 0; b < spec.bins(); ++b) out << "," << spec.magnitude(fr, b);
    out << "\n";
  }
}

}  // namespace mcsa
