#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/alarm.hpp"
#include "mcsa/bss.hpp"
#include "mcsa/multirate.hpp"
#include "mcsa/record.hpp"
#include "mcsa/scenario.hpp"
#include "mcsa/signature.hpp"
#include "mcsa/stft.hpp"

namespace mcsa {

// Which stages feed the classifier. Hybrid is the full chain
// (decimate -> smooth -> separate -> per-source spectra -> fuse); fusion_only
// fuses per-channel spectral features of the raw record; stft_only looks at
// the first channel alone.
enum class AnalysisMode { StftOnly, FusionOnly, Hybrid };

struct PipelineConfig {
  double sample_rate_hz = 50000.0;
  unsigned decimation = 16;
  std::size_t smoothing_window = 0;  // 0 disables the smoothing stage
  StftConfig stft;
  IcaConfig ica;
  FeatureConfig features = FeatureConfig::defaults();
  std::vector<double> fusion_weights;  // empty = uniform over channels
  AlarmConfig alarm;
  std::string library_path;
  std::uint64_t seed = 42;
  double window_seconds = 2.0;  // one analysis unit
  // CUSUM over one fused feature (by schema index, normally the band that
  // covers the monitored fault); drift/threshold are in units of the warm-up
  // reference level.
  std::size_t cusum_feature = 0;
  double cusum_drift = 0.5;
  double cusum_threshold = 8.0;
  OperatingPoint op;

  void validate() const;
};

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

struct WindowResult {
  std::size_t index = 0;
  double start_s = 0.0;
  std::vector<LabelScore> classification;
  FeatureVector fused;
  // Strongest spectral bin of the first observed channel after rate
  // conversion; reported for plotting and sanity checks.
  double dominant_peak_hz = 0.0;
  bool ica_converged = true;
  double ica_whiteness_error = 0.0;
};

struct StageTiming {
  double decimate_s = 0.0;
  double smooth_s = 0.0;
  double bss_s = 0.0;
  double stft_s = 0.0;
  double features_s = 0.0;
  double classify_s = 0.0;
  double alarm_s = 0.0;
  double total_s = 0.0;
};

// Per-window artifacts kept only when the caller asks for exports.
struct WindowArtifacts {
  MultiChannelRecord separated;
  std::vector<Spectrogram> source_spectrograms;
};

struct AnalysisReport {
  std::vector<WindowResult> windows;
  std::vector<AlarmEvent> alarm_events;
  std::vector<std::size_t> change_windows;
  StageTiming timing;
};

// Fixed stage order: decimate -> smooth (optional) -> whiten/fit/separate
// (each separated source standardized to unit rms, since the unmixing scale
// is arbitrary) -> per-source stft -> extract_features -> fuse -> classify ->
// alarm fold. Windows of window_seconds are processed independently (the
// unmixing is refit per window); the alarm fold runs strictly in window
// order.
AnalysisReport run_analyze(const PipelineConfig& cfg, const MultiChannelRecord& input,
                           const SignatureLibrary& lib,
                           std::vector<WindowArtifacts>* artifacts = nullptr,
                           AnalysisMode mode = AnalysisMode::Hybrid);

// Deterministic report serialization; timing is measurement noise, so
// byte-identical comparisons pass include_timing = false.
std::string report_to_json(const AnalysisReport& report, bool include_timing = true);

// Calibration plan: each class lists the fault combinations its runs cover
// (the shipped default pairs every fault with each other fault once, so the
// two-simultaneous-fault envelope is part of every template's spread).
struct CalibrationClass {
  std::string label;
  std::vector<std::vector<FaultMode>> fault_sets;
};

struct CalibrationPlan {
  std::vector<CalibrationClass> classes;
  std::size_t seeds_per_case = 2;
  double snr_db = 10.0;
  double duration_s = 4.0;
  // The paired-fault runs inside each class put the largest in-class
  // distance at roughly three quarters of the healthy distance; the scale
  // must stay well below their ratio or healthy windows start matching.
  double radius_scale = 1.1;
  double radius_floor = 0.5;
  std::size_t aux_channels = 1;

  static CalibrationPlan defaults(const OperatingPoint& op);
};

// Builds a signature library by running the mode's feature path over seeded
// healthy and faulted records under all three noise regimes.
SignatureLibrary calibrate_library(const PipelineConfig& cfg, AnalysisMode mode,
                                   const CalibrationPlan& plan);

struct ModeMetrics {
  std::size_t scenarios = 0;
  std::size_t scenarios_detected = 0;
  std::size_t post_onset_windows = 0;
  std::size_t detected_windows = 0;
  std::size_t healthy_windows = 0;  // healthy records plus pre-onset windows
  std::size_t false_positive_windows = 0;
  double detection_rate = 0.0;
  double mean_latency_windows = 0.0;  // over scenarios that detected at all
};

struct CompareReport {
  std::vector<std::pair<std::string, ModeMetrics>> modes;
};

// Runs every mode over the scenario suite, calibrating one library per mode
// from the same plan.
CompareReport run_compare(const PipelineConfig& cfg,
                          const std::vector<Scenario>& scenarios,
                          const std::vector<AnalysisMode>& modes,
                          const CalibrationPlan& plan);
std::string compare_to_json(const CompareReport& report);

const char* analysis_mode_name(AnalysisMode mode);
AnalysisMode analysis_mode_from_name(const std::string& name);

// Full-pipeline latency measurement over a synthetic record of the given
// duration and channel count at cfg.sample_rate_hz (library empty: the run
// measures the processing path, not the match outcome).
StageTiming pipeline_bench(const PipelineConfig& cfg, std::size_t channels,
                           double duration_s);

// Spectrogram CSV export: header row of bin frequencies, one row per frame
// prefixed by the frame time.
void write_spectrogram_csv(const Spectrogram& spec, const std::string& path);

}  // namespace mcsa
