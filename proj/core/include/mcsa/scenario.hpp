#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsa/record.hpp"
#include "mcsa/signal_model.hpp"

namespace mcsa {

enum class NoiseRegime { Gaussian, UniformWhite, RandomImpulsive };

inline constexpr const char* kLabelHarmonic = "harmonic_injection";
inline constexpr const char* kLabelSideband = "sideband";
inline constexpr const char* kLabelValve = "valve_noise";

std::vector<std::string> canonical_fault_labels();

// The shipped fault catalog: harmonic injection at 3x the line frequency,
// sidebands +/-10 Hz around it, and valve bursts.
FaultMode fault_for_label(const std::string& label, const OperatingPoint& op);

struct ScenarioConfig {
  OperatingPoint op;
  double sample_rate_hz = 4000.0;
  double duration_s = 6.0;
  double onset_s = 2.0;   // faults become active here (window-aligned by choice)
  double snr_db = 10.0;
  std::size_t aux_channels = 1;
};

// Noise parameters sized so that noise power is clean-signal power (closed
// form for the phase waveform) scaled by 10^(-snr_db/10). Impulsive noise
// fixes the rate at 50 impulses/s and sizes the amplitude.
NoiseKind noise_for_regime(NoiseRegime regime, double snr_db,
                           const OperatingPoint& op, double sample_rate_hz);

// Healthy prefix spliced with a faulted suffix at onset_s. Both halves come
// from the same seed, so waveform phase and the noise stream are continuous
// across the splice.
MultiChannelRecord spliced_fault_record(const ScenarioConfig& cfg,
                                        const std::vector<FaultMode>& faults,
                                        const NoiseKind& noise, std::uint64_t seed);

struct Scenario {
  std::string name;
  std::vector<std::string> expected_labels;  // empty for healthy records
  double onset_s = 0.0;                      // 0 for healthy records
  MultiChannelRecord record;
};

// Single-fault scenarios cycling through the fault catalog, plus one healthy
// record per seed, all under one noise regime.
std::vector<Scenario> detection_suite(NoiseRegime regime, std::size_t seeds,
                                      const ScenarioConfig& cfg);

// Scenarios carrying two distinct simultaneous faults.
std::vector<Scenario> dual_fault_suite(std::size_t seeds, const ScenarioConfig& cfg);

// Valve-burst faults under impulsive sensor noise (the regime where a plain
// short-time spectral detector struggles), plus healthy impulsive records.
std::vector<Scenario> valve_noise_suite(std::size_t seeds, const ScenarioConfig& cfg);

const char* noise_regime_name(NoiseRegime regime);

}  // namespace mcsa
