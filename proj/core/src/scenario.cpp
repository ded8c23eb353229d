#include "mcsa/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace mcsa {

namespace {

// Mean power of the clean phase waveform: fundamental plus the fixed 5th and
// 7th harmonic amplitudes, unit supply scaling.
double clean_phase_power(const OperatingPoint& op) {
  const double a = op.supply_voltage_v / kReferenceSupplyVoltage;
  return 0.5 * a * a *
         (1.0 + kFifthHarmonicAmplitude * kFifthHarmonicAmplitude +
          kSeventhHarmonicAmplitude * kSeventhHarmonicAmplitude);
}

}  // namespace

std::vector<std::string> canonical_fault_labels() {
  return {kLabelHarmonic, kLabelSideband, kLabelValve};
}

FaultMode fault_for_label(const std::string& label, const OperatingPoint& op) {
  // Strengths are balanced so no fault's signature dwarfs the others in
  // normalized feature space; a lopsided catalog would blur the calibrated
  // tolerance radii of the weaker classes.
  if (label == kLabelHarmonic) return HarmonicInjection{3, 0.28};
  if (label == kLabelSideband) return Sideband{op.line_frequency_hz, 10.0, 1.0};
  if (label == kLabelValve) return StochasticValveNoise{40.0, 2.5};
  throw std::invalid_argument("scenario: unknown fault label '" + label + "'");
}

NoiseKind noise_for_regime(NoiseRegime regime, double snr_db,
                           const OperatingPoint& op, double sample_rate_hz) {
  const double noise_power = clean_phase_power(op) * std::pow(10.0, -snr_db / 10.0);
  switch (regime) {
    case NoiseRegime::Gaussian:
      return Gaussian{std::sqrt(noise_power)};
    case NoiseRegime::UniformWhite:
      return UniformWhite{std::sqrt(3.0 * noise_power)};
    case NoiseRegime::RandomImpulsive:
    default: {
      const double rate = 50.0;
      return RandomImpulsive{rate, std::sqrt(noise_power * sample_rate_hz / rate)};
    }
  }
}

MultiChannelRecord spliced_fault_record(const ScenarioConfig& cfg,
                                        const std::vector<FaultMode>& faults,
                                        const NoiseKind& noise, std::uint64_t seed) {
  if (cfg.onset_s < 0.0 || cfg.onset_s >= cfg.duration_s) {
    throw std::invalid_argument("scenario: onset must lie inside the record");
  }
  MultiChannelRecord healthy =
      generate_drive_record(cfg.op, {Healthy{}}, noise, cfg.sample_rate_hz,
                            cfg.duration_s, seed, cfg.aux_channels);
  MultiChannelRecord faulted =
      generate_drive_record(cfg.op, faults, noise, cfg.sample_rate_hz,
                            cfg.duration_s, seed, cfg.aux_channels);
  const auto onset =
      static_cast<std::size_t>(std::llround(cfg.onset_s * cfg.sample_rate_hz));
  for (std::size_t c = 0; c < faulted.channel_count(); ++c) {
    for (std::size_t i = 0; i < onset && i < faulted.length(); ++i) {
      faulted.channels[c].samples[i] = healthy.channels[c].samples[i];
    }
  }
  return faulted;
}

std::vector<Scenario> detection_suite(NoiseRegime regime, std::size_t seeds,
                                      const ScenarioConfig& cfg) {
  const std::vector<std::string> labels = canonical_fault_labels();
  const NoiseKind noise =
      noise_for_regime(regime, cfg.snr_db, cfg.op, cfg.sample_rate_hz);
  std::vector<Scenario> out;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::string& label = labels[s % labels.size()];
    const std::uint64_t seed = 0x5C000000ULL + 1000 * s +
                               static_cast<std::uint64_t>(regime);
    Scenario fault;
    fault.name = std::string(noise_regime_name(regime)) + "/" + label + "/seed" +
                 std::to_string(s);
    fault.expected_labels = {label};
    fault.onset_s = cfg.onset_s;
    fault.record = spliced_fault_record(cfg, {fault_for_label(label, cfg.op)},
                                        noise, seed);
    out.push_back(std::move(fault));

    Scenario healthy;
    healthy.name = std::string(noise_regime_name(regime)) + "/healthy/seed" +
                   std::to_string(s);
    healthy.record = generate_drive_record(cfg.op, {Healthy{}}, noise,
                                           cfg.sample_rate_hz, cfg.duration_s,
                                           seed ^ 0xABCDEFULL, cfg.aux_channels);
    out.push_back(std::move(healthy));
  }
  return out;
}

std::vector<Scenario> dual_fault_suite(std::size_t seeds, const ScenarioConfig& cfg) {
  const std::vector<std::string> labels = canonical_fault_labels();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      pairs.emplace_back(labels[i], labels[j]);
    }
  }
  const NoiseKind noise = noise_for_regime(NoiseRegime::Gaussian, cfg.snr_db,
                                           cfg.op, cfg.sample_rate_hz);
  std::vector<Scenario> out;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto& [a, b] = pairs[s % pairs.size()];
    Scenario sc;
    sc.name = "dual/" + a + "+" + b + "/seed" + std::to_string(s);
    sc.expected_labels = {a, b};
    sc.onset_s = cfg.onset_s;
    sc.record = spliced_fault_record(
        cfg, {fault_for_label(a, cfg.op), fault_for_label(b, cfg.op)}, noise,
        0xD0000000ULL + 1000 * s);
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<Scenario> valve_noise_suite(std::size_t seeds, const ScenarioConfig& cfg) {
  const NoiseKind noise = noise_for_regime(NoiseRegime::RandomImpulsive, cfg.snr_db,
                                           cfg.op, cfg.sample_rate_hz);
  std::vector<Scenario> out;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = 0xA1000000ULL + 1000 * s;
    Scenario fault;
    fault.name = "valve/impulsive/seed" + std::to_string(s);
    fault.expected_labels = {kLabelValve};
    fault.onset_s = cfg.onset_s;
    fault.record = spliced_fault_record(cfg, {fault_for_label(kLabelValve, cfg.op)},
                                        noise, seed);
    out.push_back(std::move(fault));

    Scenario healthy;
    healthy.name = "healthy/impulsive/seed" + std::to_string(s);
    healthy.record = generate_drive_record(cfg.op, {Healthy{}}, noise,
                                           cfg.sample_rate_hz, cfg.duration_s,
                                           seed ^ 0xABCDEFULL, cfg.aux_channels);
    out.push_back(std::move(healthy));
  }
  return out;
}

const char* noise_regime_name(NoiseRegime regime) {
  switch (regime) {
    case NoiseRegime::Gaussian: return "gaussian";
    case NoiseRegime::UniformWhite: return "uniform_white";
    case NoiseRegime::RandomImpulsive: return "random_impulsive";
  }
  return "gaussian";
}

}  // namespace mcsa
