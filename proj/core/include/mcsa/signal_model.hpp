#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "mcsa/matrix.hpp"
#include "mcsa/record.hpp"

namespace mcsa {

// Electrical operating point of the drive. The defaults are the validation
// setup used throughout the tests: 50 Hz line frequency, 28 V supply, zero
// phase shift, mid-band speed.
struct OperatingPoint {
  double line_frequency_hz = 50.0;
  double supply_voltage_v = 28.0;
  double phase_shift_rad = 0.0;
  double speed_rpm = 3000.0;

  void validate() const;
};

struct Healthy {};

// Adds a tone at order * line frequency, amplitude relative to the
// fundamental, relative_amplitude in (0, 1].
struct HarmonicInjection {
  int order = 3;
  double relative_amplitude = 0.25;
};

// Amplitude modulation of a carrier: components appear at carrier +/- offset,
// each with amplitude depth/2 relative to the fundamental. depth in (0, 1].
struct Sideband {
  double carrier_hz = 50.0;
  double offset_hz = 10.0;
  double depth = 0.3;
};

// Randomly timed decaying bursts common to all phase channels, modelling the
// stochastic disturbance a nonlinear valve controller feeds back into the
// drive currents.
struct StochasticValveNoise {
  double burst_rate_hz = 100.0;
  double burst_amplitude = 2.0;
};

using FaultMode = std::variant<Healthy, HarmonicInjection, Sideband, StochasticValveNoise>;

struct Gaussian {
  double sigma = 0.1;
};
struct UniformWhite {
  double half_range = 0.1;
};
// Poisson-timed one-sample impulses of +/- amplitude, independent per channel.
struct RandomImpulsive {
  double rate_hz = 50.0;
  double amplitude = 1.0;
};
using NoiseKind = std::variant<Gaussian, UniformWhite, RandomImpulsive>;

// M x N linear mixing of N sources into M observations.
using MixingMatrix = Matrix;

// Waveform menu for ground-truth source sets. Every non-Gaussian kind has
// excess kurtosis at least 0.5 away from zero, so separability preconditions
// are testable.
struct SineSource {
  double frequency_hz = 50.0;
};
struct SawtoothSource {
  double frequency_hz = 13.0;
};
struct SquareSource {
  double frequency_hz = 7.0;
};
struct LaplaceSource {
  double scale = 1.0;
};
struct UniformSource {
  double half_range = 1.0;
};
struct GaussianSource {
  double sigma = 1.0;
};
using SourceKind = std::variant<SineSource, SawtoothSource, SquareSource,
                                LaplaceSource, UniformSource, GaussianSource>;

// Documented waveform constants: trapezoidal back-EMF approximated as
// fundamental plus 5th and 7th harmonics at fixed relative amplitudes. The
// supply voltage scales the waveform linearly, with 28 V mapping to unit
// fundamental amplitude. speed_rpm is carried as metadata and does not enter
// the waveform.
inline constexpr double kFifthHarmonicAmplitude = 0.2;
inline constexpr double kSeventhHarmonicAmplitude = 0.14;
inline constexpr double kReferenceSupplyVoltage = 28.0;
// Valve transients are modelled as decaying oscillations at a fixed
// mechanical ring frequency, common to all phases.
inline constexpr double kValveBurstDecayS = 4e-3;
inline constexpr double kValveBurstRingHz = 170.0;

// Three synthetic phase currents (labels phase_a/b/c) at the given operating
// point, with at most two simultaneous non-healthy fault modes and additive
// noise. Deterministic for a fixed seed. Requires duration * rate >= 64.
MultiChannelRecord generate_phase_currents(const OperatingPoint& op,
                                           const std::vector<FaultMode>& faults,
                                           const NoiseKind& noise,
                                           double sample_rate_hz,
                                           double duration_s,
                                           std::uint64_t seed);

// generate_phase_currents plus auxiliary sensor channels appended after the
// phases: aux 0 is a valve-pressure channel (slow oscillation plus coupled
// valve bursts), aux 1 a temperature channel (slow drift). Both receive the
// same noise kind as the phases.
MultiChannelRecord generate_drive_record(const OperatingPoint& op,
                                         const std::vector<FaultMode>& faults,
                                         const NoiseKind& noise,
                                         double sample_rate_hz,
                                         double duration_s,
                                         std::uint64_t seed,
                                         std::size_t aux_channels);

// Ground-truth sources, one channel per kind, amplitudes as configured.
// Rejects more than one GaussianSource channel.
SourceSet generate_sources(const std::vector<SourceKind>& kinds,
                           double sample_rate_hz, double duration_s,
                           std::uint64_t seed);

// x(t) = A s(t): exact per-sample linear mixing. Requires a.cols == channel
// count of s; the output has a.rows channels.
MultiChannelRecord mix_sources(const MixingMatrix& a, const SourceSet& s);

// Adds seeded noise of the given kind, one independent stream per channel.
MultiChannelRecord add_noise(const MultiChannelRecord& x, const NoiseKind& noise,
                             std::uint64_t seed);

// Square mixing matrix with uniform entries in [-1, 1], redrawn until the
// 2-norm condition number is below max_condition. Throws after 1000 attempts.
MixingMatrix random_mixing_matrix(std::size_t size, std::uint64_t seed,
                                  double max_condition = 100.0);

// 2-norm condition number; used by generators to reject ill-conditioned draws.
double condition_number(const Matrix& m);

}  // namespace mcsa
