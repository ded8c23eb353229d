#include "mcsa/signal_model.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mcsa/rng.hpp"

namespace mcsa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream id layout for generate_*: the waveform itself is deterministic, so
// streams are only needed for stochastic components.
constexpr std::uint64_t kValveStream = 101;
constexpr std::uint64_t kAuxStreamBase = 200;
constexpr std::uint64_t kNoiseSeedSalt = 0x6e6f697365ULL;  // generate-internal noise

void validate_noise(const NoiseKind& noise) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          if (n.sigma <= 0.0) throw std::invalid_argument("noise: sigma must be > 0");
        } else if constexpr (std::is_same_v<T, UniformWhite>) {
          if (n.half_range <= 0.0)
            throw std::invalid_argument("noise: half_range must be > 0");
        } else {
          if (n.rate_hz <= 0.0 || n.amplitude <= 0.0)
            throw std::invalid_argument("noise: rate and amplitude must be > 0");
        }
      },
      noise);
}

void validate_faults(const std::vector<FaultMode>& faults) {
  std::size_t active = 0;
  for (const auto& f : faults) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Healthy>) {
            return;
          } else if constexpr (std::is_same_v<T, HarmonicInjection>) {
            if (m.order < 1) throw std::invalid_argument("fault: harmonic order must be >= 1");
            if (m.relative_amplitude <= 0.0 || m.relative_amplitude > 1.0)
              throw std::invalid_argument("fault: relative_amplitude must be in (0, 1]");
            ++active;
          } else if constexpr (std::is_same_v<T, Sideband>) {
            if (m.carrier_hz <= 0.0 || m.offset_hz <= 0.0)
              throw std::invalid_argument("fault: carrier and offset must be > 0");
            if (m.depth <= 0.0 || m.depth > 1.0)
              throw std::invalid_argument("fault: depth must be in (0, 1]");
            ++active;
          } else {
            if (m.burst_rate_hz <= 0.0 || m.burst_amplitude <= 0.0)
              throw std::invalid_argument("fault: burst rate and amplitude must be > 0");
            ++active;
          }
        },
        f);
  }
  if (active > 2) {
    throw std::invalid_argument("at most two simultaneous fault modes are supported");
  }
}

// Common-mode burst train for valve-noise faults: Poisson arrivals, each a
// decaying oscillation at the valve ring frequency with a random phase.
std::vector<double> valve_burst_train(const StochasticValveNoise& v, double fs,
                                      std::size_t n, Rng rng) {
  std::vector<double> train(n, 0.0);
  const std::size_t decay_samples =
      std::max<std::size_t>(1, static_cast<std::size_t>(6.0 * kValveBurstDecayS * fs));
  double t = rng.exponential(v.burst_rate_hz);
  while (t * fs < static_cast<double>(n)) {
    const auto start = static_cast<std::size_t>(t * fs);
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < decay_samples && start + i < n; ++i) {
      const double tau = static_cast<double>(i) / fs;
      train[start + i] += v.burst_amplitude * std::exp(-tau / kValveBurstDecayS) *
                          std::sin(kTwoPi * kValveBurstRingHz * tau + phase);
    }
    t += rng.exponential(v.burst_rate_hz);
  }
  return train;
}

void add_noise_channel(std::vector<double>& samples, const NoiseKind& noise,
                       double fs, Rng rng) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          for (auto& s : samples) s += n.sigma * rng.gaussian();
        } else if constexpr (std::is_same_v<T, UniformWhite>) {
          for (auto& s : samples) s += rng.uniform(-n.half_range, n.half_range);
        } else {
          double t = rng.exponential(n.rate_hz);
          while (t * fs < static_cast<double>(samples.size())) {
            const auto idx = static_cast<std::size_t>(t * fs);
            samples[idx] += rng.bernoulli(0.5) ? n.amplitude : -n.amplitude;
            t += rng.exponential(n.rate_hz);
          }
        }
      },
      noise);
}

}  // namespace

void OperatingPoint::validate() const {
  if (line_frequency_hz <= 0.0)
    throw std::invalid_argument("operating point: line_frequency_hz must be > 0");
  if (supply_voltage_v <= 0.0)
    throw std::invalid_argument("operating point: supply_voltage_v must be > 0");
  if (speed_rpm <= 0.0)
    throw std::invalid_argument("operating point: speed_rpm must be > 0");
}

MultiChannelRecord generate_phase_currents(const OperatingPoint& op,
                                           const std::vector<FaultMode>& faults,
                                           const NoiseKind& noise,
                                           double sample_rate_hz, double duration_s,
                                           std::uint64_t seed) {
  op.validate();
  validate_faults(faults);
  validate_noise(noise);
  if (sample_rate_hz <= 0.0)
    throw std::invalid_argument("generate: sample_rate_hz must be > 0");
  if (duration_s <= 0.0) throw std::invalid_argument("generate: duration_s must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
  if (n < 64) throw std::invalid_argument("generate: need at least 64 samples");

  const double amp = op.supply_voltage_v / kReferenceSupplyVoltage;
  const double omega = kTwoPi * op.line_frequency_hz;
  Rng base(seed);

  // One shared burst train per record: a valve transient hits every phase.
  std::vector<double> bursts;
  for (const auto& f : faults) {
    if (const auto* v = std::get_if<StochasticValveNoise>(&f)) {
      std::vector<double> train = valve_burst_train(*v, sample_rate_hz, n,
                                                    base.stream(kValveStream));
      if (bursts.empty()) {
        bursts = std::move(train);
      } else {
        for (std::size_t i = 0; i < n; ++i) bursts[i] += train[i];
      }
    }
  }

  MultiChannelRecord out;
  out.sample_rate_hz = sample_rate_hz;
  const char* labels[3] = {"phase_a", "phase_b", "phase_c"};
  for (int p = 0; p < 3; ++p) {
    Channel ch;
    ch.label = labels[p];
    ch.samples.resize(n);
    const double theta_p = -kTwoPi * p / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate_hz;
      const double arg = omega * t + op.phase_shift_rad + theta_p;
      double s = std::sin(arg) + kFifthHarmonicAmplitude * std::sin(5.0 * arg) +
                 kSeventhHarmonicAmplitude * std::sin(7.0 * arg);
      for (const auto& f : faults) {
        if (const auto* h = std::get_if<HarmonicInjection>(&f)) {
          s += h->relative_amplitude * std::sin(h->order * arg);
        } else if (const auto* sb = std::get_if<Sideband>(&f)) {
          s += sb->depth * std::sin(kTwoPi * sb->carrier_hz * t +
                                    op.phase_shift_rad + theta_p) *
               std::cos(kTwoPi * sb->offset_hz * t);
        }
      }
      ch.samples[i] = amp * s;
    }
    if (!bursts.empty()) {
      for (std::size_t i = 0; i < n; ++i) ch.samples[i] += amp * bursts[i];
    }
    out.channels.push_back(std::move(ch));
  }

  return add_noise(out, noise, seed ^ kNoiseSeedSalt);
}

MultiChannelRecord generate_drive_record(const OperatingPoint& op,
                                         const std::vector<FaultMode>& faults,
                                         const NoiseKind& noise,
                                         double sample_rate_hz, double duration_s,
                                         std::uint64_t seed,
                                         std::size_t aux_channels) {
  MultiChannelRecord rec =
      generate_phase_currents(op, faults, noise, sample_rate_hz, duration_s, seed);
  if (aux_channels == 0) return rec;

  const std::size_t n = rec.length();
  Rng base(seed);

  // The pressure channel sees the valve bursts half again as strongly as the
  // phases; the fundamental couples in weakly.
  std::vector<double> bursts;
  for (const auto& f : faults) {
    if (const auto* v = std::get_if<StochasticValveNoise>(&f)) {
      std::vector<double> train = valve_burst_train(*v, sample_rate_hz, n,
                                                    base.stream(kValveStream));
      if (bursts.empty()) {
        bursts = std::move(train);
      } else {
        for (std::size_t i = 0; i < n; ++i) bursts[i] += train[i];
      }
    }
  }

  const double amp = op.supply_voltage_v / kReferenceSupplyVoltage;
  for (std::size_t a = 0; a < aux_channels; ++a) {
    Channel ch;
    ch.samples.resize(n);
    if (a == 0) {
      ch.label = "aux_pressure";
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        double s = 0.5 * std::sin(kTwoPi * 1.5 * t) +
                   0.05 * std::sin(kTwoPi * op.line_frequency_hz * t + op.phase_shift_rad);
        if (!bursts.empty()) s += 1.5 * bursts[i];
        ch.samples[i] = amp * s;
      }
    } else {
      ch.label = "aux_temperature_" + std::to_string(a);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        ch.samples[i] = amp * (0.3 * std::sin(kTwoPi * 0.2 * t + 0.7 * a) + 0.1 * t / duration_s);
      }
    }
    add_noise_channel(ch.samples, noise, sample_rate_hz,
                      Rng(seed ^ kNoiseSeedSalt).stream(kAuxStreamBase + a));
    rec.channels.push_back(std::move(ch));
  }
  return rec;
}

SourceSet generate_sources(const std::vector<SourceKind>& kinds,
                           double sample_rate_hz, double duration_s,
                           std::uint64_t seed) {
  if (kinds.empty()) throw std::invalid_argument("sources: need at least one kind");
  if (sample_rate_hz <= 0.0 || duration_s <= 0.0)
    throw std::invalid_argument("sources: rate and duration must be > 0");
  std::size_t gaussians = 0;
  for (const auto& k : kinds) {
    if (std::holds_alternative<GaussianSource>(k)) ++gaussians;
  }
  if (gaussians > 1) {
    throw std::invalid_argument("sources: at most one Gaussian channel is allowed");
  }

  const auto n = static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
  if (n == 0) throw std::invalid_argument("sources: empty record");

  SourceSet out;
  out.sample_rate_hz = sample_rate_hz;
  Rng base(seed);
  for (std::size_t c = 0; c < kinds.size(); ++c) {
    Channel ch;
    ch.samples.resize(n);
    Rng rng = base.stream(c);
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate_hz;
            if constexpr (std::is_same_v<T, SineSource>) {
              ch.label = "sine";
              ch.samples[i] = std::sin(kTwoPi * k.frequency_hz * t);
            } else if constexpr (std::is_same_v<T, SawtoothSource>) {
              ch.label = "sawtooth";
              const double phase = k.frequency_hz * t;
              ch.samples[i] = 2.0 * (phase - std::floor(phase)) - 1.0;
            } else if constexpr (std::is_same_v<T, SquareSource>) {
              ch.label = "square";
              ch.samples[i] = std::sin(kTwoPi * k.frequency_hz * t) >= 0.0 ? 1.0 : -1.0;
            } else if constexpr (std::is_same_v<T, LaplaceSource>) {
              ch.label = "laplace";
              ch.samples[i] = rng.laplace(k.scale);
            } else if constexpr (std::is_same_v<T, UniformSource>) {
              ch.label = "uniform";
              ch.samples[i] = rng.uniform(-k.half_range, k.half_range);
            } else {
              ch.label = "gaussian";
              ch.samples[i] = k.sigma * rng.gaussian();
            }
          }
        },
        kinds[c]);
    ch.label += "_" + std::to_string(c);
    out.channels.push_back(std::move(ch));
  }
  return out;
}

MultiChannelRecord mix_sources(const MixingMatrix& a, const SourceSet& s) {
  s.validate();
  if (a.rows == 0 || a.cols == 0) throw std::invalid_argument("mix: empty matrix");
  if (a.cols != s.channel_count()) {
    throw std::invalid_argument("mix: matrix has " + std::to_string(a.cols) +
                                " columns but the source set has " +
                                std::to_string(s.channel_count()) + " channels");
  }
  const std::size_t n = s.length();
  MultiChannelRecord out;
  out.sample_rate_hz = s.sample_rate_hz;
  out.channels.resize(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    out.channels[i].label = "mix_" + std::to_string(i);
    auto& dst = out.channels[i].samples;
    dst.assign(n, 0.0);
    for (std::size_t j = 0; j < a.cols; ++j) {
      const double aij = a.at(i, j);
      const auto& src = s.channels[j].samples;
      for (std::size_t t = 0; t < n; ++t) dst[t] += aij * src[t];
    }
  }
  return out;
}

MultiChannelRecord add_noise(const MultiChannelRecord& x, const NoiseKind& noise,
                             std::uint64_t seed) {
  x.validate();
  validate_noise(noise);
  MultiChannelRecord out = x;
  Rng base(seed);
  for (std::size_t c = 0; c < out.channels.size(); ++c) {
    add_noise_channel(out.channels[c].samples, noise, out.sample_rate_hz,
                      base.stream(c));
  }
  return out;
}

double condition_number(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m.at(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

MixingMatrix random_mixing_matrix(std::size_t size, std::uint64_t seed,
                                  double max_condition) {
  if (size == 0) throw std::invalid_argument("mixing matrix: size must be >= 1");
  if (max_condition > 1e6) {
    throw std::invalid_argument("mixing matrix: condition number bound above 1e6");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MixingMatrix a(size, size);
    for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
    if (condition_number(a) <= max_condition) return a;
  }
  throw std::runtime_error("mixing matrix: no draw met the condition bound");
}

}  // namespace mcsa
