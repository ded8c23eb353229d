#include "mcsa/stft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "mcsa/fft.hpp"

namespace mcsa {

void StftConfig::validate() const {
  if (window_len < 8 || !is_power_of_two(window_len)) {
    throw std::invalid_argument("stft: window_len must be a power of two >= 8");
  }
  if (hop == 0 || hop > window_len) {
    throw std::invalid_argument("stft: hop must be in [1, window_len]");
  }
}

std::vector<double> make_window(WindowKind kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (kind == WindowKind::Rectangular || len == 1) return w;
  const double denom = static_cast<double>(len - 1);
  for (std::size_t n = 0; n < len; ++n) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
    if (kind == WindowKind::Hann) {
      w[n] = 0.5 - 0.5 * c;
    } else {
      w[n] = 0.54 - 0.46 * c;
    }
  }
  return w;
}

Spectrogram stft(const std::vector<double>& samples, double sample_rate_hz,
                 const StftConfig& cfg) {
  cfg.validate();
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("stft: sample rate must be > 0");
  if (samples.size() < cfg.window_len) {
    throw std::invalid_argument("stft: signal shorter than the analysis window");
  }

  const std::size_t wl = cfg.window_len;
  const std::size_t bins = wl / 2 + 1;
  const std::size_t frames = (samples.size() - wl) / cfg.hop + 1;
  const std::vector<double> window = make_window(cfg.window, wl);

  Spectrogram out;
  out.sample_rate_hz = sample_rate_hz;
  out.window_len = wl;
  out.hop = cfg.hop;
  out.window_sum = 0.0;
  for (double w : window) out.window_sum += w;
  out.bin_freqs_hz.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out.bin_freqs_hz[b] = static_cast<double>(b) * sample_rate_hz / static_cast<double>(wl);
  }
  out.frame_times_s.resize(frames);
  out.magnitudes.resize(frames * bins);
  out.phases.resize(frames * bins);

  FftPlan plan(wl);
  std::vector<std::complex<double>> buf(wl);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * cfg.hop;
    out.frame_times_s[f] =
        (static_cast<double>(start) + static_cast<double>(wl) / 2.0) / sample_rate_hz;
    for (std::size_t n = 0; n < wl; ++n) {
      buf[n] = {window[n] * samples[start + n], 0.0};
    }
    plan.forward(buf);
    for (std::size_t b = 0; b < bins; ++b) {
      out.magnitudes[f * bins + b] = std::abs(buf[b]);
      out.phases[f * bins + b] = std::arg(buf[b]);
    }
  }
  return out;
}

Spectrogram stft(const MultiChannelRecord& x, std::size_t channel,
                 const StftConfig& cfg) {
  if (channel >= x.channel_count()) {
    throw std::invalid_argument("stft: channel index out of range");
  }
  return stft(x.channels[channel].samples, x.sample_rate_hz, cfg);
}

std::vector<double> band_energy(const Spectrogram& s, double f_lo_hz, double f_hi_hz) {
  const double nyquist = s.sample_rate_hz / 2.0;
  if (!(f_lo_hz >= 0.0 && f_lo_hz < f_hi_hz && f_hi_hz <= nyquist)) {
    throw std::invalid_argument("band_energy: band must satisfy 0 <= lo < hi <= Nyquist");
  }
  const std::size_t bins = s.bins();
  std::vector<double> energy(s.frames(), 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    const double f = s.bin_freqs_hz[b];
    if (f < f_lo_hz || f > f_hi_hz) continue;
    for (std::size_t fr = 0; fr < s.frames(); ++fr) {
      const double m = s.magnitudes[fr * bins + b];
      energy[fr] += m * m;
    }
  }
  return energy;
}

std::vector<std::pair<double, double>> spectral_peaks(const Spectrogram& s,
                                                      std::size_t frame,
                                                      std::size_t k) {
  if (frame >= s.frames()) throw std::invalid_argument("spectral_peaks: bad frame index");
  if (k == 0 || k > s.bins()) {
    throw std::invalid_argument("spectral_peaks: k must be in [1, bin count]");
  }
  const std::size_t bins = s.bins();
  const double* mag = s.magnitudes.data() + frame * bins;

  std::vector<std::size_t> maxima;
  for (std::size_t b = 0; b < bins; ++b) {
    const bool left_ok = b == 0 ? true : mag[b] > mag[b - 1];
    const bool right_ok = b + 1 == bins ? true : mag[b] >= mag[b + 1];
    // Plateaus keep their lowest-frequency bin (strict rise on the left,
    // non-strict on the right).
    if (b == 0) {
      if (bins > 1 && mag[0] >= mag[1]) maxima.push_back(0);
    } else if (left_ok && right_ok) {
      maxima.push_back(b);
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
    if (mag[a] != mag[b]) return mag[a] > mag[b];
    return a < b;
  });
  if (maxima.size() > k) maxima.resize(k);

  std::vector<std::pair<double, double>> peaks;
  peaks.reserve(maxima.size());
  for (std::size_t b : maxima) peaks.emplace_back(s.bin_freqs_hz[b], mag[b]);
  return peaks;
}

const char* window_kind_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::Rectangular: return "rectangular";
    case WindowKind::Hann: return "hann";
    case WindowKind::Hamming: return "hamming";
  }
  return "hann";
}

WindowKind window_kind_from_name(const std::string& name) {
  if (name == "rectangular") return WindowKind::Rectangular;
  if (name == "hann") return WindowKind::Hann;
  if (name == "hamming") return WindowKind::Hamming;
  throw std::invalid_argument("unknown window kind: " + name);
}

}  // namespace mcsa
