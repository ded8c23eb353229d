#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/record.hpp"

namespace mcsa {

enum class WindowKind { Rectangular, Hann, Hamming };

struct StftConfig {
  std::size_t window_len = 1024;  // power of two, >= 8
  std::size_t hop = 512;          // in [1, window_len]
  WindowKind window = WindowKind::Hann;

  void validate() const;
};

// One-sided short-time spectrum: window_len/2 + 1 bins spaced
// sample_rate / window_len apart, raw DFT magnitudes (bin 0 and Nyquist
// counted once, no symmetric doubling). Frame times are window centers.
struct Spectrogram {
  double sample_rate_hz = 0.0;
  std::size_t window_len = 0;
  std::size_t hop = 0;
  double window_sum = 0.0;  // coherent gain, for amplitude scaling
  std::vector<double> frame_times_s;
  std::vector<double> bin_freqs_hz;
  std::vector<double> magnitudes;  // row-major frames x bins
  std::vector<double> phases;      // row-major frames x bins

  std::size_t frames() const { return frame_times_s.size(); }
  std::size_t bins() const { return bin_freqs_hz.size(); }
  double magnitude(std::size_t frame, std::size_t bin) const {
    return magnitudes[frame * bins() + bin];
  }
  double phase(std::size_t frame, std::size_t bin) const {
    return phases[frame * bins() + bin];
  }
};

// Symmetric analysis window of the given kind.
std::vector<double> make_window(WindowKind kind, std::size_t len);

// Frame count is floor((len - window_len) / hop) + 1; each frame's spectrum
// is the exact DFT of the windowed segment (no zero padding by default).
Spectrogram stft(const std::vector<double>& samples, double sample_rate_hz,
                 const StftConfig& cfg);
Spectrogram stft(const MultiChannelRecord& x, std::size_t channel,
                 const StftConfig& cfg);

// Per-frame sum of squared magnitudes over bins with f_lo <= f <= f_hi.
std::vector<double> band_energy(const Spectrogram& s, double f_lo_hz, double f_hi_hz);

// Up to k local maxima of one frame's magnitude spectrum, sorted by magnitude
// descending with ties broken toward lower frequency. Returns fewer than k
// entries when the frame has fewer local maxima.
std::vector<std::pair<double, double>> spectral_peaks(const Spectrogram& s,
                                                      std::size_t frame,
                                                      std::size_t k);

const char* window_kind_name(WindowKind kind);
WindowKind window_kind_from_name(const std::string& name);

}  // namespace mcsa
