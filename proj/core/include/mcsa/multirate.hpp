#pragma once

#include <cstddef>
#include <vector>

#include "mcsa/record.hpp"

namespace mcsa {

// Linear-phase FIR lowpass: odd length, symmetric taps, unit DC gain.
struct LowpassFilter {
  std::vector<double> taps;
  double cutoff_normalized = 0.0;  // passband edge, cycles/sample, in (0, 0.5)
  double design_attenuation_db = 0.0;

  std::size_t group_delay() const { return (taps.size() - 1) / 2; }
};

// Rational rate conversion by up_factor/down_factor with a shared
// anti-alias/anti-image filter designed at the upsampled rate.
struct RateConversion {
  unsigned up_factor = 1;
  unsigned down_factor = 1;
  LowpassFilter filter;
};

// Kaiser-windowed sinc design. cutoff_normalized is the passband edge; the
// transition band extends min(0.1, half the margin to Nyquist) above it.
LowpassFilter design_lowpass(double cutoff_normalized, double attenuation_db);

// Anti-aliased downsampling by m. Output sample i is the filtered input at
// time i*m, so outputs stay time-aligned with inputs (group delay
// compensated, reflect padding at the edges). m == 1 is an identity path.
MultiChannelRecord decimate(const MultiChannelRecord& x, unsigned m);

// Zero-stuffing upsampling by l with anti-image filtering and gain
// compensation; same alignment conventions as decimate. l == 1 is identity.
MultiChannelRecord interpolate(const MultiChannelRecord& x, unsigned l);

// Factors must be coprime; the filter cutoff respects 0.5/max(l, m) at the
// upsampled rate.
RateConversion make_rate_conversion(unsigned up_factor, unsigned down_factor,
                                    double attenuation_db = 60.0);

// Rational resampling to rate * up/down.
MultiChannelRecord resample(const MultiChannelRecord& x, const RateConversion& rc);

// Centered moving average with reflect padding; output length equals input.
// window_len must be odd and no longer than the record.
MultiChannelRecord smooth(const MultiChannelRecord& x, std::size_t window_len);

}  // namespace mcsa
