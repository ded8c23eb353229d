#include "mcsa/multirate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mcsa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    const double d = attenuation_db - 21.0;
    return 0.5842 * std::pow(d, 0.4) + 0.07886 * d;
  }
  return 0.0;
}

// Kaiser design with explicit passband/stopband edges (cycles/sample).
LowpassFilter design_edges(double f_pass, double f_stop, double attenuation_db) {
  const double df = f_stop - f_pass;
  const double beta = kaiser_beta(attenuation_db);
  std::size_t len =
      static_cast<std::size_t>(
          std::ceil((attenuation_db - 7.95) / (2.285 * kTwoPi * df))) +
      1;
  if (len % 2 == 0) ++len;
  len = std::max<std::size_t>(len, 11);

  const double fc = 0.5 * (f_pass + f_stop);  // -6 dB point
  const auto m = static_cast<double>(len - 1) / 2.0;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  LowpassFilter filter;
  filter.cutoff_normalized = f_pass;
  filter.design_attenuation_db = attenuation_db;
  filter.taps.resize(len);
  double sum = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    const double k = static_cast<double>(n) - m;
    const double r = k / m;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    filter.taps[n] = 2.0 * fc * sinc(2.0 * fc * k) * window;
    sum += filter.taps[n];
  }
  for (auto& t : filter.taps) t /= sum;  // exact unit DC gain
  return filter;
}

// Reflect indexing without edge duplication: ... x2 x1 | x0 x1 ... xn-1 | xn-2 ...
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto len = static_cast<std::ptrdiff_t>(n);
  while (i < 0 || i >= len) {
    if (i < 0) i = -i;
    if (i >= len) i = 2 * len - 2 - i;
  }
  return static_cast<std::size_t>(i);
}

// Filtered value of x at position t, group delay compensated.
double filtered_at(const std::vector<double>& x, const std::vector<double>& taps,
                   std::ptrdiff_t t) {
  const auto delay = static_cast<std::ptrdiff_t>((taps.size() - 1) / 2);
  double acc = 0.0;
  for (std::size_t j = 0; j < taps.size(); ++j) {
    acc += taps[j] * x[reflect(t - delay + static_cast<std::ptrdiff_t>(j), x.size())];
  }
  return acc;
}

void require_longer_than_filter(const MultiChannelRecord& x,
                                const LowpassFilter& f) {
  if (x.length() <= f.taps.size()) {
    throw std::invalid_argument("multirate: record length " +
                                std::to_string(x.length()) +
                                " does not cover the filter transient (" +
                                std::to_string(f.taps.size()) + " taps)");
  }
}

}  // namespace

LowpassFilter design_lowpass(double cutoff_normalized, double attenuation_db) {
  if (!(cutoff_normalized > 0.0 && cutoff_normalized < 0.5)) {
    throw std::invalid_argument("design_lowpass: cutoff must be in (0, 0.5)");
  }
  if (attenuation_db <= 0.0) {
    throw std::invalid_argument("design_lowpass: attenuation must be > 0 dB");
  }
  const double df = std::min(0.1, 0.5 * (0.5 - cutoff_normalized));
  return design_edges(cutoff_normalized, cutoff_normalized + df, attenuation_db);
}

MultiChannelRecord decimate(const MultiChannelRecord& x, unsigned m) {
  x.validate();
  if (m == 0) throw std::invalid_argument("decimate: factor must be >= 1");
  if (m == 1) return x;

  // Passband to 0.8x the new Nyquist, stopband at the new Nyquist.
  const LowpassFilter filter = design_edges(0.4 / m, 0.5 / m, 60.0);
  require_longer_than_filter(x, filter);

  const std::size_t n = x.length();
  const std::size_t out_len = (n + m - 1) / m;
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz / m;
  out.channels.resize(x.channel_count());
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    out.channels[c].label = x.channels[c].label;
    auto& dst = out.channels[c].samples;
    dst.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
      dst[i] = filtered_at(x.channels[c].samples, filter.taps,
                           static_cast<std::ptrdiff_t>(i) * m);
    }
  }
  return out;
}

MultiChannelRecord interpolate(const MultiChannelRecord& x, unsigned l) {
  x.validate();
  if (l == 0) throw std::invalid_argument("interpolate: factor must be >= 1");
  if (l == 1) return x;

  // Images of content below 0.4/l (upsampled-rate units) fall above 0.5/l.
  const LowpassFilter filter = design_edges(0.4 / l, 0.5 / l, 60.0);

  const std::size_t n = x.length();
  const std::size_t out_len = n * l;
  const auto delay = static_cast<std::ptrdiff_t>(filter.group_delay());
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz * l;
  out.channels.resize(x.channel_count());
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    out.channels[c].label = x.channels[c].label;
    auto& dst = out.channels[c].samples;
    const auto& src = x.channels[c].samples;
    dst.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
      // Only taps landing on a stuffed (non-zero) sample contribute.
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(i) - delay;
      std::ptrdiff_t j = base % static_cast<std::ptrdiff_t>(l);
      if (j < 0) j += l;
      j = (l - j) % l;  // smallest tap index hitting a multiple of l
      double acc = 0.0;
      for (std::size_t k = static_cast<std::size_t>(j); k < filter.taps.size(); k += l) {
        const std::ptrdiff_t stuffed = base + static_cast<std::ptrdiff_t>(k);
        acc += filter.taps[k] * src[reflect(stuffed / static_cast<std::ptrdiff_t>(l), n)];
      }
      dst[i] = acc * l;  // gain compensation for zero stuffing
    }
  }
  return out;
}

RateConversion make_rate_conversion(unsigned up_factor, unsigned down_factor,
                                    double attenuation_db) {
  if (up_factor == 0 || down_factor == 0) {
    throw std::invalid_argument("rate conversion: factors must be >= 1");
  }
  if (std::gcd(up_factor, down_factor) != 1) {
    throw std::invalid_argument("rate conversion: factors must be coprime");
  }
  const unsigned worst = std::max(up_factor, down_factor);
  RateConversion rc;
  rc.up_factor = up_factor;
  rc.down_factor = down_factor;
  rc.filter = design_edges(0.4 / worst, 0.5 / worst, attenuation_db);
  return rc;
}

MultiChannelRecord resample(const MultiChannelRecord& x, const RateConversion& rc) {
  x.validate();
  if (rc.up_factor == 1 && rc.down_factor == 1) return x;
  require_longer_than_filter(x, rc.filter);

  // Single-pass polyphase evaluation at the upsampled rate: output sample i
  // reads the stuffed stream at position i * down_factor.
  const std::size_t n = x.length();
  const auto l = static_cast<std::ptrdiff_t>(rc.up_factor);
  const std::size_t out_len = (n * rc.up_factor + rc.down_factor - 1) / rc.down_factor;
  const auto delay = static_cast<std::ptrdiff_t>(rc.filter.group_delay());
  const auto& taps = rc.filter.taps;

  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz * rc.up_factor / rc.down_factor;
  out.channels.resize(x.channel_count());
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    out.channels[c].label = x.channels[c].label;
    const auto& src = x.channels[c].samples;
    auto& dst = out.channels[c].samples;
    dst.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::ptrdiff_t base =
          static_cast<std::ptrdiff_t>(i) * rc.down_factor - delay;
      std::ptrdiff_t j = base % l;
      if (j < 0) j += l;
      j = (l - j) % l;
      double acc = 0.0;
      for (std::size_t k = static_cast<std::size_t>(j); k < taps.size();
           k += rc.up_factor) {
        const std::ptrdiff_t stuffed = base + static_cast<std::ptrdiff_t>(k);
        acc += taps[k] * src[reflect(stuffed / l, n)];
      }
      dst[i] = acc * rc.up_factor;
    }
  }
  return out;
}

MultiChannelRecord smooth(const MultiChannelRecord& x, std::size_t window_len) {
  x.validate();
  if (window_len == 0 || window_len % 2 == 0) {
    throw std::invalid_argument("smooth: window length must be odd");
  }
  if (window_len > x.length()) {
    throw std::invalid_argument("smooth: window longer than record");
  }
  if (window_len == 1) return x;

  const auto half = static_cast<std::ptrdiff_t>((window_len - 1) / 2);
  const double inv = 1.0 / static_cast<double>(window_len);
  MultiChannelRecord out = x;
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    const auto& src = x.channels[c].samples;
    auto& dst = out.channels[c].samples;
    for (std::size_t i = 0; i < src.size(); ++i) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -half; k <= half; ++k) {
        acc += src[reflect(static_cast<std::ptrdiff_t>(i) + k, src.size())];
      }
      dst[i] = acc * inv;
    }
  }
  return out;
}

}  // namespace mcsa
