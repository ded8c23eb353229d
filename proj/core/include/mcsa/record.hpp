#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsa {

struct Channel {
  std::string label;
  std::vector<double> samples;
};

// Uniformly sampled, time-aligned multichannel signal. All channels share one
// sample rate and one length.
struct MultiChannelRecord {
  double sample_rate_hz = 0.0;
  std::vector<Channel> channels;

  std::size_t channel_count() const { return channels.size(); }

  std::size_t length() const {
    return channels.empty() ? 0 : channels.front().samples.size();
  }

  double duration_s() const {
    return sample_rate_hz > 0.0 ? static_cast<double>(length()) / sample_rate_hz : 0.0;
  }

  const std::vector<double>& samples(std::size_t channel) const {
    return channels.at(channel).samples;
  }

  // Throws std::invalid_argument when the shape invariants are broken:
  // positive sample rate, at least one sample, equal channel lengths.
  void validate() const {
    if (sample_rate_hz <= 0.0) {
      throw std::invalid_argument("record: sample_rate_hz must be positive");
    }
    if (channels.empty() || channels.front().samples.empty()) {
      throw std::invalid_argument("record: must contain at least one sample");
    }
    const std::size_t len = channels.front().samples.size();
    for (const auto& ch : channels) {
      if (ch.samples.size() != len) {
        throw std::invalid_argument("record: channel '" + ch.label +
                                    "' length differs from the first channel");
      }
    }
  }
};

// Ground-truth sources share the record layout. The source generator
// guarantees at most one Gaussian-distributed channel.
using SourceSet = MultiChannelRecord;

}  // namespace mcsa
