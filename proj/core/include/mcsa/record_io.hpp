#pragma once

#include <stdexcept>
#include <string>

#include "mcsa/record.hpp"

namespace mcsa {

// On-disk record container: a JSON sidecar at <payload path>.json carrying
// {format_version, sample_rate_hz, channels, sample_count, encoding}, next to
// a payload that is either CSV (one column per channel, header row of labels,
// 9 significant digits) or framed binary (little-endian IEEE float32,
// channel-interleaved). Binary payloads quantize doubles to float32 exactly
// once at write time; reading them back reproduces the payload bit-exactly.
enum class RecordEncoding { Csv, BinaryF32 };

inline constexpr int kRecordFormatVersion = 1;

struct RecordIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedHeaderError : RecordIoError {
  using RecordIoError::RecordIoError;
};
struct UnsupportedVersionError : RecordIoError {
  using RecordIoError::RecordIoError;
};
struct TruncatedPayloadError : RecordIoError {
  using RecordIoError::RecordIoError;
};
struct CsvParseError : RecordIoError {
  using RecordIoError::RecordIoError;
};

std::string sidecar_path(const std::string& payload_path);

void write_record(const MultiChannelRecord& r, const std::string& path,
                  RecordEncoding encoding);
MultiChannelRecord read_record(const std::string& path);

const char* record_encoding_name(RecordEncoding e);
RecordEncoding record_encoding_from_name(const std::string& name);

}  // namespace mcsa
