#include "mcsa/record_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace mcsa {

namespace {

using nlohmann::json;

static_assert(sizeof(float) == 4, "float32 payloads assume 4-byte float");

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedHeaderError("record: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string sidecar_path(const std::string& payload_path) {
  return payload_path + ".json";
}

const char* record_encoding_name(RecordEncoding e) {
  return e == RecordEncoding::Csv ? "csv" : "f32le";
}

RecordEncoding record_encoding_from_name(const std::string& name) {
  if (name == "csv") return RecordEncoding::Csv;
  if (name == "f32le") return RecordEncoding::BinaryF32;
  throw MalformedHeaderError("record: unknown encoding '" + name + "'");
}

void write_record(const MultiChannelRecord& r, const std::string& path,
                  RecordEncoding encoding) {
  r.validate();
  const std::size_t channels = r.channel_count();
  const std::size_t count = r.length();

  json header;
  header["format_version"] = kRecordFormatVersion;
  header["sample_rate_hz"] = r.sample_rate_hz;
  header["channels"] = json::array();
  for (const auto& ch : r.channels) header["channels"].push_back(ch.label);
  header["sample_count"] = count;
  header["encoding"] = record_encoding_name(encoding);
  {
    std::ofstream side(sidecar_path(path));
    if (!side) throw RecordIoError("record: cannot write " + sidecar_path(path));
    side << header.dump(2) << "\n";
  }

  if (encoding == RecordEncoding::BinaryF32) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RecordIoError("record: cannot write " + path);
    std::vector<float> frame(channels);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        frame[c] = static_cast<float>(r.channels[c].samples[i]);
      }
      out.write(reinterpret_cast<const char*>(frame.data()),
                static_cast<std::streamsize>(channels * sizeof(float)));
    }
  } else {
    std::ofstream out(path);
    if (!out) throw RecordIoError("record: cannot write " + path);
    for (std::size_t c = 0; c < channels; ++c) {
      out << r.channels[c].label << (c + 1 < channels ? "," : "\n");
    }
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        out << format_double(r.channels[c].samples[i]) << (c + 1 < channels ? "," : "\n");
      }
    }
  }
}

MultiChannelRecord read_record(const std::string& path) {
  json header;
  try {
    header = json::parse(read_text_file(sidecar_path(path)));
  } catch (const json::parse_error& e) {
    throw MalformedHeaderError("record: malformed header " + sidecar_path(path) +
                               ": " + e.what());
  }

  if (!header.contains("format_version") ||
      !header["format_version"].is_number_integer()) {
    throw MalformedHeaderError("record: header missing format_version");
  }
  const int version = header["format_version"].get<int>();
  if (version != kRecordFormatVersion) {
    throw UnsupportedVersionError("record: unsupported format_version " +
                                  std::to_string(version));
  }
  double sample_rate = 0.0;
  std::vector<std::string> labels;
  std::size_t count = 0;
  std::string encoding_name;
  try {
    sample_rate = header.at("sample_rate_hz").get<double>();
    labels = header.at("channels").get<std::vector<std::string>>();
    count = header.at("sample_count").get<std::size_t>();
    encoding_name = header.at("encoding").get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedHeaderError(std::string("record: bad header field: ") + e.what());
  }
  if (sample_rate <= 0.0 || labels.empty() || count == 0) {
    throw MalformedHeaderError("record: header fields out of range");
  }
  const RecordEncoding encoding = record_encoding_from_name(encoding_name);

  MultiChannelRecord r;
  r.sample_rate_hz = sample_rate;
  r.channels.resize(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) {
    r.channels[c].label = labels[c];
    r.channels[c].samples.resize(count);
  }

  if (encoding == RecordEncoding::BinaryF32) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RecordIoError("record: cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto actual = static_cast<std::size_t>(in.tellg());
    const std::size_t expected = labels.size() * count * sizeof(float);
    if (actual != expected) {
      throw TruncatedPayloadError("record: payload size mismatch, expected " +
                                  std::to_string(expected) + " bytes, got " +
                                  std::to_string(actual));
    }
    in.seekg(0);
    std::vector<float> frame(labels.size());
    for (std::size_t i = 0; i < count; ++i) {
      in.read(reinterpret_cast<char*>(frame.data()),
              static_cast<std::streamsize>(frame.size() * sizeof(float)));
      for (std::size_t c = 0; c < labels.size(); ++c) {
        r.channels[c].samples[i] = static_cast<double>(frame[c]);
      }
    }
    return r;
  }

  std::ifstream in(path);
  if (!in) throw RecordIoError("record: cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw TruncatedPayloadError("record: empty CSV payload");
  }
  ++line_no;  // header row of labels, already known from the sidecar
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (row >= count) {
      throw TruncatedPayloadError("record: more CSV rows than the declared " +
                                  std::to_string(count) + " samples");
    }
    std::size_t col = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (col >= labels.size()) {
        throw CsvParseError("record: line " + std::to_string(line_no) + " has more than " +
                            std::to_string(labels.size()) + " columns");
      }
      try {
        std::size_t used = 0;
        r.channels[col].samples[row] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw CsvParseError("record: line " + std::to_string(line_no) +
                            ": cannot parse value '" + cell + "'");
      }
      ++col;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (col != labels.size()) {
      throw CsvParseError("record: line " + std::to_string(line_no) + " has " +
                          std::to_string(col) + " columns, expected " +
                          std::to_string(labels.size()));
    }
    ++row;
  }
  if (row != count) {
    throw TruncatedPayloadError("record: CSV has " + std::to_string(row) +
                                " sample rows, header declares " +
                                std::to_string(count));
  }
  return r;
}

}  // namespace mcsa
