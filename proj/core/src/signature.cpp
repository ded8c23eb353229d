#include "mcsa/signature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mcsa {

namespace {

using nlohmann::json;

// Window-compensated amplitude of the strongest component near f_target:
// locate the peak bin within +/-2 bins, refine magnitude by parabolic
// interpolation, scale by 2 / window_sum. Frequencies outside the bin range
// read as 0.
double amplitude_near(const Spectrogram& spec, std::size_t frame, double f_target) {
  const std::size_t bins = spec.bins();
  if (bins == 0 || spec.window_sum <= 0.0) return 0.0;
  const double bin_width = spec.bin_freqs_hz[1] - spec.bin_freqs_hz[0];
  const double pos = f_target / bin_width;
  if (pos < 0.0 || pos > static_cast<double>(bins - 1)) return 0.0;

  const auto center = static_cast<std::ptrdiff_t>(std::llround(pos));
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::ptrdiff_t b = center - 2; b <= center + 2; ++b) {
    if (b < 0 || b >= static_cast<std::ptrdiff_t>(bins)) continue;
    const double m = spec.magnitude(frame, static_cast<std::size_t>(b));
    if (m > best_mag) {
      best_mag = m;
      best = static_cast<std::size_t>(b);
    }
  }

  double mag = best_mag;
  if (best > 0 && best + 1 < bins) {
    const double a = spec.magnitude(frame, best - 1);
    const double b = best_mag;
    const double c = spec.magnitude(frame, best + 1);
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-30) {
      const double delta = 0.5 * (a - c) / denom;
      if (std::abs(delta) <= 1.0) mag = b - 0.25 * (a - c) * delta;
    }
  }
  return 2.0 * mag / spec.window_sum;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

// Root-mean-square of the per-feature scaled deviations. Averaging over the
// schema keeps the distance (and exp(-d^2) scores) on one scale regardless
// of how many features a configuration carries.
double normalized_distance(const FeatureVector& a, const FeatureVector& b,
                           const std::vector<double>& scale) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = (a.values[i] - b.values[i]) / scale[i];
    d2 += d * d;
  }
  return std::sqrt(d2 / static_cast<double>(a.values.size()));
}

std::vector<std::string> FeatureConfig::names() const {
  std::vector<std::string> out;
  out.reserve(feature_count());
  for (const auto& [lo, hi] : bands) {
    std::ostringstream name;
    name << "band_" << lo << "_" << hi;
    out.push_back(name.str());
  }
  out.push_back("fundamental_amplitude");
  for (int order = 2; order <= 7; ++order) {
    out.push_back("harmonic_" + std::to_string(order));
  }
  out.push_back("sideband_ratio");
  out.push_back("excess_kurtosis");
  out.push_back("crest_factor");
  return out;
}

FeatureConfig FeatureConfig::defaults() {
  // Sized for a 50 Hz drive: the 30-45 and 55-70 bands bracket the
  // fundamental so modulation sidebands land in bands of their own.
  FeatureConfig cfg;
  cfg.bands = {{5.0, 30.0},   {30.0, 45.0},  {45.0, 55.0},  {55.0, 70.0},
               {70.0, 130.0}, {130.0, 300.0}, {300.0, 900.0}};
  cfg.sideband_offset_hz = 10.0;
  return cfg;
}

FeatureVector extract_features(const std::vector<double>& source,
                               const Spectrogram& spec, const OperatingPoint& op,
                               const FeatureConfig& cfg) {
  op.validate();
  if (source.empty()) throw std::invalid_argument("features: empty source channel");
  if (spec.frames() == 0) throw std::invalid_argument("features: empty spectrogram");
  const double nyquist = spec.sample_rate_hz / 2.0;
  for (const auto& [lo, hi] : cfg.bands) {
    if (!(lo >= 0.0 && lo < hi && hi <= nyquist)) {
      throw std::invalid_argument("features: band outside the Nyquist range");
    }
  }

  FeatureVector out;
  out.values.reserve(cfg.feature_count());

  for (const auto& [lo, hi] : cfg.bands) {
    out.values.push_back(mean_of(band_energy(spec, lo, hi)));
  }

  const double f0 = op.line_frequency_hz;
  auto mean_amplitude = [&](double f) {
    double acc = 0.0;
    for (std::size_t fr = 0; fr < spec.frames(); ++fr) acc += amplitude_near(spec, fr, f);
    return acc / static_cast<double>(spec.frames());
  };

  // Time-domain statistics; zero-variance signals take 0 by convention.
  const double n = static_cast<double>(source.size());
  const double mean = mean_of(source);
  double m2 = 0.0, m4 = 0.0, peak = 0.0, power = 0.0;
  for (double s : source) {
    const double d = s - mean;
    m2 += d * d;
    m4 += d * d * d * d;
    peak = std::max(peak, std::abs(s));
    power += s * s;
  }
  m2 /= n;
  m4 /= n;
  const double rms = std::sqrt(power / n);

  const double fundamental = mean_amplitude(f0);
  out.values.push_back(fundamental);
  for (int order = 2; order <= 7; ++order) {
    out.values.push_back(mean_amplitude(order * f0));
  }
  const double side_lo = mean_amplitude(f0 - cfg.sideband_offset_hz);
  const double side_hi = mean_amplitude(f0 + cfg.sideband_offset_hz);
  // The denominator is floored at a fifth of the channel rms: a channel whose
  // carrier landed elsewhere reads a bounded ratio instead of a wild one.
  const double denominator = 2.0 * std::max(fundamental, 0.2 * rms) + 1e-12;
  out.values.push_back((side_lo + side_hi) / denominator);
  out.values.push_back(m2 > 1e-300 ? m4 / (m2 * m2) - 3.0 : 0.0);
  out.values.push_back(rms > 1e-300 ? peak / rms : 0.0);
  return out;
}

FeatureVector fuse(const std::vector<FeatureVector>& features_per_channel,
                   const std::vector<double>& weights) {
  if (features_per_channel.empty()) {
    throw std::invalid_argument("fuse: need at least one feature vector");
  }
  if (weights.size() != features_per_channel.size()) {
    throw std::invalid_argument("fuse: weight count does not match channel count");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("fuse: weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("fuse: weights must sum to 1");
  }
  const std::size_t len = features_per_channel.front().size();
  for (const auto& f : features_per_channel) {
    if (f.size() != len) throw std::invalid_argument("fuse: schema length mismatch");
  }

  FeatureVector out;
  out.values.assign(len, 0.0);
  for (std::size_t c = 0; c < features_per_channel.size(); ++c) {
    for (std::size_t i = 0; i < len; ++i) {
      out.values[i] += weights[c] * features_per_channel[c].values[i];
    }
  }
  return out;
}

void SignatureLibrary::validate() const {
  if (normalization.size() != schema.size()) {
    throw std::invalid_argument("library: normalization length differs from schema");
  }
  for (double s : normalization) {
    if (!(s > 0.0)) throw std::invalid_argument("library: normalization must be positive");
  }
  std::set<std::string> labels;
  for (const auto& e : entries) {
    if (e.template_features.size() != schema.size()) {
      throw std::invalid_argument("library: template length differs from schema");
    }
    if (e.tolerance_radius <= 0.0) {
      throw std::invalid_argument("library: tolerance_radius must be positive");
    }
    if (!labels.insert(e.label).second) {
      throw std::invalid_argument("library: duplicate label '" + e.label + "'");
    }
  }
}

std::vector<LabelScore> classify(const FeatureVector& v, const SignatureLibrary& lib,
                                 std::size_t max_labels) {
  lib.validate();
  if (v.size() != lib.normalization.size()) {
    throw std::invalid_argument("classify: feature schema does not match the library");
  }

  std::vector<std::pair<double, const FaultSignature*>> hits;  // (distance, entry)
  for (const auto& entry : lib.entries) {
    const double dist = normalized_distance(v, entry.template_features,
                                            lib.normalization);
    if (dist <= entry.tolerance_radius) hits.emplace_back(dist, &entry);
  }

  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->label < b.second->label;
  });
  if (hits.size() > max_labels) hits.resize(max_labels);

  std::vector<LabelScore> out;
  out.reserve(hits.size());
  for (const auto& [dist, entry] : hits) {
    out.push_back({entry->label, std::exp(-dist * dist)});
  }
  return out;
}

ChangeDetector::ChangeDetector(double drift_k, double threshold_h,
                               std::size_t warmup_len)
    : drift_k_(drift_k), threshold_h_(threshold_h), warmup_len_(warmup_len) {
  if (threshold_h <= 0.0) throw std::invalid_argument("cusum: threshold must be > 0");
  if (drift_k < 0.0) throw std::invalid_argument("cusum: drift must be >= 0");
  if (warmup_len == 0) throw std::invalid_argument("cusum: warmup must be >= 1");
}

std::optional<std::size_t> ChangeDetector::push(double value) {
  const std::size_t index = index_++;
  if (!warmed_up_) {
    warmup_acc_ += value;
    if (++warmup_seen_ == warmup_len_) {
      reference_mean_ = warmup_acc_ / static_cast<double>(warmup_len_);
      warmed_up_ = true;
    }
    return std::nullopt;
  }

  sum_pos_ = std::max(0.0, sum_pos_ + (value - reference_mean_ - drift_k_));
  sum_neg_ = std::max(0.0, sum_neg_ + (reference_mean_ - value - drift_k_));
  if (sum_pos_ > threshold_h_ || sum_neg_ > threshold_h_) {
    // Report and rebaseline: sums reset and the reference is re-estimated
    // from the samples that follow.
    sum_pos_ = 0.0;
    sum_neg_ = 0.0;
    warmed_up_ = false;
    warmup_seen_ = 0;
    warmup_acc_ = 0.0;
    return index;
  }
  return std::nullopt;
}

std::vector<std::size_t> detect_change(const std::vector<double>& series, double k,
                                       double h) {
  if (series.empty()) throw std::invalid_argument("cusum: empty series");
  ChangeDetector detector(k, h);
  std::vector<std::size_t> changes;
  for (double v : series) {
    if (auto idx = detector.push(v)) changes.push_back(*idx);
  }
  return changes;
}

SignatureLibrary build_library(
    const std::vector<std::pair<std::string, std::vector<FeatureVector>>>& class_runs,
    const std::vector<FeatureVector>& healthy_runs,
    const std::vector<std::string>& schema, double radius_scale,
    double radius_floor) {
  if (schema.empty()) throw std::invalid_argument("library: empty schema");
  const std::size_t len = schema.size();

  std::vector<const FeatureVector*> corpus;
  for (const auto& [label, runs] : class_runs) {
    if (runs.empty()) {
      throw std::invalid_argument("library: class '" + label + "' has no runs");
    }
    for (const auto& r : runs) corpus.push_back(&r);
  }
  for (const auto& r : healthy_runs) corpus.push_back(&r);
  for (const auto* r : corpus) {
    if (r->size() != len) throw std::invalid_argument("library: run length differs from schema");
  }
  if (corpus.empty()) throw std::invalid_argument("library: empty calibration corpus");

  // Pooled within-group standard deviation per feature (each class and the
  // healthy set is a group): features that wobble inside every group get
  // downweighted, stable discriminative ones dominate distances. Floored at a
  // tenth of the corpus-wide std so a near-constant feature cannot explode a
  // distance, and at 1e-9 so constant features stay harmless.
  std::vector<double> corpus_mean(len, 0.0), corpus_std(len, 0.0);
  for (const auto* r : corpus) {
    for (std::size_t i = 0; i < len; ++i) corpus_mean[i] += r->values[i];
  }
  for (auto& m : corpus_mean) m /= static_cast<double>(corpus.size());
  for (const auto* r : corpus) {
    for (std::size_t i = 0; i < len; ++i) {
      const double d = r->values[i] - corpus_mean[i];
      corpus_std[i] += d * d;
    }
  }
  for (auto& v : corpus_std) v = std::sqrt(v / static_cast<double>(corpus.size()));

  std::vector<double> norm(len, 0.0);
  {
    std::vector<std::vector<const FeatureVector*>> groups;
    for (const auto& [label, runs] : class_runs) {
      groups.emplace_back();
      for (const auto& r : runs) groups.back().push_back(&r);
    }
    if (!healthy_runs.empty()) {
      groups.emplace_back();
      for (const auto& r : healthy_runs) groups.back().push_back(&r);
    }
    for (const auto& group : groups) {
      std::vector<double> group_mean(len, 0.0);
      for (const auto* r : group) {
        for (std::size_t i = 0; i < len; ++i) group_mean[i] += r->values[i];
      }
      for (auto& m : group_mean) m /= static_cast<double>(group.size());
      for (const auto* r : group) {
        for (std::size_t i = 0; i < len; ++i) {
          const double d = r->values[i] - group_mean[i];
          norm[i] += d * d;
        }
      }
    }
    for (auto& v : norm) v = std::sqrt(v / static_cast<double>(corpus.size()));
  }
  for (std::size_t i = 0; i < len; ++i) {
    norm[i] = std::max({norm[i], 0.1 * corpus_std[i], 1e-9});
  }

  SignatureLibrary lib;
  lib.schema = schema;
  lib.normalization = norm;
  for (const auto& [label, runs] : class_runs) {
    FaultSignature sig;
    sig.label = label;
    sig.template_features.values.assign(len, 0.0);
    for (const auto& r : runs) {
      for (std::size_t i = 0; i < len; ++i) {
        sig.template_features.values[i] += r.values[i];
      }
    }
    for (auto& v : sig.template_features.values) v /= static_cast<double>(runs.size());

    std::vector<double> dists;
    dists.reserve(runs.size());
    for (const auto& r : runs) {
      dists.push_back(normalized_distance(r, sig.template_features, norm));
    }
    std::sort(dists.begin(), dists.end());
    // With enough runs, the single farthest one is treated as an outlier (a
    // window the separation step happened to land badly on) and does not set
    // the radius.
    const double spread =
        dists.size() >= 8 ? dists[dists.size() - 2] : dists.back();
    sig.tolerance_radius = std::max(radius_scale * spread, radius_floor);
    lib.entries.push_back(std::move(sig));
  }
  lib.validate();
  return lib;
}

std::string library_to_json(const SignatureLibrary& lib) {
  lib.validate();
  json j;
  j["format_version"] = SignatureLibrary::kFormatVersion;
  j["schema"] = lib.schema;
  j["normalization"] = lib.normalization;
  j["entries"] = json::array();
  for (const auto& e : lib.entries) {
    j["entries"].push_back({{"label", e.label},
                            {"template", e.template_features.values},
                            {"tolerance_radius", e.tolerance_radius}});
  }
  return j.dump(2);
}

SignatureLibrary library_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("library: invalid JSON: ") + e.what());
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw std::invalid_argument("library: missing format_version");
  }
  if (j["format_version"].get<int>() != SignatureLibrary::kFormatVersion) {
    throw std::invalid_argument("library: unsupported format_version " +
                                j["format_version"].dump());
  }
  SignatureLibrary lib;
  lib.schema = j.at("schema").get<std::vector<std::string>>();
  lib.normalization = j.at("normalization").get<std::vector<double>>();
  for (const auto& e : j.at("entries")) {
    FaultSignature sig;
    sig.label = e.at("label").get<std::string>();
    sig.template_features.values = e.at("template").get<std::vector<double>>();
    sig.tolerance_radius = e.at("tolerance_radius").get<double>();
    lib.entries.push_back(std::move(sig));
  }
  lib.validate();
  return lib;
}

void save_library(const SignatureLibrary& lib, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("library: cannot write " + path);
  out << library_to_json(lib) << "\n";
}

SignatureLibrary load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("library: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return library_from_json(buf.str());
}

}  // namespace mcsa
