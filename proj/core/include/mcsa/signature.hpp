#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/record.hpp"
#include "mcsa/signal_model.hpp"
#include "mcsa/stft.hpp"

namespace mcsa {

// Feature schema: per-band energies, then fundamental amplitude, harmonic
// amplitudes for orders 2..7, sideband ratio at +/- sideband_offset_hz around
// the fundamental, excess kurtosis, crest factor.
struct FeatureConfig {
  std::vector<std::pair<double, double>> bands;
  double sideband_offset_hz = 10.0;

  std::size_t feature_count() const { return bands.size() + 10; }
  std::vector<std::string> names() const;

  // Bands sized for a 50 Hz drive observed below 1 kHz.
  static FeatureConfig defaults();
};

struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

// Deterministic feature vector for one channel: time-domain statistics from
// the samples, spectral statistics averaged over the spectrogram frames.
// Amplitudes are window-compensated with parabolic peak interpolation.
// Degenerate (zero-variance) signals take kurtosis and crest factor 0.
FeatureVector extract_features(const std::vector<double>& source,
                               const Spectrogram& spec, const OperatingPoint& op,
                               const FeatureConfig& cfg);

// Convex combination of per-channel feature vectors; weights must be
// non-negative and sum to 1 within 1e-9.
FeatureVector fuse(const std::vector<FeatureVector>& features_per_channel,
                   const std::vector<double>& weights);

struct FaultSignature {
  std::string label;
  FeatureVector template_features;
  double tolerance_radius = 1.0;  // in normalized-distance units
};

struct SignatureLibrary {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> schema;
  std::vector<double> normalization;  // per-feature scale, strictly positive
  std::vector<FaultSignature> entries;

  void validate() const;
};

struct LabelScore {
  std::string label;
  double score = 0.0;  // exp(-d^2), d = normalized Euclidean distance
};

// The distance behind classification and radius calibration: the
// root-mean-square of per-feature deviations scaled by the normalization
// vector. Tolerance radii are expressed in these units.
double normalized_distance(const FeatureVector& a, const FeatureVector& b,
                           const std::vector<double>& scale);

// Labels whose normalized distance from v falls within their tolerance
// radius, best score first (ties broken lexicographically), at most
// max_labels entries. An empty result reads as healthy/unknown.
std::vector<LabelScore> classify(const FeatureVector& v, const SignatureLibrary& lib,
                                 std::size_t max_labels = 2);

inline constexpr std::size_t kCusumWarmup = 50;

// Two-sided CUSUM detector. The reference mean comes from the first
// warmup_len samples; after every report the sums reset and the reference is
// re-estimated from the next warmup_len samples, so a sustained shift fires
// once.
class ChangeDetector {
 public:
  ChangeDetector(double drift_k, double threshold_h,
                 std::size_t warmup_len = kCusumWarmup);

  // Feeds one sample; returns its index when a change fires at it.
  std::optional<std::size_t> push(double value);

  double reference_mean() const { return reference_mean_; }
  double cumulative_sum_pos() const { return sum_pos_; }
  double cumulative_sum_neg() const { return sum_neg_; }

 private:
  double drift_k_;
  double threshold_h_;
  std::size_t warmup_len_;
  std::size_t index_ = 0;
  std::size_t warmup_seen_ = 0;
  double warmup_acc_ = 0.0;
  double reference_mean_ = 0.0;
  bool warmed_up_ = false;
  double sum_pos_ = 0.0;
  double sum_neg_ = 0.0;
};

// Batch CUSUM over a series: indices of the first threshold crossings.
std::vector<std::size_t> detect_change(const std::vector<double>& series, double k,
                                       double h);

// Builds a library from per-window feature vectors: templates are class
// means, normalization is the pooled within-group per-feature standard
// deviation over the calibration corpus (the healthy runs form one group,
// floored at a tenth of the corpus-wide std and at 1e-9), and each radius is
// radius_scale times the largest in-class normalized distance (floored at
// radius_floor). Healthy runs shape the normalization but add no entry.
SignatureLibrary build_library(
    const std::vector<std::pair<std::string, std::vector<FeatureVector>>>& class_runs,
    const std::vector<FeatureVector>& healthy_runs,
    const std::vector<std::string>& schema, double radius_scale = 1.25,
    double radius_floor = 0.5);

std::string library_to_json(const SignatureLibrary& lib);
SignatureLibrary library_from_json(const std::string& text);
void save_library(const SignatureLibrary& lib, const std::string& path);
SignatureLibrary load_library(const std::string& path);

}  // namespace mcsa
