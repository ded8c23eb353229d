// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// hard failure. Everything is seeded, so reruns are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mcsa/pipeline.hpp"
#include "mcsa/rng.hpp"
#include "oracles.hpp"

using namespace mcsa;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  std::string name;
  bool passed;
  bool report_only;  // a failure here does not fail the suite
  std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& name, bool passed, const std::string& detail,
            bool report_only = false) {
  g_results.push_back({id, name, passed, report_only, detail});
  std::printf("[%s] criterion %d: %s — %s\n",
              passed ? "PASS" : (report_only ? "FAIL (report-only)" : "FAIL"), id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
}

PipelineConfig scenario_pipeline_config() {
  PipelineConfig cfg;
  cfg.sample_rate_hz = 4000.0;
  cfg.decimation = 2;
  cfg.smoothing_window = 7;
  cfg.stft.window_len = 1024;
  cfg.stft.hop = 256;
  cfg.ica.learning_rate = 0.3;
  cfg.ica.max_iterations = 500;
  cfg.ica.tolerance = 1e-4;
  cfg.ica.seed = 7;
  cfg.window_seconds = 2.0;
  cfg.seed = 42;
  // thresholds matched to the score distribution of calibrated matches
  cfg.alarm.on_threshold = 0.30;
  cfg.alarm.incipient_threshold = 0.10;
  cfg.alarm.off_threshold = 0.03;
  cfg.alarm.on_hold_frames = 1;
  cfg.alarm.off_hold_frames = 2;
  cfg.cusum_feature = 1;  // the 30-45 Hz band
  return cfg;
}

ScenarioConfig scenario_config(const PipelineConfig& cfg) {
  ScenarioConfig sc;
  sc.op = cfg.op;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  sc.duration_s = 6.0;
  sc.onset_s = 2.0;
  sc.snr_db = 10.0;
  sc.aux_channels = 1;
  return sc;
}

const SignatureLibrary& hybrid_library() {
  static const SignatureLibrary lib = [] {
    const PipelineConfig cfg = scenario_pipeline_config();
    return calibrate_library(cfg, AnalysisMode::Hybrid,
                             CalibrationPlan::defaults(cfg.op));
  }();
  return lib;
}

// ---------------------------------------------------------------- criterion 1

void criterion_separation_quality() {
  const auto start = Clock::now();
  const std::size_t trials = 40;
  std::size_t good = 0;
  std::size_t total_matches = 0, good_matches = 0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = trial < 20 ? 2 : 3;
    const double f1 = 31.0 + static_cast<double>(trial % 7) * 6.0;
    const double f2 = 9.0 + static_cast<double>(trial % 5) * 3.0;
    std::vector<SourceKind> kinds;
    kinds.push_back(SineSource{f1});
    kinds.push_back(trial % 2 == 0 ? SourceKind{SawtoothSource{f2}}
                                   : SourceKind{LaplaceSource{1.0}});
    if (n == 3) {
      kinds.push_back(trial % 3 == 0 ? SourceKind{SquareSource{5.0}}
                                     : SourceKind{UniformSource{1.0}});
    }
    const double duration = n == 2 ? 4.0 : 6.0;  // 4000 / 6000 samples
    SourceSet sources = generate_sources(kinds, 1000.0, duration, 100 + trial);
    for (auto& ch : sources.channels) {
      const double scale = 1.0 / std::sqrt(oracle::variance(ch.samples));
      for (auto& v : ch.samples) v *= scale;
    }
    const MixingMatrix a = random_mixing_matrix(n, 500 + trial, 100.0);
    const auto mixed = mix_sources(a, sources);
    const auto [white, whitener] = center_whiten(mixed);
    IcaConfig icfg;
    icfg.seed = trial;
    UnmixingMatrix fit = ica_fit(white, icfg);
    fit.whitener = whitener;

    const double amari = amari_index(mat_mul(mat_mul(fit.w, whitener.transform), a));
    const auto matches = match_sources(separate(fit, mixed), sources);
    bool all_matched = true;
    for (const auto& m : matches) {
      ++total_matches;
      if (std::abs(m.correlation) > 0.95) {
        ++good_matches;
      } else {
        all_matched = false;
      }
    }
    if (amari < 0.05 && all_matched) ++good;
  }

  const double runtime = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream detail;
  detail << good << "/" << trials << " trials below 0.05 Amari with all |corr| > 0.95, "
         << good_matches << "/" << total_matches << " matches, " << runtime
         << " s runtime";
  record(1, "BSS separation quality", good * 100 >= trials * 95 && runtime < 30.0,
         detail.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_gradient_check() {
  Rng rng(1234);
  double worst_cosine = 1.0;
  for (const std::size_t n : {2u, 3u}) {
    for (int repeat = 0; repeat < 5; ++repeat) {
      std::vector<std::vector<double>> channels(n, std::vector<double>(200));
      std::vector<ScoreKind> kinds;
      for (std::size_t c = 0; c < n; ++c) {
        const bool super = (c + static_cast<std::size_t>(repeat)) % 2 == 0;
        kinds.push_back(super ? ScoreKind::SuperGaussian : ScoreKind::SubGaussian);
        for (auto& v : channels[c]) {
          v = super ? rng.laplace(1.0) : rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
        }
      }
      MultiChannelRecord rec;
      rec.sample_rate_hz = 1000.0;
      for (std::size_t c = 0; c < n; ++c) {
        rec.channels.push_back({"c" + std::to_string(c), channels[c]});
      }
      const SourcePrior prior = SourcePrior::per_channel(kinds);

      Matrix w(n, n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          w.at(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * rng.uniform(-1.0, 1.0);
        }
      }

      // analytic natural gradient
      const std::size_t t_len = 200;
      Matrix moment(n, n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t t = 0; t < t_len; ++t) {
            double ui = 0.0, uj = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
              ui += w.at(i, k) * channels[k][t];
              uj += w.at(j, k) * channels[k][t];
            }
            acc += score_function(kinds[i], ui) * uj;
          }
          moment.at(i, j) = acc / static_cast<double>(t_len);
        }
      }
      Matrix bracket = Matrix::identity(n);
      for (std::size_t i = 0; i < n * n; ++i) bracket.data[i] -= moment.data[i];
      const Matrix natural = mat_mul(bracket, w);

      // central finite differences of the contrast, step 1e-5
      const double eps = 1e-5;
      Matrix fd(n, n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          Matrix plus = w, minus = w;
          plus.at(i, j) += eps;
          minus.at(i, j) -= eps;
          fd.at(i, j) =
              (log_likelihood(plus, rec, prior) - log_likelihood(minus, rec, prior)) /
              (2.0 * eps);
        }
      }
      Matrix wtw(n, n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t k = 0; k < n; ++k) wtw.at(i, j) += w.at(k, i) * w.at(k, j);
        }
      }
      const Matrix fd_natural = mat_mul(fd, wtw);

      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < n * n; ++i) {
        dot += natural.data[i] * fd_natural.data[i];
        na += natural.data[i] * natural.data[i];
        nb += fd_natural.data[i] * fd_natural.data[i];
      }
      worst_cosine = std::min(worst_cosine, dot / std::sqrt(na * nb));
    }
  }
  std::ostringstream detail;
  detail << "worst cosine similarity " << worst_cosine;
  record(2, "natural-gradient finite-difference check", worst_cosine > 0.99,
         detail.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_stft_oracle() {
  Rng rng(77);
  double worst_abs = 0.0;
  double worst_parseval = 0.0;
  for (const std::size_t wl : {8u, 16u, 32u, 64u}) {
    for (const WindowKind kind :
         {WindowKind::Rectangular, WindowKind::Hann, WindowKind::Hamming}) {
      std::vector<double> x(wl * 4);
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      StftConfig cfg;
      cfg.window_len = wl;
      cfg.hop = wl / 2;
      cfg.window = kind;
      const auto s = stft(x, 1000.0, cfg);
      const auto window = make_window(kind, wl);
      for (std::size_t f = 0; f < s.frames(); ++f) {
        std::vector<double> segment(wl);
        double time_energy = 0.0;
        for (std::size_t n = 0; n < wl; ++n) {
          segment[n] = window[n] * x[f * cfg.hop + n];
          time_energy += segment[n] * segment[n];
        }
        const auto reference = oracle::naive_dft(segment);
        double freq_energy = 0.0;
        for (std::size_t b = 0; b < s.bins(); ++b) {
          worst_abs = std::max(worst_abs,
                               std::abs(s.magnitude(f, b) - std::abs(reference[b])));
          const double weight = (b == 0 || b == s.bins() - 1) ? 1.0 : 2.0;
          freq_energy += weight * s.magnitude(f, b) * s.magnitude(f, b);
        }
        worst_parseval =
            std::max(worst_parseval, std::abs(freq_energy - wl * time_energy) /
                                         (wl * time_energy));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |spectrum - dft| " << worst_abs << ", worst Parseval error "
         << worst_parseval;
  record(3, "STFT oracle equivalence", worst_abs <= 1e-9 && worst_parseval <= 1e-6,
         detail.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion_multirate_suppression() {
  // decimation alias rejection
  MultiChannelRecord tone;
  tone.sample_rate_hz = 1024.0;
  tone.channels.push_back({"t", {}});
  tone.channels[0].samples.resize(4096);
  for (std::size_t i = 0; i < 4096; ++i) {
    tone.channels[0].samples[i] =
        std::sin(2.0 * std::numbers::pi * 422.0 * static_cast<double>(i) / 1024.0);
  }
  const auto dec = decimate(tone, 2);
  std::vector<double> steady(dec.samples(0).begin() + 256, dec.samples(0).end() - 256);
  const double alias_db =
      20.0 * std::log10(std::max(oracle::tone_amplitude(steady, 512.0, 90.0), 1e-12));

  // interpolation image rejection
  MultiChannelRecord low;
  low.sample_rate_hz = 200.0;
  low.channels.push_back({"t", {}});
  low.channels[0].samples.resize(800);
  for (std::size_t i = 0; i < 800; ++i) {
    low.channels[0].samples[i] =
        std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(i) / 200.0);
  }
  const auto up = interpolate(low, 5);
  std::vector<double> steady_up(up.samples(0).begin() + 500, up.samples(0).end() - 500);
  const double base = oracle::tone_amplitude(steady_up, 1000.0, 50.0);
  const double image_db =
      20.0 *
      std::log10(std::max(oracle::tone_amplitude(steady_up, 1000.0, 150.0), 1e-12) /
                 base);

  // band-limited round trip
  MultiChannelRecord band;
  band.sample_rate_hz = 1000.0;
  band.channels.push_back({"b", {}});
  band.channels[0].samples.resize(2000);
  for (std::size_t i = 0; i < 2000; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    band.channels[0].samples[i] = std::sin(2.0 * std::numbers::pi * 50.0 * t) +
                                  0.4 * std::sin(2.0 * std::numbers::pi * 110.0 * t);
  }
  const auto round = decimate(interpolate(band, 3), 3);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 200; i + 200 < band.length(); ++i) {
    const double d = band.samples(0)[i] - round.samples(0)[i];
    err += d * d;
    ref += band.samples(0)[i] * band.samples(0)[i];
  }
  const double rms_ratio = std::sqrt(err / ref);

  std::ostringstream detail;
  detail << "alias " << alias_db << " dB, image " << image_db << " dB, round-trip rms "
         << rms_ratio * 100.0 << "%";
  record(4, "multirate alias/image suppression",
         alias_db <= -59.0 && image_db <= -59.0 && rms_ratio < 0.01, detail.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion_detection_suite() {
  const PipelineConfig cfg = scenario_pipeline_config();
  const ScenarioConfig sc = scenario_config(cfg);
  const SignatureLibrary& lib = hybrid_library();

  bool pass = true;
  std::ostringstream detail;
  for (const NoiseRegime regime : {NoiseRegime::Gaussian, NoiseRegime::UniformWhite,
                                   NoiseRegime::RandomImpulsive}) {
    const auto scenarios = detection_suite(regime, 20, sc);
    std::size_t post = 0, detected = 0, healthy = 0, false_alarms = 0;
    for (const auto& scenario : scenarios) {
      const auto report = run_analyze(cfg, scenario.record, lib);
      const auto onset_window = static_cast<std::size_t>(
          std::llround(scenario.onset_s / cfg.window_seconds));
      for (const auto& w : report.windows) {
        if (scenario.expected_labels.empty()) {
          ++healthy;
          if (!w.classification.empty()) ++false_alarms;
        } else if (w.index >= onset_window) {
          ++post;
          for (const auto& c : w.classification) {
            if (c.label == scenario.expected_labels.front()) {
              ++detected;
              break;
            }
          }
        }
      }
    }
    const double rate = static_cast<double>(detected) / static_cast<double>(post);
    detail << noise_regime_name(regime) << ": " << detected << "/" << post
           << " post-onset, " << false_alarms << "/" << healthy << " false alarms; ";
    if (rate < 0.95 || false_alarms != 0) pass = false;
  }
  record(5, "detection across noise regimes", pass, detail.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion_dual_faults() {
  const PipelineConfig cfg = scenario_pipeline_config();
  const ScenarioConfig sc = scenario_config(cfg);
  const SignatureLibrary& lib = hybrid_library();

  const auto scenarios = dual_fault_suite(20, sc);
  std::size_t post = 0, both = 0;
  for (const auto& scenario : scenarios) {
    const auto report = run_analyze(cfg, scenario.record, lib);
    const auto onset_window =
        static_cast<std::size_t>(std::llround(scenario.onset_s / cfg.window_seconds));
    for (const auto& w : report.windows) {
      if (w.index < onset_window) continue;
      ++post;
      std::size_t found = 0;
      for (const auto& expected : scenario.expected_labels) {
        for (const auto& c : w.classification) {
          if (c.label == expected) {
            ++found;
            break;
          }
        }
      }
      if (found == scenario.expected_labels.size()) ++both;
    }
  }
  std::ostringstream detail;
  detail << both << "/" << post << " post-onset windows report both labels";
  record(6, "two simultaneous faults", both * 100 >= post * 90, detail.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion_latency() {
  PipelineConfig cfg;  // 50 kHz defaults, decimation 16
  cfg.ica.seed = 1;
  const StageTiming timing = pipeline_bench(cfg, 4, 2.0);
  std::ostringstream detail;
  detail << "one 2 s unit of 4-channel 50 kHz data analyzed in " << timing.total_s
         << " s";
  if (timing.total_s <= 2.0) {
    record(7, "analysis latency per unit", true, detail.str());
  } else if (timing.total_s <= 4.0) {
    record(7, "analysis latency per unit", false,
           detail.str() + " (above the 2 s target, below the 4 s hard limit)", true);
  } else {
    record(7, "analysis latency per unit", false, detail.str());
  }
}

// ---------------------------------------------------------------- criterion 8

void criterion_alarm_semantics() {
  AlarmConfig cfg;  // defaults: on 0.8, incipient 0.5, off 0.3, holds 3/5
  std::vector<std::pair<double, std::vector<LabelScore>>> frames;
  double t = 1.0;
  for (int i = 0; i < 8; ++i) frames.emplace_back(t++, std::vector<LabelScore>{});
  for (int i = 0; i < 10; ++i) {
    frames.emplace_back(t++, std::vector<LabelScore>{{"fault", 0.95}});
  }
  for (int i = 0; i < 12; ++i) frames.emplace_back(t++, std::vector<LabelScore>{});
  const auto events = run_monitor(frames, cfg);

  std::size_t raised = 0, returned = 0;
  bool order_ok = true;
  for (const auto& e : events) {
    if (e.transition == AlarmTransition::Raised) {
      ++raised;
      if (returned != 0) order_ok = false;
    }
    if (e.transition == AlarmTransition::ReturnedToNormal) ++returned;
  }

  std::vector<std::pair<double, std::vector<LabelScore>>> chattering;
  t = 1.0;
  for (int i = 0; i < 60; ++i) {
    if (i % 2 == 0) {
      chattering.emplace_back(t++, std::vector<LabelScore>{{"fault", 0.95}});
    } else {
      chattering.emplace_back(t++, std::vector<LabelScore>{});
    }
  }
  std::size_t chattering_raised = 0;
  for (const auto& e : run_monitor(chattering, cfg)) {
    if (e.transition == AlarmTransition::Raised) ++chattering_raised;
  }

  std::ostringstream detail;
  detail << raised << " raised / " << returned << " returned on the scripted run, "
         << chattering_raised << " raised under chattering";
  record(8, "alarm occur/return semantics",
         raised == 1 && returned == 1 && order_ok && chattering_raised <= 1,
         detail.str());
}

// ---------------------------------------------------------------- criterion 9

void criterion_hybrid_ordering() {
  const PipelineConfig cfg = scenario_pipeline_config();
  const ScenarioConfig sc = scenario_config(cfg);
  const auto scenarios = valve_noise_suite(10, sc);

  CalibrationPlan plan = CalibrationPlan::defaults(cfg.op);
  plan.seeds_per_case = 1;
  const auto report = run_compare(
      cfg, scenarios,
      {AnalysisMode::Hybrid, AnalysisMode::StftOnly, AnalysisMode::FusionOnly}, plan);

  ModeMetrics hybrid, stft_only, fusion_only;
  for (const auto& [name, metrics] : report.modes) {
    if (name == "hybrid") hybrid = metrics;
    if (name == "stft_only") stft_only = metrics;
    if (name == "fusion_only") fusion_only = metrics;
  }
  std::ostringstream detail;
  detail << "false positives hybrid " << hybrid.false_positive_windows << " vs stft_only "
         << stft_only.false_positive_windows << "; detection rate hybrid "
         << hybrid.detection_rate << " vs fusion_only " << fusion_only.detection_rate;
  record(9, "hybrid vs single-method ordering",
         hybrid.false_positive_windows <= stft_only.false_positive_windows &&
             hybrid.detection_rate >= fusion_only.detection_rate,
         detail.str());
}

}  // namespace

int main() {
  criterion_separation_quality();
  criterion_gradient_check();
  criterion_stft_oracle();
  criterion_multirate_suppression();
  criterion_detection_suite();
  criterion_dual_faults();
  criterion_latency();
  criterion_alarm_semantics();
  criterion_hybrid_ordering();

  std::size_t hard_failures = 0;
  for (const auto& r : g_results) {
    if (!r.passed && !r.report_only) ++hard_failures;
  }
  std::printf("%zu/%zu criteria passed (%zu hard failure%s)\n",
              g_results.size() - hard_failures, g_results.size(), hard_failures,
              hard_failures == 1 ? "" : "s");
  return hard_failures == 0 ? 0 : 1;
}
