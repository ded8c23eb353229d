// Command line front end: generate / calibrate / analyze / monitor / compare
// / bench. Errors leave as machine-readable JSON on stderr with a nonzero
// exit code.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcsa/pipeline.hpp"
#include "mcsa/record_io.hpp"

using namespace mcsa;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string::npos ? std::string::npos
                                                               : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CliError("cannot parse " + what + " from '" + text + "'");
  }
}

// harmonic:ORDER:AMPLITUDE | sideband:CARRIER:OFFSET:DEPTH |
// valve:RATE:AMPLITUDE | healthy
FaultMode parse_fault(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw CliError("empty fault spec");
  if (parts[0] == "healthy" && parts.size() == 1) return Healthy{};
  if (parts[0] == "harmonic" && parts.size() == 3) {
    return HarmonicInjection{static_cast<int>(parse_number(parts[1], "harmonic order")),
                             parse_number(parts[2], "harmonic amplitude")};
  }
  if (parts[0] == "sideband" && parts.size() == 4) {
    return Sideband{parse_number(parts[1], "sideband carrier"),
                    parse_number(parts[2], "sideband offset"),
                    parse_number(parts[3], "sideband depth")};
  }
  if (parts[0] == "valve" && parts.size() == 3) {
    return StochasticValveNoise{parse_number(parts[1], "valve burst rate"),
                                parse_number(parts[2], "valve burst amplitude")};
  }
  throw CliError("unknown fault spec '" + text +
                 "' (expected healthy, harmonic:N:A, sideband:C:O:D or valve:R:A)");
}

// gaussian:SIGMA | uniform:HALF_RANGE | impulsive:RATE:AMPLITUDE
NoiseKind parse_noise(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw CliError("empty noise spec");
  if (parts[0] == "gaussian" && parts.size() == 2) {
    return Gaussian{parse_number(parts[1], "gaussian sigma")};
  }
  if (parts[0] == "uniform" && parts.size() == 2) {
    return UniformWhite{parse_number(parts[1], "uniform half range")};
  }
  if (parts[0] == "impulsive" && parts.size() == 3) {
    return RandomImpulsive{parse_number(parts[1], "impulse rate"),
                           parse_number(parts[2], "impulse amplitude")};
  }
  throw CliError("unknown noise spec '" + text +
                 "' (expected gaussian:S, uniform:H or impulsive:R:A)");
}

struct ConfigFlags {
  std::string config_path;
  std::optional<double> sample_rate;
  std::optional<unsigned> decimation;
  std::optional<std::size_t> smoothing;
  std::optional<double> window_seconds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> library_path;
};

// Flags override file values; the file overrides built-in defaults.
PipelineConfig resolve_config(const ConfigFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  if (flags.sample_rate) cfg.sample_rate_hz = *flags.sample_rate;
  if (flags.decimation) cfg.decimation = *flags.decimation;
  if (flags.smoothing) cfg.smoothing_window = *flags.smoothing;
  if (flags.window_seconds) cfg.window_seconds = *flags.window_seconds;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.library_path) cfg.library_path = *flags.library_path;
  cfg.validate();
  return cfg;
}

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Pipeline configuration JSON (flags override file values)");
  cmd->add_option("--sample-rate", flags.sample_rate, "Override sample_rate_hz");
  cmd->add_option("--decimation", flags.decimation, "Override decimation factor");
  cmd->add_option("--smoothing", flags.smoothing,
                  "Override smoothing window (odd, 0 disables)");
  cmd->add_option("--window-seconds", flags.window_seconds,
                  "Override analysis window length");
  cmd->add_option("--seed", flags.seed, "Override the pipeline seed");
  cmd->add_option("--library", flags.library_path, "Signature library JSON path");
}

SignatureLibrary library_for(const PipelineConfig& cfg) {
  if (cfg.library_path.empty()) {
    throw CliError("no signature library: pass --library or set library_path");
  }
  return load_library(cfg.library_path);
}

json window_to_json(const WindowResult& w) {
  json cls = json::array();
  for (const auto& c : w.classification) {
    cls.push_back({{"label", c.label}, {"score", c.score}});
  }
  return {{"window", w.index},
          {"start_s", w.start_s},
          {"classification", cls},
          {"dominant_peak_hz", w.dominant_peak_hz},
          {"ica_converged", w.ica_converged}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path);
  out << text;
}

int run_generate(const OperatingPoint& op, const std::vector<std::string>& fault_specs,
                 const std::string& noise_spec, double snr, double rate,
                 double duration, double onset, std::uint64_t seed, std::size_t aux,
                 const std::string& out, const std::string& encoding) {
  std::vector<FaultMode> faults;
  for (const auto& f : fault_specs) faults.push_back(parse_fault(f));
  if (faults.empty()) faults.push_back(Healthy{});
  NoiseKind noise = parse_noise(noise_spec);
  if (snr >= 0.0) {
    NoiseRegime regime = NoiseRegime::Gaussian;
    if (std::holds_alternative<UniformWhite>(noise)) {
      regime = NoiseRegime::UniformWhite;
    } else if (std::holds_alternative<RandomImpulsive>(noise)) {
      regime = NoiseRegime::RandomImpulsive;
    }
    noise = noise_for_regime(regime, snr, op, rate);
  }
  MultiChannelRecord rec;
  if (onset >= 0.0) {
    ScenarioConfig sc;
    sc.op = op;
    sc.sample_rate_hz = rate;
    sc.duration_s = duration;
    sc.onset_s = onset;
    sc.aux_channels = aux;
    rec = spliced_fault_record(sc, faults, noise, seed);
  } else {
    rec = generate_drive_record(op, faults, noise, rate, duration, seed, aux);
  }
  write_record(rec, out, record_encoding_from_name(encoding));
  json summary = {{"path", out},
                  {"channels", rec.channel_count()},
                  {"sample_count", rec.length()},
                  {"sample_rate_hz", rec.sample_rate_hz}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_analyze_cmd(const PipelineConfig& cfg, const std::string& input,
                    const std::string& report_path, const std::string& out_dir,
                    const std::string& mode_name) {
  const SignatureLibrary lib = library_for(cfg);
  const MultiChannelRecord rec = read_record(input);
  const AnalysisMode mode = analysis_mode_from_name(mode_name);

  std::vector<WindowArtifacts> artifacts;
  const AnalysisReport report =
      run_analyze(cfg, rec, lib, out_dir.empty() ? nullptr : &artifacts, mode);
  const std::string report_json = report_to_json(report);

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_text((dir / "report.json").string(), report_json + "\n");
    {
      std::ofstream events(dir / "events.jsonl");
      for (const auto& e : report.alarm_events) {
        events << alarm_event_json_line(e) << "\n";
      }
    }
    {
      std::ofstream features(dir / "features.csv");
      features << "window,start_s";
      for (const auto& name : cfg.features.names()) features << "," << name;
      features << "\n";
      for (const auto& w : report.windows) {
        features << w.index << "," << w.start_s;
        for (double v : w.fused.values) features << "," << v;
        features << "\n";
      }
    }
    char name[64];
    for (std::size_t w = 0; w < artifacts.size(); ++w) {
      std::snprintf(name, sizeof(name), "window_%03zu.sources.bin", w);
      write_record(artifacts[w].separated, (dir / name).string(),
                   RecordEncoding::BinaryF32);
      for (std::size_t s = 0; s < artifacts[w].source_spectrograms.size(); ++s) {
        std::snprintf(name, sizeof(name), "window_%03zu_source_%zu.spectrogram.csv", w,
                      s);
        write_spectrogram_csv(artifacts[w].source_spectrograms[s],
                              (dir / name).string());
      }
    }
  }
  if (!report_path.empty()) write_text(report_path, report_json + "\n");
  if (report_path.empty() && out_dir.empty()) std::cout << report_json << "\n";
  return 0;
}

int run_monitor_cmd(const PipelineConfig& cfg, const std::string& input,
                    const std::string& events_path) {
  const SignatureLibrary lib = library_for(cfg);
  const MultiChannelRecord rec = read_record(input);
  const AnalysisReport report = run_analyze(cfg, rec, lib);

  std::ofstream events_file;
  if (!events_path.empty()) {
    events_file.open(events_path);
    if (!events_file) throw CliError("cannot write " + events_path);
  }
  std::size_t next_event = 0;
  for (const auto& w : report.windows) {
    json line = window_to_json(w);
    json window_events = json::array();
    const double window_end = w.start_s + cfg.window_seconds;
    while (next_event < report.alarm_events.size() &&
           report.alarm_events[next_event].frame_time_s < window_end) {
      const auto& e = report.alarm_events[next_event++];
      window_events.push_back(json::parse(alarm_event_json_line(e)));
      if (events_file.is_open()) events_file << alarm_event_json_line(e) << "\n";
    }
    line["events"] = window_events;
    std::cout << line.dump() << "\n";
  }
  return 0;
}

int run_compare_cmd(const PipelineConfig& cfg, const std::string& suite,
                    std::size_t seeds, const std::vector<std::string>& mode_names,
                    const std::string& out) {
  ScenarioConfig sc;
  sc.op = cfg.op;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  sc.duration_s = 3.0 * cfg.window_seconds;
  sc.onset_s = cfg.window_seconds;

  std::vector<Scenario> scenarios;
  if (suite == "valve") {
    scenarios = valve_noise_suite(seeds, sc);
  } else if (suite == "detection") {
    for (NoiseRegime regime : {NoiseRegime::Gaussian, NoiseRegime::UniformWhite,
                               NoiseRegime::RandomImpulsive}) {
      auto part = detection_suite(regime, seeds, sc);
      scenarios.insert(scenarios.end(), part.begin(), part.end());
    }
  } else {
    throw CliError("unknown suite '" + suite + "' (valve or detection)");
  }

  std::vector<AnalysisMode> modes;
  for (const auto& m : mode_names) modes.push_back(analysis_mode_from_name(m));
  const CompareReport report =
      run_compare(cfg, scenarios, modes, CalibrationPlan::defaults(cfg.op));
  const std::string table = compare_to_json(report);
  if (!out.empty()) {
    write_text(out, table + "\n");
  } else {
    std::cout << table << "\n";
  }
  return 0;
}

int run_bench_cmd(const PipelineConfig& cfg, std::size_t channels, double duration,
                  double target, double limit) {
  const StageTiming t = pipeline_bench(cfg, channels, duration);
  json out = {{"unit_seconds", duration},
              {"channels", channels},
              {"sample_rate_hz", cfg.sample_rate_hz},
              {"decimate_s", t.decimate_s},
              {"smooth_s", t.smooth_s},
              {"bss_s", t.bss_s},
              {"stft_s", t.stft_s},
              {"features_s", t.features_s},
              {"classify_s", t.classify_s},
              {"alarm_s", t.alarm_s},
              {"total_s", t.total_s},
              {"target_s", target},
              {"limit_s", limit}};
  std::cout << out.dump(2) << "\n";
  if (t.total_s > limit) {
    std::cerr << json({{"error", "bench"},
                       {"detail", "analysis time exceeded the hard limit"}})
                     .dump()
              << "\n";
    return 1;
  }
  if (t.total_s > target) {
    std::cerr << "warning: above the " << target << " s target\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-signature identification toolkit for BLDC drive currents"};
  app.require_subcommand(1);

  auto* generate_cmd = app.add_subcommand(
      "generate", "Synthesize a drive record and write it with its sidecar header");
  std::string gen_out;
  std::string gen_encoding = "f32le";
  double gen_rate = 50000.0, gen_duration = 2.0, gen_onset = -1.0, gen_snr = -1.0;
  std::uint64_t gen_seed = 1;
  std::size_t gen_aux = 1;
  OperatingPoint gen_op;
  std::vector<std::string> gen_faults;
  std::string gen_noise = "gaussian:0.1";
  generate_cmd->add_option("--out", gen_out, "Output payload path")->required();
  generate_cmd->add_option("--encoding", gen_encoding, "Payload encoding: f32le or csv");
  generate_cmd->add_option("--sample-rate", gen_rate, "Sample rate in Hz");
  generate_cmd->add_option("--duration", gen_duration, "Record length in seconds");
  generate_cmd->add_option("--seed", gen_seed, "Generator seed");
  generate_cmd->add_option("--aux", gen_aux, "Auxiliary sensor channels to append");
  generate_cmd->add_option("--line-freq", gen_op.line_frequency_hz,
                           "Line frequency in Hz");
  generate_cmd->add_option("--voltage", gen_op.supply_voltage_v, "Supply voltage in V");
  generate_cmd->add_option("--phase", gen_op.phase_shift_rad, "Phase shift in rad");
  generate_cmd->add_option("--speed", gen_op.speed_rpm, "Speed in rpm");
  generate_cmd->add_option("--fault", gen_faults,
                           "Fault mode (repeatable): harmonic:N:A, sideband:C:O:D, "
                           "valve:R:A");
  generate_cmd->add_option("--noise", gen_noise,
                           "Noise: gaussian:S, uniform:H or impulsive:R:A");
  generate_cmd->add_option("--snr", gen_snr,
                           "Size the chosen noise kind for this SNR in dB instead of "
                           "its literal parameters");
  generate_cmd->add_option(
      "--onset", gen_onset,
      "Fault onset in seconds (healthy before it; negative = whole record)");

  auto* calibrate_cmd = app.add_subcommand(
      "calibrate", "Build a signature library from seeded synthetic runs");
  ConfigFlags cal_flags;
  add_config_flags(calibrate_cmd, cal_flags);
  std::string cal_out;
  std::string cal_mode = "hybrid";
  std::size_t cal_seeds = 2;
  double cal_duration = 4.0, cal_snr = 10.0;
  calibrate_cmd->add_option("--out", cal_out, "Library JSON output path")->required();
  calibrate_cmd->add_option("--mode", cal_mode,
                            "Feature path: hybrid, fusion_only or stft_only");
  calibrate_cmd->add_option("--seeds", cal_seeds, "Seeds per calibration case");
  calibrate_cmd->add_option("--duration", cal_duration,
                            "Seconds per calibration record");
  calibrate_cmd->add_option("--snr", cal_snr, "Calibration SNR in dB");

  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Run the full pipeline over a record and emit a report");
  ConfigFlags ana_flags;
  add_config_flags(analyze_cmd, ana_flags);
  std::string ana_input, ana_report, ana_out_dir;
  std::string ana_mode = "hybrid";
  analyze_cmd->add_option("--input", ana_input, "Record payload path")->required();
  analyze_cmd->add_option("--report", ana_report, "Report JSON output path");
  analyze_cmd->add_option("--out-dir", ana_out_dir,
                          "Directory for separated sources, spectrogram CSVs, "
                          "features and alarm events");
  analyze_cmd->add_option("--mode", ana_mode,
                          "Feature path: hybrid, fusion_only or stft_only");

  auto* monitor_cmd = app.add_subcommand(
      "monitor", "Process a record window by window, printing one JSON line per "
                 "window plus alarm events");
  ConfigFlags mon_flags;
  add_config_flags(monitor_cmd, mon_flags);
  std::string mon_input, mon_events;
  monitor_cmd->add_option("--input", mon_input, "Record payload path")->required();
  monitor_cmd->add_option("--events", mon_events, "Alarm event JSONL output path");

  auto* compare_cmd = app.add_subcommand(
      "compare", "Run hybrid / fusion_only / stft_only over a seeded scenario suite");
  ConfigFlags cmp_flags;
  add_config_flags(compare_cmd, cmp_flags);
  std::string cmp_out;
  std::string cmp_suite = "valve";
  std::size_t cmp_seeds = 10;
  std::vector<std::string> cmp_modes = {"hybrid", "stft_only", "fusion_only"};
  compare_cmd->add_option("--out", cmp_out, "Comparison table JSON output path");
  compare_cmd->add_option("--suite", cmp_suite,
                          "Scenario suite: valve (impulsive-noise valve faults) or "
                          "detection (all regimes, all faults)");
  compare_cmd->add_option("--seeds", cmp_seeds, "Seeds per suite");
  compare_cmd->add_option("--mode", cmp_modes, "Modes to evaluate (repeatable)");

  auto* bench_cmd = app.add_subcommand(
      "bench", "Time one analysis unit end to end at the configured rates");
  ConfigFlags bench_flags;
  add_config_flags(bench_cmd, bench_flags);
  std::size_t bench_channels = 4;
  double bench_duration = 2.0;
  double bench_target = 2.0, bench_limit = 4.0;
  bench_cmd->add_option("--channels", bench_channels, "Channel count (3 phases + aux)");
  bench_cmd->add_option("--duration", bench_duration, "Unit length in seconds");
  bench_cmd->add_option("--target", bench_target, "Target seconds (warn above)");
  bench_cmd->add_option("--fail-over", bench_limit, "Hard limit in seconds (fail above)");

  try {
    app.parse(argc, argv);

    if (generate_cmd->parsed()) {
      return run_generate(gen_op, gen_faults, gen_noise, gen_snr, gen_rate,
                          gen_duration, gen_onset, gen_seed, gen_aux, gen_out,
                          gen_encoding);
    }
    if (calibrate_cmd->parsed()) {
      const PipelineConfig cfg = resolve_config(cal_flags);
      CalibrationPlan plan = CalibrationPlan::defaults(cfg.op);
      plan.seeds_per_case = cal_seeds;
      plan.duration_s = cal_duration;
      plan.snr_db = cal_snr;
      const SignatureLibrary lib =
          calibrate_library(cfg, analysis_mode_from_name(cal_mode), plan);
      save_library(lib, cal_out);
      std::cout << json({{"path", cal_out}, {"entries", lib.entries.size()}}).dump()
                << "\n";
      return 0;
    }
    if (analyze_cmd->parsed()) {
      return run_analyze_cmd(resolve_config(ana_flags), ana_input, ana_report,
                             ana_out_dir, ana_mode);
    }
    if (monitor_cmd->parsed()) {
      return run_monitor_cmd(resolve_config(mon_flags), mon_input, mon_events);
    }
    if (compare_cmd->parsed()) {
      return run_compare_cmd(resolve_config(cmp_flags), cmp_suite, cmp_seeds,
                             cmp_modes, cmp_out);
    }
    if (bench_cmd->parsed()) {
      return run_bench_cmd(resolve_config(bench_flags), bench_channels,
                           bench_duration, bench_target, bench_limit);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json({{"error", "usage"}, {"detail", e.what()}}).dump() << "\n";
    return e.get_exit_code();
  } catch (const RecordIoError& e) {
    std::cerr << json({{"error", "record_io"}, {"detail", e.what()}}).dump() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << json({{"error", "invalid_argument"}, {"detail", e.what()}}).dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json({{"error", "runtime"}, {"detail", e.what()}}).dump() << "\n";
    return 1;
  }
}
