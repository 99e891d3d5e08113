#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "lfo/detector.hpp"
#include "lfo/emd.hpp"
#include "lfo/ingest.hpp"
#include "lfo/prony.hpp"
#include "lfo/signalgen.hpp"
#include "lfo/spectrum.hpp"

namespace lfo::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for bad flag values that CLI11 cannot catch by type.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (values.size() != expected) {
    throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated numbers, got '" + text + "'");
  }
  return values;
}

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string three_digits(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::FileUnreadable, "cannot write '" + tmp.string() + "'");
    f << content;
    if (!f) throw Error(ErrorCode::FileUnreadable, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string window_tag(const SampleWindow& w) {
  return w.station_id + "_" + std::string(to_string(w.channel)) + "_" + std::to_string(w.t0_ms);
}

std::string window_label(const SampleWindow& w) {
  return w.station_id + "/" + std::string(to_string(w.channel)) + "@" + std::to_string(w.t0_ms);
}

json mode_json(const PronyMode& m) {
  return {{"amplitude", m.amplitude},
          {"damping", m.damping},
          {"frequency", m.frequency},
          {"phase", m.phase},
          {"energy_fraction", m.energy_fraction}};
}

json alarm_json(const AlarmEvent& a) {
  json classes = json::array();
  for (auto c : a.classes) classes.push_back(std::string(to_string(c)));
  return {{"station_id", a.station_id},
          {"channel", std::string(to_string(a.channel))},
          {"t0", a.t0_ms},
          {"duration", a.duration},
          {"matched_frequency_hz", a.matched_frequency_hz},
          {"prony_mode", mode_json(a.prony_mode)},
          {"fft_peak",
           {{"frequency", a.fft_peak.frequency}, {"magnitude", a.fft_peak.magnitude}, {"phase", a.fft_peak.phase}}},
          {"classes", classes},
          {"growing", a.growing},
          {"severity", std::string(to_string(a.severity))}};
}

// Flag storage shared by the window-processing subcommands.
struct CommonFlags {
  std::string archive;
  fs::path out_dir = "lfo_out";
  int jobs = 1;

  ingest::WindowingPolicy policy;

  std::string order = "auto";
  std::string band = "0.1,2.0";
  int max_sift = 50;
  double sift_sd = 0.2;
  std::string match_tol = "auto";
  double min_amp_fraction = 0.02;
  double warn_damping = 0.1;
  double min_fit_quality = 0.6;
  int fft_max_peaks = 10;
  double fft_min_fraction = 0.1;
  double fft_prominence = 8.0;
};

void add_policy_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("archive", f.archive, "Archive CSV (timestamp_ms,station_id,channel,value)")->required();
  cmd->add_option("--window-seconds", f.policy.window_seconds, "Analysis window length in seconds")
      ->capture_default_str();
  cmd->add_option("--stride-seconds", f.policy.stride_seconds, "Window advance in seconds")->capture_default_str();
  cmd->add_option("--expected-dt", f.policy.expected_dt, "Reporting interval in seconds")->capture_default_str();
  cmd->add_option("--max-gap-fraction", f.policy.max_gap_fraction, "Maximum missing/irregular sample fraction")
      ->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Windows processed concurrently")->envname("LFO_JOBS")->capture_default_str();
}

void add_analysis_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--order", f.order, "Prony order or 'auto'")->capture_default_str();
  cmd->add_option("--band", f.band, "EMD band-pass band 'low,high' in Hz")->capture_default_str();
  cmd->add_option("--max-sift", f.max_sift, "Maximum sifting iterations per IMF")->capture_default_str();
  cmd->add_option("--sift-sd", f.sift_sd, "Sifting SD stop threshold")->capture_default_str();
  cmd->add_option("--match-tol", f.match_tol, "Prony/FFT match tolerance in Hz or 'auto'")->capture_default_str();
  cmd->add_option("--min-amp-fraction", f.min_amp_fraction, "Prune modes below this fraction of the largest")
      ->capture_default_str();
  cmd->add_option("--warn-damping", f.warn_damping, "Decay rate (1/s) below which alarms are Warning")
      ->capture_default_str();
  cmd->add_option("--min-fit-quality", f.min_fit_quality, "Minimum Prony fit quality for alarms")
      ->capture_default_str();
  cmd->add_option("--fft-max-peaks", f.fft_max_peaks, "Maximum spectral peaks per window")->capture_default_str();
  cmd->add_option("--fft-min-fraction", f.fft_min_fraction, "Peak floor as a fraction of the band maximum")
      ->capture_default_str();
  cmd->add_option("--fft-prominence", f.fft_prominence, "Peak floor as a multiple of the in-band median")
      ->capture_default_str();
}

AnalysisConfig build_config(const CommonFlags& f) {
  AnalysisConfig cfg;
  if (f.order != "auto") {
    try {
      std::size_t used = 0;
      cfg.prony_order = std::stoi(f.order, &used);
      if (used != f.order.size()) throw std::invalid_argument(f.order);
    } catch (const std::exception&) {
      throw UsageError("--order must be a positive integer or 'auto'");
    }
  }
  const auto band = parse_list(f.band, 2, "--band");
  cfg.emd_band_hz = {band[0], band[1]};
  cfg.max_sift_iterations = f.max_sift;
  cfg.sift_sd_threshold = f.sift_sd;
  if (f.match_tol != "auto") cfg.match_tolerance_hz = parse_list(f.match_tol, 1, "--match-tol")[0];
  cfg.min_mode_amplitude_fraction = f.min_amp_fraction;
  cfg.warning_damping_threshold = f.warn_damping;
  cfg.min_fit_quality = f.min_fit_quality;
  cfg.fft_max_peaks = f.fft_max_peaks;
  cfg.fft_min_magnitude_fraction = f.fft_min_fraction;
  cfg.fft_min_peak_prominence = f.fft_prominence;
  validate_config(cfg);
  return cfg;
}

json config_json(const AnalysisConfig& cfg) {
  return {{"prony_order", cfg.prony_order ? json(*cfg.prony_order) : json("auto")},
          {"emd_band_hz", {cfg.emd_band_hz.first, cfg.emd_band_hz.second}},
          {"max_sift_iterations", cfg.max_sift_iterations},
          {"sift_sd_threshold", cfg.sift_sd_threshold},
          {"match_tolerance_hz", cfg.match_tolerance_hz ? json(*cfg.match_tolerance_hz) : json("auto")},
          {"min_mode_amplitude_fraction", cfg.min_mode_amplitude_fraction},
          {"warning_damping_threshold", cfg.warning_damping_threshold},
          {"min_fit_quality", cfg.min_fit_quality},
          {"fft_max_peaks", cfg.fft_max_peaks},
          {"fft_min_magnitude_fraction", cfg.fft_min_magnitude_fraction},
          {"fft_min_peak_prominence", cfg.fft_min_peak_prominence}};
}

json policy_json(const ingest::WindowingPolicy& p) {
  return {{"window_seconds", p.window_seconds},
          {"stride_seconds", p.stride_seconds},
          {"expected_dt", p.expected_dt},
          {"max_gap_fraction", p.max_gap_fraction}};
}

struct LoadedArchive {
  ingest::ArchiveContents contents;
  ingest::WindowingResult windowing;
};

LoadedArchive load(const CommonFlags& f) {
  LoadedArchive loaded;
  loaded.contents = ingest::read_archive(f.archive);
  loaded.windowing = ingest::make_windows(loaded.contents.records, f.policy);
  return loaded;
}

json base_manifest(const std::string& command, const CommonFlags& f, const LoadedArchive& loaded) {
  json m;
  m["tool"] = "lfo";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["inputs"] = json::array({{{"path", f.archive},
                              {"sha256", sha256_file(f.archive)},
                              {"bytes", static_cast<std::uintmax_t>(fs::file_size(f.archive))}}});
  m["windowing"] = policy_json(f.policy);
  json issues = json::array();
  for (const auto& i : loaded.contents.issues) issues.push_back({{"line", i.line}, {"message", i.message}});
  m["parse_issues"] = issues;
  json skipped = json::array();
  for (const auto& d : loaded.windowing.diagnostics) {
    skipped.push_back({{"station_id", d.station_id},
                       {"channel", std::string(to_string(d.channel))},
                       {"t0", d.t0_ms},
                       {"reason", d.message}});
  }
  m["skipped_windows"] = skipped;
  m["windows"] = json::array();
  if (loaded.windowing.windows.empty()) m["note"] = "no windows";
  return m;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(workers, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Wraps a window-level failure with the window identity.
template <typename Fn>
auto with_window(const SampleWindow& w, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "window " + window_label(w) + ": " + e.what(), e.index());
  }
}

// ---------------------------------------------------------------------------

struct SynthFlags {
  std::vector<std::string> tones;
  double dt = 0.04;
  double seconds = 25.0;
  std::optional<std::size_t> count;
  std::optional<double> snr_db;
  std::optional<double> noise_rms;
  std::uint64_t seed = 0;
  std::string station = "SYNTH";
  std::string channel = "Frequency_Hz";
  std::int64_t t0_ms = 0;
  std::string output;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  signalgen::SynthSpec spec;
  for (const auto& t : f.tones) {
    const auto v = parse_list(t, 4, "--tone");
    spec.tones.push_back({.amplitude = v[0], .frequency = v[1], .phase = v[3], .damping = v[2]});
  }
  spec.dt = f.dt;
  spec.count = f.count ? *f.count : static_cast<std::size_t>(std::llround(f.seconds / f.dt));
  spec.noise_snr_db = f.snr_db;
  spec.noise_rms = f.noise_rms;
  spec.rng_seed = f.seed;
  spec.station_id = f.station;
  const auto channel = parse_channel(f.channel);
  if (!channel) throw UsageError("unknown channel '" + f.channel + "'");
  spec.channel = *channel;
  spec.t0_ms = f.t0_ms;

  const auto window = signalgen::generate(spec);
  std::ostringstream csv;
  ingest::write_archive(csv, std::span(&window, 1));
  if (f.output.empty() || f.output == "-") {
    out << csv.str();
  } else {
    write_atomically(f.output, csv.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeFlags {
  bool emd_prefilter = false;
  bool dump_imfs = false;
};

int cmd_analyze(const CommonFlags& f, const AnalyzeFlags& af, std::ostream& out) {
  const AnalysisConfig cfg = build_config(f);
  const LoadedArchive loaded = load(f);
  const auto& windows = loaded.windowing.windows;

  struct Outcome {
    PronyFit fit;
    std::optional<emd::ImfSet> imfs;
    std::string note;
  };
  std::vector<Outcome> outcomes(windows.size());
  parallel_for(windows.size(), f.jobs, [&](std::size_t i) {
    const auto& w = windows[i];
    with_window(w, [&] {
      Outcome& o = outcomes[i];
      if (af.dump_imfs || af.emd_prefilter) o.imfs = emd::decompose(w, cfg);
      SampleWindow input = w;
      if (af.emd_prefilter) {
        try {
          input = emd::bandpass(w, *o.imfs, cfg);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyBand) throw;
          o.note = "no IMF in band";
          return 0;
        }
      }
      o.fit = prony::analyze(input, cfg);
      return 0;
    });
  });

  json manifest = base_manifest("analyze", f, loaded);
  manifest["config"] = config_json(cfg);
  manifest["config"]["emd_prefilter"] = af.emd_prefilter;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const auto& o = outcomes[i];
    std::vector<PronyMode> rows = o.fit.modes;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const PronyMode& l, const PronyMode& r) { return l.amplitude > r.amplitude; });

    std::ostringstream csv;
    csv << "amplitude,damping,frequency_hz,phase_rad,energy_fraction,fit_quality\n";
    for (const auto& m : rows) {
      csv << full_precision(m.amplitude) << ',' << full_precision(m.damping) << ',' << full_precision(m.frequency)
          << ',' << full_precision(m.phase) << ',' << full_precision(m.energy_fraction) << ','
          << full_precision(o.fit.fit_quality) << '\n';
    }
    const std::string table_name = window_tag(w) + ".modes.csv";
    write_atomically(f.out_dir / table_name, csv.str());
    json artifacts = json::array({table_name});

    if (af.dump_imfs && o.imfs) {
      std::ostringstream imf_csv;
      imf_csv << "t";
      for (std::size_t k = 0; k < o.imfs->imfs.size(); ++k) imf_csv << ",imf" << (k + 1);
      imf_csv << ",residue\n";
      for (std::size_t m = 0; m < w.size(); ++m) {
        imf_csv << full_precision(static_cast<double>(m) * w.dt);
        for (const auto& imf : o.imfs->imfs) imf_csv << ',' << full_precision(imf.samples[m]);
        imf_csv << ',' << full_precision(o.imfs->residue[m]) << '\n';
      }
      const std::string imf_name = window_tag(w) + ".imfs.csv";
      write_atomically(f.out_dir / imf_name, imf_csv.str());
      artifacts.push_back(imf_name);
    }

    out << "Window " << window_label(w) << "  order " << o.fit.order << "  fit quality "
        << three_digits(o.fit.fit_quality) << (o.note.empty() ? "" : "  (" + o.note + ")") << '\n';
    out << "  Sr.  Amplitude  Damping  Frequency(Hz)\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out << "  " << std::setw(3) << (k + 1) << "  " << std::setw(9) << three_digits(rows[k].amplitude) << "  "
          << std::setw(7) << three_digits(rows[k].damping) << "  " << std::setw(13) << three_digits(rows[k].frequency)
          << '\n';
    }

    json entry = {{"station_id", w.station_id},
                  {"channel", std::string(to_string(w.channel))},
                  {"t0", w.t0_ms},
                  {"status", o.note.empty() ? "ok" : o.note},
                  {"modes", rows.size()},
                  {"fit_quality", o.fit.fit_quality},
                  {"artifacts", artifacts}};
    if (!o.fit.diagnostics.empty()) entry["diagnostics"] = o.fit.diagnostics;
    manifest["windows"].push_back(entry);
  }
  if (windows.empty()) out << "no windows\n";
  write_atomically(f.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_detect(const CommonFlags& f, bool write_files, std::ostream& out) {
  const AnalysisConfig cfg = build_config(f);
  const LoadedArchive loaded = load(f);
  const auto& windows = loaded.windowing.windows;

  std::vector<detector::DetectionReport> reports(windows.size());
  parallel_for(windows.size(), f.jobs, [&](std::size_t i) {
    reports[i] = with_window(windows[i], [&] { return detector::detect(windows[i], cfg); });
  });

  std::ostringstream lines;
  bool critical = false;
  json manifest = base_manifest("detect", f, loaded);
  manifest["config"] = config_json(cfg);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    for (const auto& a : r.alarms) lines << alarm_json(a).dump() << '\n';
    critical = critical || detector::has_critical(r);
    manifest["windows"].push_back({{"station_id", r.station_id},
                                   {"channel", std::string(to_string(r.channel))},
                                   {"t0", r.t0_ms},
                                   {"alarms", r.alarms.size()},
                                   {"critical", detector::has_critical(r)},
                                   {"prony_modes", r.prony_fit ? r.prony_fit->modes.size() : 0},
                                   {"fft_peaks", r.fft_peaks.size()},
                                   {"notes", r.notes}});
  }
  out << lines.str();
  if (write_files) {
    write_atomically(f.out_dir / "alarms.jsonl", lines.str());
    manifest["artifacts"] = json::array({"alarms.jsonl"});
    write_atomically(f.out_dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return critical ? kExitCritical : kExitOk;
}

// ---------------------------------------------------------------------------

struct SpectrumFlags {
  std::optional<std::string> band;
  std::string window = "hann";
};

int cmd_spectrum(const CommonFlags& f, const SpectrumFlags& sf) {
  std::optional<std::pair<double, double>> band;
  if (sf.band) {
    const auto v = parse_list(*sf.band, 2, "--band");
    band = std::pair{v[0], v[1]};
  }
  spectrum::WindowFunction fn;
  if (sf.window == "hann") {
    fn = spectrum::WindowFunction::Hann;
  } else if (sf.window == "rect") {
    fn = spectrum::WindowFunction::Rectangular;
  } else {
    throw UsageError("--window must be 'hann' or 'rect'");
  }

  const LoadedArchive loaded = load(f);
  const auto& windows = loaded.windowing.windows;
  std::vector<std::string> tables(windows.size());
  parallel_for(windows.size(), f.jobs, [&](std::size_t i) {
    const auto s = with_window(windows[i], [&] { return spectrum::dft(windows[i], fn); });
    std::ostringstream csv;
    csv << "frequency_hz,magnitude,phase_rad\n";
    for (std::size_t k = 0; k <= s.nyquist_bin(); ++k) {
      const double hz = s.frequency(k);
      if (band && (hz < band->first || hz > band->second)) continue;
      csv << full_precision(hz) << ',' << full_precision(s.magnitude(k)) << ',' << full_precision(s.phase(k)) << '\n';
    }
    tables[i] = csv.str();
  });

  json manifest = base_manifest("spectrum", f, loaded);
  manifest["window_function"] = sf.window;
  if (band) manifest["band_hz"] = {band->first, band->second};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::string name = window_tag(windows[i]) + ".spectrum.csv";
    write_atomically(f.out_dir / name, tables[i]);
    manifest["windows"].push_back({{"station_id", windows[i].station_id},
                                   {"channel", std::string(to_string(windows[i].channel))},
                                   {"t0", windows[i].t0_ms},
                                   {"artifacts", json::array({name})}});
  }
  write_atomically(f.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-frequency oscillation analysis for synchrophasor archives", "lfo"};
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic damped-mode archive");
  synth->add_option("--tone", synth_flags.tones, "Tone 'amplitude,frequency_hz,damping,phase' (repeatable)")
      ->required()
      ->take_all();
  synth->add_option("--dt", synth_flags.dt, "Sample interval in seconds")->capture_default_str();
  synth->add_option("--seconds", synth_flags.seconds, "Record length; sample count = seconds / dt")
      ->capture_default_str();
  synth->add_option("--count", synth_flags.count, "Explicit sample count (overrides --seconds)");
  auto* snr = synth->add_option("--snr-db", synth_flags.snr_db, "Gaussian noise SNR in dB");
  synth->add_option("--noise-rms", synth_flags.noise_rms, "Gaussian noise standard deviation")->excludes(snr);
  synth->add_option("--seed", synth_flags.seed, "Noise RNG seed")->capture_default_str();
  synth->add_option("--station", synth_flags.station, "Station id")->capture_default_str();
  synth->add_option("--channel", synth_flags.channel, "Channel name")->capture_default_str();
  synth->add_option("--t0-ms", synth_flags.t0_ms, "First timestamp (UTC ms)")->capture_default_str();
  synth->add_option("-o,--output", synth_flags.output, "Output CSV path (stdout if omitted)");

  CommonFlags analyze_flags;
  AnalyzeFlags analyze_extra;
  auto* analyze = app.add_subcommand("analyze", "Per-window Prony mode tables");
  add_policy_flags(analyze, analyze_flags);
  add_analysis_flags(analyze, analyze_flags);
  analyze->add_option("--out-dir", analyze_flags.out_dir, "Directory for tables and manifest")->capture_default_str();
  analyze->add_flag("--emd-prefilter", analyze_extra.emd_prefilter, "Band-pass each window with EMD before Prony");
  analyze->add_flag("--dump-imfs", analyze_extra.dump_imfs, "Write each window's IMFs as CSV columns");

  CommonFlags detect_flags;
  std::optional<std::string> detect_out_dir;
  auto* detect = app.add_subcommand("detect", "Cross-validated oscillation alarms as JSON lines");
  add_policy_flags(detect, detect_flags);
  add_analysis_flags(detect, detect_flags);
  detect->add_option("--out-dir", detect_out_dir, "Also write alarms.jsonl and manifest.json here");

  CommonFlags spectrum_flags;
  SpectrumFlags spectrum_extra;
  auto* spec = app.add_subcommand("spectrum", "Per-window DFT magnitude and phase");
  add_policy_flags(spec, spectrum_flags);
  spec->add_option("--out-dir", spectrum_flags.out_dir, "Directory for spectra and manifest")->capture_default_str();
  spec->add_option("--band", spectrum_extra.band, "Restrict rows to 'low,high' Hz");
  spec->add_option("--window", spectrum_extra.window, "Taper: hann or rect")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_flags, out);
    if (analyze->parsed()) return cmd_analyze(analyze_flags, analyze_extra, out);
    if (detect->parsed()) {
      if (detect_out_dir) detect_flags.out_dir = *detect_out_dir;
      return cmd_detect(detect_flags, detect_out_dir.has_value(), out);
    }
    if (spec->parsed()) return cmd_spectrum(spectrum_flags, spectrum_extra);
  } catch (const UsageError& e) {
    err << "lfo: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "lfo: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "lfo: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lfo::cli
