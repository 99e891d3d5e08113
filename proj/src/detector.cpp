#include "lfo/detector.hpp"

#include <algorithm>
#include <cmath>

#include "lfo/emd.hpp"
#include "lfo/prony.hpp"
#include "lfo/spectrum.hpp"

namespace lfo::detector {

std::vector<ModeClass> classify(double frequency_hz) {
  std::vector<ModeClass> out;
  for (const auto& band : kModeBands) {
    if (band.contains(frequency_hz)) out.push_back(band.mode);
  }
  return out;
}

MatchResult match_modes(const std::vector<PronyMode>& prony, const std::vector<SpectrumPeak>& peaks, double tol_hz) {
  std::vector<std::size_t> order(prony.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return prony[l].energy_fraction > prony[r].energy_fraction;
  });

  MatchResult out;
  std::vector<bool> used(peaks.size(), false);
  for (auto i : order) {
    const auto& mode = prony[i];
    std::size_t best = peaks.size();
    for (std::size_t j = 0; j < peaks.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(mode.frequency - peaks[j].frequency);
      if (d > tol_hz) continue;
      if (best == peaks.size()) {
        best = j;
        continue;
      }
      const double best_d = std::abs(mode.frequency - peaks[best].frequency);
      if (d < best_d || (d == best_d && peaks[j].frequency < peaks[best].frequency)) best = j;
    }
    if (best == peaks.size()) {
      out.unmatched_prony.push_back(mode);
    } else {
      used[best] = true;
      out.matches.push_back({mode, peaks[best]});
    }
  }
  for (std::size_t j = 0; j < peaks.size(); ++j) {
    if (!used[j]) out.unmatched_peaks.push_back(peaks[j]);
  }
  return out;
}

Severity assess_severity(const PronyMode& mode, const std::vector<ModeClass>& classes, const AnalysisConfig& cfg) {
  const bool growing = mode.damping > 0.0;
  const bool electromechanical =
      std::any_of(classes.begin(), classes.end(),
                  [](ModeClass c) { return c == ModeClass::InterArea || c == ModeClass::Local; });
  if (growing && electromechanical) return Severity::Critical;
  if (growing) return Severity::Warning;
  if (std::abs(mode.damping) < cfg.warning_damping_threshold) return Severity::Warning;
  return Severity::Info;
}

DetectionReport detect(const SampleWindow& w, const AnalysisConfig& cfg) {
  validate_window(w);
  validate_config(cfg);

  DetectionReport report;
  report.station_id = w.station_id;
  report.channel = w.channel;
  report.t0_ms = w.t0_ms;
  report.duration = w.duration();
  report.match_tolerance_hz = resolve_match_tolerance(cfg, report.duration);

  SampleWindow filtered;
  try {
    filtered = emd::bandpass(w, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyBand) throw;
    report.notes.emplace_back("band-pass filter left no IMF in band; nothing to analyze");
    return report;
  }

  try {
    report.prony_fit = prony::analyze(filtered, cfg);
  } catch (const Error& e) {
    report.notes.emplace_back(std::string("Prony analysis failed: ") + e.what());
  }

  const auto s = spectrum::dft(filtered, spectrum::WindowFunction::Hann);
  const double nyquist = s.frequency(s.nyquist_bin());
  const std::pair<double, double> band{cfg.emd_band_hz.first, std::min(cfg.emd_band_hz.second, nyquist)};
  try {
    const double floor = cfg.fft_min_peak_prominence * spectrum::band_median_magnitude(s, band);
    for (const auto& peak : spectrum::find_peaks(s, band, cfg.fft_max_peaks, cfg.fft_min_magnitude_fraction)) {
      if (peak.magnitude >= floor) report.fft_peaks.push_back(peak);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyBand) throw;
    report.notes.emplace_back("no spectral peak in band");
  }

  const std::vector<PronyMode> modes = report.prony_fit ? report.prony_fit->modes : std::vector<PronyMode>{};
  MatchResult matched = match_modes(modes, report.fft_peaks, report.match_tolerance_hz);
  report.unmatched_prony = std::move(matched.unmatched_prony);
  report.unmatched_fft = std::move(matched.unmatched_peaks);

  const bool trusted_fit = report.prony_fit && report.prony_fit->fit_quality >= cfg.min_fit_quality;
  if (report.prony_fit && !trusted_fit) {
    report.notes.emplace_back("Prony fit quality below threshold; matches suppressed");
  }
  for (const auto& match : matched.matches) {
    const double mean_hz = 0.5 * (match.prony.frequency + match.peak.frequency);
    auto classes = classify(mean_hz);
    if (!trusted_fit || classes.empty()) {
      report.suppressed_matches.push_back(match);
      continue;
    }
    AlarmEvent alarm;
    alarm.station_id = w.station_id;
    alarm.channel = w.channel;
    alarm.t0_ms = w.t0_ms;
    alarm.duration = report.duration;
    alarm.matched_frequency_hz = mean_hz;
    alarm.prony_mode = match.prony;
    alarm.fft_peak = match.peak;
    alarm.growing = match.prony.damping > 0.0;
    alarm.severity = assess_severity(match.prony, classes, cfg);
    alarm.classes = std::move(classes);
    report.alarms.push_back(std::move(alarm));
  }
  return report;
}

bool has_critical(const DetectionReport& report) {
  return std::any_of(report.alarms.begin(), report.alarms.end(),
                     [](const AlarmEvent& a) { return a.severity == Severity::Critical; });
}

}  // namespace lfo::detector
