#pragma once

// Cross-validated oscillation detection: EMD band-pass, then Prony and DFT on
// the same filtered window; alarms only where both methods agree.

#include <optional>
#include <string>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::detector {

/// Every declared band containing the frequency, in declaration order.
std::vector<ModeClass> classify(double frequency_hz);

struct ModeMatch {
  PronyMode prony;
  SpectrumPeak peak;
};

struct MatchResult {
  std::vector<ModeMatch> matches;
  std::vector<PronyMode> unmatched_prony;
  std::vector<SpectrumPeak> unmatched_peaks;
};

/// Greedy frequency matching: modes are taken in descending energy order and
/// each claims the nearest unused peak within tol_hz (ties to the lower frequency).
MatchResult match_modes(const std::vector<PronyMode>& prony, const std::vector<SpectrumPeak>& peaks, double tol_hz);

Severity assess_severity(const PronyMode& mode, const std::vector<ModeClass>& classes, const AnalysisConfig& cfg);

struct DetectionReport {
  std::string station_id;
  Channel channel = Channel::Frequency_Hz;
  std::int64_t t0_ms = 0;
  double duration = 0.0;
  double match_tolerance_hz = 0.0;

  /// Empty when the band-pass left nothing to analyze.
  std::optional<PronyFit> prony_fit;
  std::vector<SpectrumPeak> fft_peaks;
  std::vector<AlarmEvent> alarms;
  std::vector<PronyMode> unmatched_prony;
  std::vector<SpectrumPeak> unmatched_fft;
  /// Agreeing pairs that fall outside every class band or failed a quality gate.
  std::vector<ModeMatch> suppressed_matches;
  std::vector<std::string> notes;
};

DetectionReport detect(const SampleWindow& w, const AnalysisConfig& cfg);

bool has_critical(const DetectionReport& report);

}  // namespace lfo::detector
