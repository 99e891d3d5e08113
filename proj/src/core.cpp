#include "lfo/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lfo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonPositiveDt: return "NonPositiveDt";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::InsufficientExcitation: return "InsufficientExcitation";
    case ErrorCode::RootSolverDiverged: return "RootSolverDiverged";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DtMismatch: return "DtMismatch";
  }
  return "Unknown";
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::Frequency_Hz: return "Frequency_Hz";
    case Channel::VoltageMag_pu: return "VoltageMag_pu";
    case Channel::VoltageAngle_rad: return "VoltageAngle_rad";
    case Channel::ActivePower_MW: return "ActivePower_MW";
  }
  return "Unknown";
}

std::optional<Channel> parse_channel(std::string_view text) {
  for (auto c : {Channel::Frequency_Hz, Channel::VoltageMag_pu, Channel::VoltageAngle_rad,
                 Channel::ActivePower_MW}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

const SampleWindow& validate_window(const SampleWindow& w) {
  if (!(w.dt > 0.0) || !std::isfinite(w.dt)) {
    throw Error(ErrorCode::NonPositiveDt, "sample interval must be positive, got " + std::to_string(w.dt));
  }
  if (w.samples.size() < kMinWindowSamples) {
    throw Error(ErrorCode::TooShort,
                "window has " + std::to_string(w.samples.size()) + " samples, need at least " +
                    std::to_string(kMinWindowSamples),
                w.samples.size());
  }
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw Error(ErrorCode::NonFinite, "sample " + std::to_string(i) + " is not finite", i);
    }
  }
  return w;
}

double wrap_angle(double radians) {
  double r = std::remainder(radians, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

std::string_view to_string(ModeClass c) {
  switch (c) {
    case ModeClass::InterArea: return "InterArea";
    case ModeClass::Local: return "Local";
    case ModeClass::Control: return "Control";
    case ModeClass::Torsional: return "Torsional";
  }
  return "Unknown";
}

bool ModeBand::contains(double hz) const noexcept {
  const bool above = lower_inclusive ? hz >= lower : hz > lower;
  const bool below = upper_inclusive ? hz <= upper : hz < upper;
  return above && below;
}

const std::vector<ModeBand> kModeBands = {
    {ModeClass::InterArea, 0.1, true, 1.0, false},
    {ModeClass::Local, 1.0, true, 2.0, true},
    {ModeClass::Control, 1.5, false, 8.0, true},
    {ModeClass::Torsional, 10.0, false, std::numeric_limits<double>::infinity(), false},
};

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "Info";
    case Severity::Warning: return "Warning";
    case Severity::Critical: return "Critical";
  }
  return "Unknown";
}

void validate_config(const AnalysisConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (cfg.prony_order && *cfg.prony_order < 1) fail("prony order must be positive");
  const auto [low, high] = cfg.emd_band_hz;
  if (!(low > 0.0 && low < high)) fail("band must satisfy 0 < low < high");
  if (cfg.max_sift_iterations < 1) fail("max_sift_iterations must be positive");
  if (!(cfg.sift_sd_threshold > 0.0)) fail("sift_sd_threshold must be positive");
  if (cfg.match_tolerance_hz && !(*cfg.match_tolerance_hz > 0.0)) fail("match tolerance must be positive");
  if (!(cfg.min_mode_amplitude_fraction >= 0.0 && cfg.min_mode_amplitude_fraction < 1.0)) {
    fail("min_mode_amplitude_fraction must lie in [0, 1)");
  }
  if (!(cfg.warning_damping_threshold >= 0.0)) fail("warning_damping_threshold must be non-negative");
  if (cfg.fft_max_peaks < 1) fail("fft_max_peaks must be positive");
  if (!(cfg.fft_min_magnitude_fraction >= 0.0 && cfg.fft_min_magnitude_fraction <= 1.0)) {
    fail("fft_min_magnitude_fraction must lie in [0, 1]");
  }
  if (!(cfg.fft_min_peak_prominence >= 0.0)) fail("fft_min_peak_prominence must be non-negative");
  if (!(cfg.min_fit_quality >= 0.0 && cfg.min_fit_quality <= 1.0)) fail("min_fit_quality must lie in [0, 1]");
}

int resolve_prony_order(const AnalysisConfig& cfg, std::size_t sample_count) {
  if (!cfg.prony_order) {
    return std::max(1, std::min(static_cast<int>(sample_count / 3), kAutoOrderCap));
  }
  const int order = *cfg.prony_order;
  if (order < 1) throw Error(ErrorCode::InvalidConfig, "prony order must be positive");
  if (sample_count < 3 * static_cast<std::size_t>(order)) {
    throw Error(ErrorCode::OrderTooHigh,
                "order " + std::to_string(order) + " needs at least " + std::to_string(3 * order) +
                    " samples, window has " + std::to_string(sample_count),
                sample_count);
  }
  return order;
}

double resolve_match_tolerance(const AnalysisConfig& cfg, double window_duration) {
  if (cfg.match_tolerance_hz) return *cfg.match_tolerance_hz;
  const double rayleigh = window_duration > 0.0 ? 1.0 / window_duration : 0.0;
  return std::max(rayleigh, 0.05);
}

}  // namespace lfo
