#pragma once

// Shared domain types for oscillation analysis of synchrophasor channels.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lfo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
  NonFinite,
  TooShort,
  NonPositiveDt,
  InvalidSpec,
  InvalidConfig,
  EmptyBand,
  OrderTooHigh,
  InsufficientExcitation,
  RootSolverDiverged,
  FileUnreadable,
  SchemaMismatch,
  DtMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  /// Offending sample index or size, when the error carries one.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

enum class Channel { Frequency_Hz, VoltageMag_pu, VoltageAngle_rad, ActivePower_MW };

std::string_view to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view text);

/// Uniformly sampled segment of one scalar channel from one station.
struct SampleWindow {
  std::string station_id;
  Channel channel = Channel::Frequency_Hz;
  std::int64_t t0_ms = 0;
  double dt = 0.0;
  std::vector<double> samples;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept {
    return samples.empty() ? 0.0 : static_cast<double>(samples.size() - 1) * dt;
  }
};

inline constexpr std::size_t kMinWindowSamples = 4;

/// Returns `w` unchanged if it is usable for analysis, throws lfo::Error otherwise.
const SampleWindow& validate_window(const SampleWindow& w);

/// Maps any angle onto (-pi, pi].
double wrap_angle(double radians);

/// One exponentially damped sinusoid A e^{sigma t} cos(2 pi f t + theta).
/// damping > 0 means the oscillation grows.
struct PronyMode {
  double amplitude = 0.0;
  double damping = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double energy_fraction = 0.0;
};

struct PronyFit {
  int order = 0;
  std::vector<double> lpm_coefficients;
  std::vector<std::complex<double>> roots;
  std::vector<PronyMode> modes;
  double fit_quality = 0.0;
  /// Vandermonde condition estimate exceeded the reporting limit.
  bool ill_conditioned = false;
  double condition_estimate = 0.0;
  std::vector<std::string> diagnostics;
};

struct SpectrumPeak {
  double frequency = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;
};

enum class ModeClass { InterArea, Local, Control, Torsional };

std::string_view to_string(ModeClass c);

/// Frequency band owned by a mode class. Each bound is open or closed as
/// declared; upper == infinity for open-ended bands.
struct ModeBand {
  ModeClass mode;
  double lower;
  bool lower_inclusive;
  double upper;
  bool upper_inclusive;

  bool contains(double hz) const noexcept;
};

extern const std::vector<ModeBand> kModeBands;

enum class Severity { Info, Warning, Critical };

std::string_view to_string(Severity s);

struct AlarmEvent {
  std::string station_id;
  Channel channel = Channel::Frequency_Hz;
  std::int64_t t0_ms = 0;
  double duration = 0.0;
  double matched_frequency_hz = 0.0;
  PronyMode prony_mode;
  SpectrumPeak fft_peak;
  std::vector<ModeClass> classes;
  bool growing = false;
  Severity severity = Severity::Info;
};

struct AnalysisConfig {
  /// Empty means Auto: min(M / 3, 30).
  std::optional<int> prony_order;
  std::pair<double, double> emd_band_hz{0.1, 2.0};
  int max_sift_iterations = 50;
  double sift_sd_threshold = 0.2;
  /// Empty means Auto: max(1 / window duration, 0.05 Hz).
  std::optional<double> match_tolerance_hz;
  double min_mode_amplitude_fraction = 0.02;

  /// Decaying modes with |damping| below this (1/s) are raised to Warning.
  double warning_damping_threshold = 0.1;

  int fft_max_peaks = 10;
  double fft_min_magnitude_fraction = 0.1;
  /// Spectral peaks must exceed this multiple of the median in-band magnitude.
  double fft_min_peak_prominence = 8.0;
  /// Prony fits below this quality never raise alarms.
  double min_fit_quality = 0.6;
};

inline constexpr int kAutoOrderCap = 30;

/// Throws InvalidConfig for inconsistent settings.
void validate_config(const AnalysisConfig& cfg);

/// Resolves the Prony order for a window of `sample_count` samples;
/// throws OrderTooHigh when an explicit order violates M >= 3N.
int resolve_prony_order(const AnalysisConfig& cfg, std::size_t sample_count);

double resolve_match_tolerance(const AnalysisConfig& cfg, double window_duration);

}  // namespace lfo
