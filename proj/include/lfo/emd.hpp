#pragma once

// Empirical mode decomposition used as a band-pass pre-filter.

#include <span>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::emd {

inline constexpr int kMaxImfs = 12;
inline constexpr std::size_t kMinResidueExtrema = 3;
/// Adjacent maximum/minimum pairs whose swing is below this fraction of
/// max|y| are ripple, not extrema.
inline constexpr double kExtremumResolution = 1e-2;

struct Imf {
  std::vector<double> samples;
  double mean_frequency_hz = 0.0;
  int sift_iterations = 0;
};

/// IMFs ordered highest frequency first, plus the final residue (trend).
struct ImfSet {
  std::vector<Imf> imfs;
  std::vector<double> residue;
  double dt = 0.0;

  /// Elementwise sum of all IMFs and the residue.
  std::vector<double> reconstruct() const;
};

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;

  std::size_t count() const noexcept { return maxima.size() + minima.size(); }
};

/// Interior local extrema. A flat run counts once, at its midpoint; ripple
/// pairs below kExtremumResolution are merged away, smallest swing first.
Extrema find_extrema(std::span<const double> y);

/// As above, with ripple judged against `reference_scale` instead of max|y|.
Extrema find_extrema(std::span<const double> y, double reference_scale);

/// Sign changes, skipping exact zeros.
std::size_t count_zero_crossings(std::span<const double> y);

/// Extrema and zero-crossing counts differ by at most one.
bool satisfies_imf_counts(std::span<const double> y);

/// Zero-crossing frequency estimate: crossings / (2 * (M - 1) * dt).
double mean_frequency(std::span<const double> y, double dt);

ImfSet decompose(const SampleWindow& w, const AnalysisConfig& cfg);

/// Sum of the IMFs whose mean frequency lies in cfg.emd_band_hz (inclusive).
/// The residue is always excluded. Throws EmptyBand if no IMF qualifies.
SampleWindow bandpass(const SampleWindow& w, const AnalysisConfig& cfg);

/// Same as bandpass, reusing an existing decomposition of `w`.
SampleWindow bandpass(const SampleWindow& w, const ImfSet& imfs, const AnalysisConfig& cfg);

}  // namespace lfo::emd
