#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::spectrum {

enum class WindowFunction { Rectangular, Hann };

/// Y(k) = (1/M) sum_m w_m y_m e^{-j 2 pi m k / M}, k = 0..M-1.
struct Spectrum {
  std::vector<std::complex<double>> bins;
  double df = 0.0;

  std::size_t size() const noexcept { return bins.size(); }
  double frequency(std::size_t k) const noexcept { return static_cast<double>(k) * df; }
  double magnitude(std::size_t k) const;
  /// Four-quadrant phase of bin k.
  double phase(std::size_t k) const;
  /// Highest bin index not above Nyquist.
  std::size_t nyquist_bin() const noexcept { return bins.size() / 2; }
};

/// Hann taper is amplitude-compensated so an in-bin tone keeps |Y(k)| = A/2.
Spectrum dft(const SampleWindow& w, WindowFunction window_fn = WindowFunction::Rectangular);

/// Periodic Hann taper of length n.
std::vector<double> hann(std::size_t n);

/// Local maxima of |Y(k)| inside band_hz, at least min_magnitude_fraction of the
/// band maximum, refined by a parabola through the log-magnitudes, sorted by
/// magnitude descending. Throws EmptyBand when nothing qualifies.
std::vector<SpectrumPeak> find_peaks(const Spectrum& s, std::pair<double, double> band_hz, int max_peaks,
                                     double min_magnitude_fraction);

/// Median of |Y(k)| over the bins inside band_hz (0 if none).
double band_median_magnitude(const Spectrum& s, std::pair<double, double> band_hz);

}  // namespace lfo::spectrum
