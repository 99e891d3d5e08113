#include "lfo/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace lfo::spectrum {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Neighbours below this fraction of the peak carry no interpolation information.
constexpr double kRefinementFloor = 1e-9;

}  // namespace

double Spectrum::magnitude(std::size_t k) const { return std::abs(bins[k]); }

double Spectrum::phase(std::size_t k) const { return std::atan2(bins[k].imag(), bins[k].real()); }

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t m = 0; m < n; ++m) {
    w[m] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(m) / static_cast<double>(n)));
  }
  return w;
}

Spectrum dft(const SampleWindow& w, WindowFunction window_fn) {
  validate_window(w);
  const std::size_t n = w.size();
  std::vector<double> input = w.samples;
  double scale = 1.0 / static_cast<double>(n);
  if (window_fn == WindowFunction::Hann) {
    const auto taper = hann(n);
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      input[m] *= taper[m];
      sum += taper[m];
    }
    scale = 1.0 / sum;
  }

  const std::size_t half = n / 2 + 1;
  std::vector<fftw_complex> out(half);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), input.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.df = 1.0 / (static_cast<double>(n) * w.dt);
  s.bins.resize(n);
  for (std::size_t k = 0; k < half; ++k) s.bins[k] = {out[k][0] * scale, out[k][1] * scale};
  for (std::size_t k = half; k < n; ++k) s.bins[k] = std::conj(s.bins[n - k]);
  return s;
}

std::vector<SpectrumPeak> find_peaks(const Spectrum& s, std::pair<double, double> band_hz, int max_peaks,
                                     double min_magnitude_fraction) {
  const std::size_t top = s.nyquist_bin();
  std::vector<std::size_t> in_band;
  for (std::size_t k = 0; k <= top && k < s.size(); ++k) {
    const double f = s.frequency(k);
    if (f >= band_hz.first && f <= band_hz.second) in_band.push_back(k);
  }
  double band_max = 0.0;
  for (auto k : in_band) band_max = std::max(band_max, s.magnitude(k));
  if (in_band.empty() || !(band_max > 0.0)) {
    throw Error(ErrorCode::EmptyBand, "no spectral energy inside the requested band");
  }

  // Magnitudes are symmetric about DC and Nyquist, so the neighbour of an edge bin is its mirror.
  auto mag_at = [&](long long k) {
    const auto n = static_cast<long long>(s.size());
    k = ((k % n) + n) % n;
    return s.magnitude(static_cast<std::size_t>(k));
  };

  const double threshold = min_magnitude_fraction * band_max;
  std::vector<SpectrumPeak> peaks;
  for (auto k : in_band) {
    const auto kk = static_cast<long long>(k);
    const double centre = s.magnitude(k);
    const double left = mag_at(kk - 1);
    const double right = mag_at(kk + 1);
    if (!(centre >= threshold) || !(centre > left) || !(centre >= right)) continue;

    double offset = 0.0;
    double refined = centre;
    const bool edge = k == 0 || k == top;
    if (!edge && left > kRefinementFloor * centre && right > kRefinementFloor * centre) {
      const double a = std::log(left);
      const double b = std::log(centre);
      const double c = std::log(right);
      const double denom = a - 2.0 * b + c;
      if (denom < 0.0) {
        offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
        refined = std::exp(b - 0.25 * (a - c) * offset);
      }
    }
    const double f = std::clamp((static_cast<double>(k) + offset) * s.df, 0.0, s.frequency(top));
    peaks.push_back({f, refined, s.phase(k)});
  }
  if (peaks.empty()) throw Error(ErrorCode::EmptyBand, "no spectral peak inside the requested band");

  std::stable_sort(peaks.begin(), peaks.end(), [](const SpectrumPeak& l, const SpectrumPeak& r) {
    if (l.magnitude != r.magnitude) return l.magnitude > r.magnitude;
    return l.frequency < r.frequency;
  });
  if (peaks.size() > static_cast<std::size_t>(std::max(max_peaks, 0))) {
    peaks.resize(static_cast<std::size_t>(std::max(max_peaks, 0)));
  }
  return peaks;
}

double band_median_magnitude(const Spectrum& s, std::pair<double, double> band_hz) {
  std::vector<double> mags;
  for (std::size_t k = 0; k <= s.nyquist_bin() && k < s.size(); ++k) {
    const double f = s.frequency(k);
    if (f >= band_hz.first && f <= band_hz.second) mags.push_back(s.magnitude(k));
  }
  if (mags.empty()) return 0.0;
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  return *mid;
}

}  // namespace lfo::spectrum
