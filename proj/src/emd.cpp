#include "lfo/emd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

#include "lfo/spline.hpp"

namespace lfo::emd {
namespace {

constexpr std::size_t kMirrored = 2;

struct Knot {
  double x;
  double v;
};

// Vertex of the parabola through the extremum and its two neighbours, so the
// envelope follows the underlying peak rather than the sampled one.
Knot refine(std::span<const double> y, std::size_t i) {
  const double l = y[i - 1];
  const double c = y[i];
  const double r = y[i + 1];
  const double curvature = l - 2.0 * c + r;
  if (l == c || r == c || curvature == 0.0) return {static_cast<double>(i), c};
  const double delta = 0.5 * (l - r) / curvature;
  return {static_cast<double>(i) + delta, c - 0.25 * (l - r) * delta};
}

// Spline envelope through the extrema at `idx`, extended past each end by
// reflecting the nearest extrema about the endpoint.
std::vector<double> envelope(std::span<const double> y, const std::vector<std::size_t>& idx) {
  const double last = static_cast<double>(y.size() - 1);
  std::vector<Knot> knots;
  knots.reserve(idx.size());
  for (auto i : idx) knots.push_back(refine(y, i));
  const std::size_t k = std::min(kMirrored, knots.size());

  std::vector<double> xs;
  std::vector<double> ys;
  auto push = [&](double x, double v) {
    if (!xs.empty() && !(x > xs.back())) return;  // an extremum sitting on the endpoint
    xs.push_back(x);
    ys.push_back(v);
  };
  for (std::size_t j = k; j-- > 0;) push(-knots[j].x, knots[j].v);
  for (const auto& kn : knots) push(kn.x, kn.v);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& kn = knots[knots.size() - 1 - j];
    push(2.0 * last - kn.x, kn.v);
  }
  return NaturalCubicSpline(std::move(xs), std::move(ys)).sample_integers(y.size());
}

double sum_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

struct SiftOutcome {
  std::vector<double> imf;
  int iterations = 0;
};

std::optional<SiftOutcome> sift(std::vector<double> d, const AnalysisConfig& cfg) {
  for (int it = 1; it <= cfg.max_sift_iterations; ++it) {
    const Extrema ext = find_extrema(d);
    if (ext.maxima.empty() || ext.minima.empty()) {
      if (it > 1 && satisfies_imf_counts(d)) return SiftOutcome{std::move(d), it - 1};
      return std::nullopt;
    }
    const auto upper = envelope(d, ext.maxima);
    const auto lower = envelope(d, ext.minima);

    double change = 0.0;
    const double prev_energy = sum_squares(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double mean = 0.5 * (upper[i] + lower[i]);
      change += mean * mean;
      d[i] -= mean;
    }
    const double sd = prev_energy > 0.0 ? change / prev_energy : 0.0;
    if (sd < cfg.sift_sd_threshold && satisfies_imf_counts(d)) return SiftOutcome{std::move(d), it};
  }
  if (satisfies_imf_counts(d)) return SiftOutcome{std::move(d), cfg.max_sift_iterations};
  return std::nullopt;
}

}  // namespace

std::vector<double> ImfSet::reconstruct() const {
  std::vector<double> out = residue;
  for (const auto& imf : imfs) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += imf.samples[i];
  }
  return out;
}

Extrema find_extrema(std::span<const double> y) {
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  return find_extrema(y, scale);
}

Extrema find_extrema(std::span<const double> y, double reference_scale) {
  struct Point {
    std::size_t at;
    bool is_max;
  };
  std::vector<Point> points;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (y[i] == y[i - 1]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end + 1 < n && y[end + 1] == y[i]) ++end;
    if (end + 1 >= n) break;  // run touches the boundary
    const double before = y[i - 1];
    const double after = y[end + 1];
    const std::size_t at = i + (end - i) / 2;
    if (before < y[i] && after < y[i]) {
      points.push_back({at, true});
    } else if (before > y[i] && after > y[i]) {
      points.push_back({at, false});
    }
    i = end + 1;
  }

  // Merge max/min pairs whose swing is negligible against the reference scale.
  const double tol = kExtremumResolution * reference_scale;
  while (points.size() >= 2) {
    std::size_t best = 0;
    double best_swing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
      const double swing = std::abs(y[points[k].at] - y[points[k + 1].at]);
      if (swing < best_swing) {
        best_swing = swing;
        best = k;
      }
    }
    if (!(best_swing < tol)) break;
    const auto first = points.begin() + static_cast<std::ptrdiff_t>(best);
    points.erase(first, first + 2);
  }

  Extrema ext;
  for (const auto& p : points) (p.is_max ? ext.maxima : ext.minima).push_back(p.at);
  return ext;
}

std::size_t count_zero_crossings(std::span<const double> y) {
  std::size_t crossings = 0;
  int last_sign = 0;
  for (double v : y) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++crossings;
    last_sign = s;
  }
  return crossings;
}

bool satisfies_imf_counts(std::span<const double> y) {
  const auto extrema = static_cast<long long>(find_extrema(y).count());
  const auto crossings = static_cast<long long>(count_zero_crossings(y));
  return std::llabs(extrema - crossings) <= 1;
}

double mean_frequency(std::span<const double> y, double dt) {
  if (y.size() < 2 || !(dt > 0.0)) return 0.0;
  const double duration = static_cast<double>(y.size() - 1) * dt;
  return static_cast<double>(count_zero_crossings(y)) / (2.0 * duration);
}

ImfSet decompose(const SampleWindow& w, const AnalysisConfig& cfg) {
  ImfSet set;
  set.dt = w.dt;
  set.residue = w.samples;
  double scale = 0.0;
  for (double v : w.samples) scale = std::max(scale, std::abs(v));
  while (set.imfs.size() < static_cast<std::size_t>(kMaxImfs)) {
    if (find_extrema(set.residue, scale).count() < kMinResidueExtrema) break;
    auto outcome = sift(set.residue, cfg);
    if (!outcome) break;
    for (std::size_t i = 0; i < set.residue.size(); ++i) set.residue[i] -= outcome->imf[i];
    Imf imf;
    imf.mean_frequency_hz = mean_frequency(outcome->imf, w.dt);
    imf.sift_iterations = outcome->iterations;
    imf.samples = std::move(outcome->imf);
    set.imfs.push_back(std::move(imf));
  }
  return set;
}

SampleWindow bandpass(const SampleWindow& w, const AnalysisConfig& cfg) {
  return bandpass(w, decompose(w, cfg), cfg);
}

SampleWindow bandpass(const SampleWindow& w, const ImfSet& imfs, const AnalysisConfig& cfg) {
  const auto [low, high] = cfg.emd_band_hz;
  SampleWindow out = w;
  std::fill(out.samples.begin(), out.samples.end(), 0.0);
  std::size_t used = 0;
  for (const auto& imf : imfs.imfs) {
    if (imf.mean_frequency_hz < low || imf.mean_frequency_hz > high) continue;
    ++used;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += imf.samples[i];
  }
  if (used == 0) {
    throw Error(ErrorCode::EmptyBand, "no IMF has a mean frequency inside the analysis band");
  }
  return out;
}

}  // namespace lfo::emd
