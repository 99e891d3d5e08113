#pragma once

// Prony analysis: linear prediction fit, characteristic rooting, mode mapping
// and least-squares amplitude recovery.

#include <complex>
#include <span>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::prony {

/// Rank threshold (relative to the largest pivot) of the prediction system.
inline constexpr double kLpmRankTolerance = 1e-10;
inline constexpr double kIllConditionedLimit = 1e12;
/// Modes whose amplitude changes by more than e^20 over the window are discarded.
inline constexpr double kMaxDampingSpan = 20.0;

/// Least-squares coefficients a_1..a_N of y_m = sum_i a_i y_{m-i}, m = N..M-1.
/// Rank-deficient systems get the minimum-norm solution.
std::vector<double> fit_lpm(std::span<const double> y, int order);
std::vector<double> fit_lpm(const SampleWindow& w, int order);

/// All roots of z^N - a_1 z^{N-1} - ... - a_N, conjugate-symmetric and sorted
/// by argument. Throws RootSolverDiverged if any residual stays too large.
std::vector<std::complex<double>> characteristic_roots(std::span<const double> a);

/// A root (or a conjugate pair, represented by its upper-half-plane member)
/// mapped to continuous-time damping and frequency.
struct RootMode {
  std::complex<double> root;
  double damping = 0.0;
  double frequency = 0.0;
  bool conjugate_pair = false;
};

struct RootMapping {
  std::vector<RootMode> modes;
  std::size_t dropped_zero_roots = 0;
};

/// sigma = Re(ln z) / dt, f = |Im(ln z)| / (2 pi dt). Conjugate pairs collapse to
/// one entry; zero roots are dropped and counted.
RootMapping roots_to_modes(std::span<const std::complex<double>> roots, double dt);

struct ModeAmplitude {
  double amplitude = 0.0;
  double phase = 0.0;
};

struct AmplitudeSolution {
  /// Aligned with the `modes` argument.
  std::vector<ModeAmplitude> amplitudes;
  double condition_estimate = 0.0;
  bool ill_conditioned = false;
};

/// Least-squares fit of y_m = sum_n B_n z_n^m over the Vandermonde basis of
/// the given modes (both members of every pair).
AmplitudeSolution solve_amplitudes(std::span<const double> y, const std::vector<RootMode>& modes);

/// Full pipeline with pruning, energy ranking and reconstruction check.
PronyFit analyze(const SampleWindow& w, const AnalysisConfig& cfg);

/// Evaluates the damped-cosine sum at m * dt, m = 0..count-1.
std::vector<double> reconstruct(std::span<const PronyMode> modes, std::size_t count, double dt);
std::vector<double> reconstruct(const PronyFit& fit, std::size_t count, double dt);

}  // namespace lfo::prony
