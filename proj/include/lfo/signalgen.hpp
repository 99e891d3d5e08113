#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::signalgen {

/// One synthetic component A e^{sigma t} cos(2 pi f t + phase).
struct ToneSpec {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double damping = 0.0;
};

struct SynthSpec {
  std::vector<ToneSpec> tones;
  double dt = 0.04;
  std::size_t count = 0;
  /// Gaussian noise at this SNR relative to the mean power of the noiseless sum.
  std::optional<double> noise_snr_db;
  /// Gaussian noise with this absolute standard deviation. Exclusive with noise_snr_db.
  std::optional<double> noise_rms;
  std::uint64_t rng_seed = 0;

  std::string station_id = "SYNTH";
  Channel channel = Channel::Frequency_Hz;
  std::int64_t t0_ms = 0;
};

/// Samples the tone sum at m * dt for m = 0..count-1 and adds seeded noise.
/// Throws InvalidSpec if the SynthSpec is malformed.
SampleWindow generate(const SynthSpec& spec);

}  // namespace lfo::signalgen
