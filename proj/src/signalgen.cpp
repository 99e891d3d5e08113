#include "lfo/signalgen.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace lfo::signalgen {
namespace {

void check_spec(const SynthSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); };
  if (spec.count < kMinWindowSamples) fail("sample count must be at least 4");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) fail("dt must be positive");
  for (const auto& t : spec.tones) {
    if (!(t.amplitude >= 0.0) || !std::isfinite(t.amplitude)) fail("tone amplitude must be >= 0");
    if (!(t.frequency >= 0.0) || !std::isfinite(t.frequency)) fail("tone frequency must be >= 0");
    if (!std::isfinite(t.phase) || !std::isfinite(t.damping)) fail("tone phase and damping must be finite");
  }
  if (spec.noise_snr_db && spec.noise_rms) fail("noise_snr_db and noise_rms are mutually exclusive");
  if (spec.noise_snr_db && !std::isfinite(*spec.noise_snr_db)) fail("noise_snr_db must be finite");
  if (spec.noise_rms && !(*spec.noise_rms >= 0.0)) fail("noise_rms must be >= 0");
}

}  // namespace

SampleWindow generate(const SynthSpec& spec) {
  check_spec(spec);

  SampleWindow w;
  w.station_id = spec.station_id;
  w.channel = spec.channel;
  w.t0_ms = spec.t0_ms;
  w.dt = spec.dt;
  w.samples.assign(spec.count, 0.0);

  for (std::size_t m = 0; m < spec.count; ++m) {
    const double t = static_cast<double>(m) * spec.dt;
    double y = 0.0;
    for (const auto& tone : spec.tones) {
      y += tone.amplitude * std::exp(tone.damping * t) * std::cos(kTwoPi * tone.frequency * t + tone.phase);
    }
    w.samples[m] = y;
  }

  double noise_std = 0.0;
  bool exact_power = false;
  if (spec.noise_snr_db) {
    const double power =
        std::inner_product(w.samples.begin(), w.samples.end(), w.samples.begin(), 0.0) / spec.count;
    noise_std = std::sqrt(power / std::pow(10.0, *spec.noise_snr_db / 10.0));
    exact_power = true;
  } else if (spec.noise_rms) {
    noise_std = *spec.noise_rms;
  }
  if (noise_std > 0.0) {
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(spec.count);
    for (auto& n : noise) n = normal(rng);
    double scale = noise_std;
    if (exact_power) {
      // SNR is specified against the realized noise power, not its expectation.
      const double realized = std::sqrt(std::inner_product(noise.begin(), noise.end(), noise.begin(), 0.0) /
                                         static_cast<double>(spec.count));
      scale = noise_std / realized;
    }
    for (std::size_t m = 0; m < spec.count; ++m) w.samples[m] += scale * noise[m];
  }
  return w;
}

}  // namespace lfo::signalgen
