#include <cmath>
#include <cstring>

#include "catch_amalgamated.hpp"
#include "lfo/signalgen.hpp"

using Catch::Approx;
using namespace lfo;
using signalgen::SynthSpec;
using signalgen::ToneSpec;

namespace {

double power(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("tone sampling follows the damped cosine", "[signalgen]") {
  SECTION("DC tone with phase offset") {
    SynthSpec spec;
    spec.count = 16;
    spec.tones = {{.amplitude = 1.0, .frequency = 0.0, .phase = 0.0, .damping = 0.0}};
    for (double v : signalgen::generate(spec).samples) REQUIRE(v == 1.0);
  }

  SECTION("single decaying tone against direct evaluation") {
    SynthSpec spec;
    spec.count = 625;
    spec.tones = {{.amplitude = 0.5, .frequency = 0.7, .phase = 0.0, .damping = -0.3}};
    const auto w = signalgen::generate(spec);
    REQUIRE(w.size() == 625);
    REQUIRE(w.dt == 0.04);
    REQUIRE(w.samples[0] == Approx(0.5).margin(1e-15));
    const double t = 25 * 0.04;
    REQUIRE(w.samples[25] == Approx(0.5 * std::exp(-0.3 * t) * std::cos(2.0 * kPi * 0.7 * t)).margin(1e-15));
  }

  SECTION("tones add") {
    SynthSpec spec;
    spec.count = 50;
    spec.tones = {{.amplitude = 0.3, .frequency = 1.1, .phase = 0.4, .damping = 0.05},
                  {.amplitude = 0.2, .frequency = 2.3, .phase = -1.0, .damping = -0.1}};
    const auto w = signalgen::generate(spec);
    for (std::size_t m = 0; m < w.size(); ++m) {
      const double t = static_cast<double>(m) * spec.dt;
      const double expected = 0.3 * std::exp(0.05 * t) * std::cos(2.0 * kPi * 1.1 * t + 0.4) +
                              0.2 * std::exp(-0.1 * t) * std::cos(2.0 * kPi * 2.3 * t - 1.0);
      REQUIRE(w.samples[m] == Approx(expected).margin(1e-14));
    }
  }

  SECTION("metadata is carried through") {
    SynthSpec spec;
    spec.count = 8;
    spec.station_id = "BUS7";
    spec.channel = Channel::ActivePower_MW;
    spec.t0_ms = 1234;
    const auto w = signalgen::generate(spec);
    REQUIRE(w.station_id == "BUS7");
    REQUIRE(w.channel == Channel::ActivePower_MW);
    REQUIRE(w.t0_ms == 1234);
  }
}

TEST_CASE("noise is seeded and calibrated", "[signalgen]") {
  SynthSpec spec;
  spec.count = 625;
  spec.tones = {{.amplitude = 0.1, .frequency = 0.52, .phase = 0.3, .damping = 0.05}};
  spec.noise_snr_db = 20.0;
  spec.rng_seed = 7;

  SECTION("equal seeds give bitwise-identical windows") {
    const auto a = signalgen::generate(spec);
    const auto b = signalgen::generate(spec);
    REQUIRE(std::memcmp(a.samples.data(), b.samples.data(), a.size() * sizeof(double)) == 0);
  }

  SECTION("different seeds differ") {
    auto other = spec;
    other.rng_seed = 8;
    REQUIRE(signalgen::generate(spec).samples != signalgen::generate(other).samples);
  }

  SECTION("empirical SNR within half a dB") {
    auto clean_spec = spec;
    clean_spec.noise_snr_db.reset();
    const auto clean = signalgen::generate(clean_spec);
    for (double snr : {0.0, 10.0, 20.0, 40.0}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        spec.noise_snr_db = snr;
        spec.rng_seed = seed;
        const auto noisy = signalgen::generate(spec);
        std::vector<double> noise(noisy.size());
        for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples[i] - clean.samples[i];
        const double measured = 10.0 * std::log10(power(clean.samples) / power(noise));
        REQUIRE(std::abs(measured - snr) <= 0.5);
      }
    }
  }

  SECTION("absolute noise level") {
    SynthSpec n;
    n.count = 20000;
    n.noise_rms = 0.5;
    n.rng_seed = 3;
    const auto w = signalgen::generate(n);
    REQUIRE(std::sqrt(power(w.samples)) == Approx(0.5).epsilon(0.03));
  }
}

TEST_CASE("malformed specs are rejected", "[signalgen]") {
  auto expect_invalid = [](const SynthSpec& s) {
    try {
      signalgen::generate(s);
      FAIL("no throw");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::InvalidSpec);
    }
  };
  SynthSpec ok;
  ok.count = 10;
  REQUIRE_NOTHROW(signalgen::generate(ok));

  auto s = ok;
  s.count = 3;
  expect_invalid(s);
  s = ok;
  s.dt = 0.0;
  expect_invalid(s);
  s = ok;
  s.tones = {{.amplitude = -1.0, .frequency = 1.0}};
  expect_invalid(s);
  s = ok;
  s.tones = {{.amplitude = 1.0, .frequency = -1.0}};
  expect_invalid(s);
  s = ok;
  s.noise_snr_db = 20.0;
  s.noise_rms = 0.1;
  expect_invalid(s);
}
