// Copyright 2026 The rydpump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "rydpump/defaults.hpp"
#include "rydpump/errors.hpp"
#include "rydpump/rfwave.hpp"
#include "rydpump/units.hpp"

namespace rydpump {
namespace {

using units::from_mhz;
using units::kTwoPi;

ToneSchedule constant_tone(double carrier_mhz, double omega, double alpha = 1.0) {
  ToneSchedule t;
  t.carrier_mhz = carrier_mhz;
  t.rabi = constant_envelope(omega);
  t.detuning = constant_envelope(0.0);
  t.alpha = alpha;
  return t;
}

// Power in the +-k bins over the power in every other non-DC bin.
double snr_db(const std::vector<std::int16_t>& codes, std::size_t k) {
  const std::size_t n = codes.size();
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t b = 1; b < n; ++b) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t s = 0; s < n; ++s) {
      acc += static_cast<double>(codes[s]) *
             std::polar(1.0, -kTwoPi * static_cast<double>((b * s) % n) / static_cast<double>(n));
    }
    const double p = std::norm(acc);
    (b == k || b == n - k ? signal : noise) += p;
  }
  return 10.0 * std::log10(signal / noise);
}

TEST(Doubler, AmplitudeLaw) {
  EXPECT_EQ(required_programmed_amplitude(0.0, 2.0), 0.0);
  const double v = required_programmed_amplitude(3.0, 0.7);
  EXPECT_NEAR(required_programmed_amplitude(12.0, 0.7), 2.0 * v, 1e-15);
  for (double omega : {0.1, 5.0, 80.0}) {
    EXPECT_NEAR(rabi_from_amplitude(required_programmed_amplitude(omega, 0.3), 0.3), omega,
                1e-12 * omega);
  }
  EXPECT_THROW(required_programmed_amplitude(1.0, 0.0), InvalidInput);
  EXPECT_THROW(required_programmed_amplitude(-1.0, 1.0), InvalidInput);
}

TEST(Waveform, SingleToneQuantizationSnr) {
  // 4096 samples with the programmed frequency on bin 401.
  const double rate = 4096.0;
  ToneSchedule tone = constant_tone(2.0 * 401.0, 1.0);
  tone.initial_phase = 0.3;
  const WaveformBuffer buf = synthesize_waveform(std::vector{tone}, 1.0, rate, 10);
  ASSERT_EQ(buf.codes.size(), 4096u);
  const double ideal = 6.02 * 10 + 1.76;
  EXPECT_NEAR(snr_db(buf.codes, 401), ideal, 1.0);
}

TEST(Waveform, NormalizedToFullScale) {
  std::vector<ToneSchedule> tones{constant_tone(24047.3, from_mhz(2.0), 0.5),
                                  constant_tone(24271.1, from_mhz(1.0), 0.9)};
  tones[1].initial_phase = 1.1;
  for (int bits : {8, 10, 12}) {
    const WaveformBuffer buf = synthesize_waveform(tones, 0.2, 50000.0, bits);
    EXPECT_EQ(buf.codes.size(), 10000u);
    int peak = 0;
    for (std::int16_t c : buf.codes) peak = std::max(peak, std::abs(static_cast<int>(c)));
    EXPECT_EQ(peak, buf.full_scale());
    EXPECT_EQ(buf.full_scale(), (1 << (bits - 1)) - 1);
  }
}

TEST(Waveform, EqualTonesGetEqualAmplitudes) {
  const std::vector<ToneSchedule> tones{constant_tone(24047.3, from_mhz(2.0), 0.4),
                                        constant_tone(22691.5, from_mhz(2.0), 0.4)};
  const WaveformBuffer buf = synthesize_waveform(tones, 0.1, 50000.0);
  const auto rel = relative_tone_amplitudes(tones, buf, 0.1);
  EXPECT_DOUBLE_EQ(rel[0], rel[1]);
  EXPECT_NEAR(rel[0], 0.5, 1e-12);
}

TEST(Waveform, FiveToneRelativeAmplitudes) {
  const std::vector<double> target{0.27, 0.18, 0.22, 0.18, 0.15};
  const double omega = from_mhz(3.0);
  std::vector<ToneSchedule> tones;
  for (std::size_t k = 0; k < 5; ++k) {
    // alpha back-solved so that sqrt(omega / alpha) = target fraction (volts).
    tones.push_back(constant_tone(defaults::kCarrierMhz[k], omega, omega / (target[k] * target[k])));
    tones.back().site_i = static_cast<int>(k + 1);
    tones.back().site_j = static_cast<int>(k + 2);
  }
  const WaveformBuffer buf = synthesize_waveform(tones, 0.5, 50000.0, 10);
  const auto rel = relative_tone_amplitudes(tones, buf, 0.5);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(rel[k], target[k], 0.005) << k;
}

TEST(Waveform, PhaseContinuousAcrossEnvelopeSteps) {
  const double rate = 50000.0;
  const double f = 400.0;
  const double t0 = 0.05;
  const double det = from_mhz(6.0);
  ToneSchedule tone;
  tone.carrier_mhz = f;
  tone.rabi = [t0](double t) { return t < t0 ? 1.0 : 4.0; };
  tone.detuning = [t0, det](double t) { return t < t0 ? 0.0 : det; };
  const WaveformBuffer buf = synthesize_waveform(std::vector{tone}, 0.1, rate, 12);
  const double dt = 1.0 / rate;
  int worst = 0;
  for (std::size_t s = 0; s < buf.codes.size(); ++s) {
    const double t = static_cast<double>(s) * dt;
    // Programmed field offset is detuning / 2, integrated from the step.
    const double phase = kTwoPi * 0.5 * f * t + 0.5 * det * std::max(0.0, t - t0);
    const double amp = t < t0 ? 1.0 : 2.0;
    const long expect = std::lround(amp * std::cos(phase) * buf.normalization);
    worst = std::max(worst, static_cast<int>(std::abs(expect - buf.codes[s])));
  }
  EXPECT_LE(worst, 2);
}

TEST(Waveform, Errors) {
  const ToneSchedule tone = constant_tone(24047.3, 1.0);
  EXPECT_THROW(synthesize_waveform(std::vector<ToneSchedule>{}, 1.0, 50000.0), InvalidInput);
  EXPECT_THROW(synthesize_waveform(std::vector{tone}, 1.0, 40000.0), InvalidInput);
  EXPECT_THROW(synthesize_waveform(std::vector{constant_tone(24047.3, 0.0)}, 0.1, 50000.0),
               NumericalError);
  ToneSchedule bad = tone;
  bad.alpha = 0.0;
  EXPECT_THROW(synthesize_waveform(std::vector{bad}, 0.1, 50000.0), InvalidInput);
  bad = tone;
  bad.carrier_mhz = -1.0;
  EXPECT_THROW(synthesize_waveform(std::vector{bad}, 0.1, 50000.0), InvalidInput);
}

TEST(Waveform, BinaryRoundTrip) {
  const WaveformBuffer buf =
      synthesize_waveform(std::vector{constant_tone(24047.3, 2.0)}, 0.05, 50000.0, 10);
  std::stringstream io;
  write_waveform_binary(buf, io);
  EXPECT_EQ(io.str().size(), 32u + 2u * buf.codes.size());
  EXPECT_EQ(io.str().substr(0, 4), "RPWF");
  const WaveformBuffer back = read_waveform_binary(io);
  EXPECT_EQ(back.codes, buf.codes);
  EXPECT_EQ(back.bits, 10);
  EXPECT_EQ(back.sample_rate, 50000.0);
  std::stringstream junk("nope");
  EXPECT_THROW(read_waveform_binary(junk), InvalidInput);
  std::ostringstream csv;
  write_waveform_csv(buf, csv);
  EXPECT_NE(csv.str().find("\nindex,time_us,code\n"), std::string::npos);
}

TEST(Waveform, ProtocolTones) {
  const ChainSpec c = ChainSpec::dimerized(6);
  PumpProtocol p;
  p.j_max = from_mhz(1.5);
  p.delta0 = from_mhz(7.0);
  p.period = 1.0;
  const std::vector<double> carriers(defaults::kCarrierMhz.begin(), defaults::kCarrierMhz.end());
  const std::vector<double> alphas(5, 1.0);
  const auto tones = tones_from_protocol(c, p, carriers, alphas);
  ASSERT_EQ(tones.size(), 5u);
  EXPECT_NEAR(tones[0].rabi(0.0), 2.0 * p.j_max, 1e-12);
  EXPECT_NEAR(tones[1].rabi(0.0), 0.0, 1e-12);
  EXPECT_NEAR(tones[1].rabi(0.5), 2.0 * p.j_max, 1e-12);
  EXPECT_NEAR(tones[0].detuning(0.25), 2.0 * p.delta0, 1e-9);
  EXPECT_NEAR(tones[1].detuning(0.25), -2.0 * p.delta0, 1e-9);
  EXPECT_THROW(tones_from_protocol(c, p, std::span(carriers).first(4), alphas), InvalidInput);
}

TEST(Intermodulation, LinesOfTheSquaredComposite) {
  const std::vector<ToneSchedule> tones{constant_tone(100.0, 4.0), constant_tone(120.0, 1.0)};
  const auto lines = intermodulation_table(tones, 1.0);
  int desired = 0;
  for (const SpectralLine& l : lines) {
    if (l.kind == SpectralLine::Kind::kDesired) {
      ++desired;
      EXPECT_TRUE(l.frequency_mhz == 100.0 || l.frequency_mhz == 120.0);
    }
    if (l.kind == SpectralLine::Kind::kSum) {
      EXPECT_DOUBLE_EQ(l.frequency_mhz, 110.0);
    }
    if (l.kind == SpectralLine::Kind::kDifference) {
      EXPECT_DOUBLE_EQ(l.frequency_mhz, 10.0);
      EXPECT_DOUBLE_EQ(l.amplitude, 2.0);  // 2 V * 1 V
    }
  }
  EXPECT_EQ(desired, 2);
}

TEST(AutlerTownes, ExactFit) {
  std::vector<CalibrationPoint> pts;
  for (double v : {0.2, 0.5, 0.9, 1.3}) pts.push_back({v, 0.5 * v * v});
  const CalibrationFit fit = fit_autler_townes(pts);
  EXPECT_NEAR(fit.alpha, 0.5, 1e-12);
  EXPECT_NEAR(fit.residual_norm, 0.0, 1e-12);
}

TEST(AutlerTownes, NoisyFitWithinFivePercent) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double alpha = from_mhz(4.0);
  int good = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<CalibrationPoint> pts;
    for (int k = 1; k <= 10; ++k) {
      const double v = 0.15 * k;
      pts.push_back({v, std::max(0.0, alpha * v * v * (1.0 + noise(rng)))});
    }
    const double fitted = fit_autler_townes(pts).alpha;
    if (std::abs(fitted - alpha) <= 0.05 * alpha) ++good;
  }
  EXPECT_GE(good, static_cast<int>(0.95 * trials));
}

TEST(AutlerTownes, CalibrationRoundTrip) {
  const double true_alpha = 1.7;
  std::vector<CalibrationPoint> pts;
  for (double v : {0.3, 0.6, 1.2}) pts.push_back({v, true_alpha * v * v});
  const double alpha = fit_autler_townes(pts).alpha;
  for (double omega : {from_mhz(1.0), from_mhz(8.5)}) {
    EXPECT_NEAR(rabi_from_amplitude(required_programmed_amplitude(omega, alpha), true_alpha), omega,
                1e-9);
  }
}

TEST(AutlerTownes, DegenerateDesigns) {
  EXPECT_THROW(fit_autler_townes(std::vector<CalibrationPoint>{{1.0, 0.5}, {1.0, 0.5}}),
               NumericalError);
  EXPECT_THROW(fit_autler_townes(std::vector<CalibrationPoint>{{1.0, 0.5}, {1.0, 0.6}, {1.0, 0.4}}),
               NumericalError);
  EXPECT_THROW(fit_autler_townes(std::vector<CalibrationPoint>{{1.0, 0.5}, {2.0, 2.0}}),
               InvalidInput);
  EXPECT_THROW(fit_autler_townes(std::vector<CalibrationPoint>{}), InvalidInput);
}

TEST(AutlerTownes, SplittingRoundTrip) {
  std::vector<double> probe;
  for (int k = -4000; k <= 4000; ++k) probe.push_back(from_mhz(10.0) * k / 1000.0);
  const double lw = from_mhz(0.5);
  const double omega = from_mhz(10.0);
  const auto doublet = simulate_autler_townes_spectrum(omega, probe, lw);
  EXPECT_NEAR(autler_townes_splitting(probe, doublet), omega, lw / 10.0);
  const auto single = simulate_autler_townes_spectrum(0.0, probe, lw);
  EXPECT_EQ(autler_townes_splitting(probe, single), 0.0);
  EXPECT_NEAR(*std::max_element(single.begin(), single.end()), 1.0, 1e-12);
}

}  // namespace
}  // namespace rydpump
