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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rydpump/chain.hpp"
#include "rydpump/protocol.hpp"

namespace rydpump {

using Envelope = std::function<double(double)>;

Envelope constant_envelope(double value);
// Linear interpolation between knots, held constant outside them.
Envelope piecewise_linear_envelope(std::vector<double> times, std::vector<double> values);

// One rf field driving the transition between sites i and j. The carrier is
// the atomic transition frequency in MHz; Rabi and detuning envelopes are in
// rad/us; alpha maps programmed volts^2 to Rabi frequency.
struct ToneSchedule {
  int site_i = 1;
  int site_j = 2;
  double carrier_mhz = 0.0;
  Envelope rabi;
  Envelope detuning;
  double alpha = 1.0;
  double initial_phase = 0.0;

  void validate() const;
};

struct WaveformBuffer {
  double sample_rate = 0.0;  // samples per us
  int bits = 10;
  std::vector<std::int16_t> codes;
  // Code per programmed volt: code = round(sample_volts * normalization).
  double normalization = 0.0;

  int full_scale() const noexcept { return (1 << (bits - 1)) - 1; }
  // Programmed volts corresponding to a full-scale code.
  double full_scale_volts() const noexcept { return full_scale() / normalization; }
};

// Programmed amplitude sqrt(omega / alpha) behind the frequency doubler.
double required_programmed_amplitude(double omega, double alpha);

// Doubler output Rabi frequency for a programmed amplitude: alpha * v^2.
double rabi_from_amplitude(double volts, double alpha) noexcept;

// Sum of tones programmed at half their field frequency, phase continuous,
// scaled so the largest sample is full scale and rounded to `bits`.
WaveformBuffer synthesize_waveform(std::span<const ToneSchedule> tones, double duration,
                                   double sample_rate, int bits = 10);

// Peak amplitude of each tone as a fraction of full scale.
std::vector<double> relative_tone_amplitudes(std::span<const ToneSchedule> tones,
                                             const WaveformBuffer& buffer, double duration);

// One tone per bond of the chain: Rabi 2 J(t), detuning eps_i - eps_j from the
// protocol's on-site energies. carriers_mhz and alphas take one entry per bond.
std::vector<ToneSchedule> tones_from_protocol(const ChainSpec& spec, const PumpProtocol& protocol,
                                              std::span<const double> carriers_mhz,
                                              std::span<const double> alphas,
                                              DeltaSign sign = DeltaSign::kOddSitesPositive);

// Products of the squared composite: desired 2f lines, sum and difference terms.
struct SpectralLine {
  enum class Kind { kDesired, kSum, kDifference, kDc };
  Kind kind = Kind::kDesired;
  double frequency_mhz = 0.0;
  double amplitude = 0.0;
  int tone_a = -1;
  int tone_b = -1;
  double nearest_desired_offset_mhz = 0.0;
};

std::string to_string(SpectralLine::Kind kind);

// Lines for the peak programmed amplitudes over [0, duration].
std::vector<SpectralLine> intermodulation_table(std::span<const ToneSchedule> tones,
                                                double duration);

struct CalibrationPoint {
  double vpp = 0.0;        // volts
  double splitting = 0.0;  // rad/us
};

struct CalibrationFit {
  double alpha = 0.0;
  double residual_norm = 0.0;
};

// Least squares of splitting = alpha * vpp^2.
CalibrationFit fit_autler_townes(std::span<const CalibrationPoint> points);

// Doublet of HWHM-`linewidth` Lorentzians at +-omega / 2, each of height 1/2.
std::vector<double> simulate_autler_townes_spectrum(double omega, std::span<const double> probe,
                                                    double linewidth);

// Separation of the two strongest peaks, 0 if only one is present.
double autler_townes_splitting(std::span<const double> probe, std::span<const double> response);

void write_waveform_binary(const WaveformBuffer& buffer, std::ostream& out);
WaveformBuffer read_waveform_binary(std::istream& in);
void write_waveform_csv(const WaveformBuffer& buffer, std::ostream& out);

}  // namespace rydpump
