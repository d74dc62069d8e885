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

#include "rydpump/rfwave.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>

#include "rydpump/errors.hpp"
#include "rydpump/peaks.hpp"
#include "rydpump/units.hpp"

namespace rydpump {

Envelope constant_envelope(double value) {
  return [value](double) { return value; };
}

Envelope piecewise_linear_envelope(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size()) {
    throw InvalidInput("piecewise-linear envelope needs matching non-empty knots");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidInput("envelope knots must increase");
  }
  return [t = std::move(times), v = std::move(values)](double x) {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double u = (x - t[lo]) / (t[hi] - t[lo]);
    return v[lo] + u * (v[hi] - v[lo]);
  };
}

void ToneSchedule::validate() const {
  if (!(carrier_mhz > 0.0)) throw InvalidInput("tone carrier frequency must be > 0");
  if (!(alpha > 0.0)) throw InvalidInput("tone calibration alpha must be > 0");
  if (!rabi || !detuning) throw InvalidInput("tone envelopes must be set");
}

double required_programmed_amplitude(double omega, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be > 0");
  if (!(omega >= 0.0)) throw InvalidInput("Rabi frequency must be >= 0");
  return std::sqrt(omega / alpha);
}

double rabi_from_amplitude(double volts, double alpha) noexcept { return alpha * volts * volts; }

namespace {

constexpr std::size_t kEnvelopeScan = 1024;

double envelope_peak(const Envelope& f, double duration, bool absolute) {
  double best = 0.0;
  for (std::size_t k = 0; k <= kEnvelopeScan; ++k) {
    const double v = f(duration * static_cast<double>(k) / kEnvelopeScan);
    best = std::max(best, absolute ? std::abs(v) : v);
  }
  return best;
}

double tone_amplitude(const ToneSchedule& tone, double t) {
  const double omega = tone.rabi(t);
  if (omega < 0.0) throw InvalidInput("Rabi envelope went negative");
  return std::sqrt(omega / tone.alpha);
}

}  // namespace

WaveformBuffer synthesize_waveform(std::span<const ToneSchedule> tones, double duration,
                                   double sample_rate, int bits) {
  if (tones.empty()) throw InvalidInput("waveform needs at least one tone");
  if (!(duration > 0.0)) throw InvalidInput("waveform duration must be > 0");
  if (!(sample_rate > 0.0)) throw InvalidInput("sample rate must be > 0");
  if (bits < 2 || bits > 16) throw InvalidInput("bit depth must be within 2..16");
  double max_freq = 0.0;
  for (const ToneSchedule& tone : tones) {
    tone.validate();
    const double det = envelope_peak(tone.detuning, duration, true);
    max_freq = std::max(max_freq, 0.5 * tone.carrier_mhz + det / (2.0 * units::kTwoPi));
  }
  if (!(sample_rate > 4.0 * max_freq)) {
    throw InvalidInput("sample rate " + std::to_string(sample_rate) +
                       " /us aliases: needs more than 4x the highest programmed frequency (" +
                       std::to_string(max_freq) + " MHz)");
  }

  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  if (n == 0) throw InvalidInput("waveform has no samples");
  const double dt = 1.0 / sample_rate;
  std::vector<double> composite(n, 0.0);
  // Fixed tone order keeps the summation deterministic.
  for (const ToneSchedule& tone : tones) {
    const double carrier_half = 0.5 * tone.carrier_mhz;
    double detuning_phase = 0.0;
    double prev_det = tone.detuning(0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const double t = static_cast<double>(s) * dt;
      if (s > 0) {
        const double det = tone.detuning(t);
        // Programmed offset is half the field detuning.
        detuning_phase += 0.25 * (prev_det + det) * dt;
        prev_det = det;
      }
      const double carrier_phase = units::kTwoPi * std::fmod(carrier_half * t, 1.0);
      composite[s] +=
          tone_amplitude(tone, t) * std::cos(carrier_phase + detuning_phase + tone.initial_phase);
    }
  }

  double peak = 0.0;
  for (double v : composite) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw NumericalError("composite waveform is identically zero");

  WaveformBuffer buf;
  buf.sample_rate = sample_rate;
  buf.bits = bits;
  const int fs = buf.full_scale();
  buf.normalization = fs / peak;
  buf.codes.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const long code = std::lround(composite[s] * buf.normalization);
    buf.codes[s] = static_cast<std::int16_t>(std::clamp<long>(code, -fs - 1, fs));
  }
  return buf;
}

std::vector<double> relative_tone_amplitudes(std::span<const ToneSchedule> tones,
                                             const WaveformBuffer& buffer, double duration) {
  std::vector<double> out;
  out.reserve(tones.size());
  for (const ToneSchedule& tone : tones) {
    double peak = 0.0;
    for (std::size_t k = 0; k <= kEnvelopeScan; ++k) {
      peak = std::max(peak, tone_amplitude(tone, duration * static_cast<double>(k) / kEnvelopeScan));
    }
    out.push_back(peak * buffer.normalization / buffer.full_scale());
  }
  return out;
}

std::vector<ToneSchedule> tones_from_protocol(const ChainSpec& spec, const PumpProtocol& protocol,
                                              std::span<const double> carriers_mhz,
                                              std::span<const double> alphas, DeltaSign sign) {
  protocol.validate_allow_zero_coupling();
  const std::size_t bonds = spec.n_sites() - 1;
  if (carriers_mhz.size() != bonds || alphas.size() != bonds) {
    throw InvalidInput("need one carrier and one alpha per bond (" + std::to_string(bonds) + ")");
  }
  std::vector<ToneSchedule> tones;
  for (std::size_t b = 0; b < bonds; ++b) {
    const bool intra = spec.cell_of_site(b) == spec.cell_of_site(b + 1);
    ToneSchedule tone;
    tone.site_i = static_cast<int>(b + 1);
    tone.site_j = static_cast<int>(b + 2);
    tone.carrier_mhz = carriers_mhz[b];
    tone.alpha = alphas[b];
    tone.rabi = [protocol, intra](double t) {
      const ParameterPoint p = trajectory_at_phase(protocol, t / protocol.period);
      return 2.0 * (intra ? p.j1 : p.j2);
    };
    // eps_i - eps_{i+1}: +-2 delta depending on the sublattice of site i.
    const double parity = ((b % 2 == 0) == (sign == DeltaSign::kOddSitesPositive)) ? 1.0 : -1.0;
    tone.detuning = [protocol, parity](double t) {
      return parity * 2.0 * trajectory_at_phase(protocol, t / protocol.period).delta;
    };
    tones.push_back(std::move(tone));
  }
  return tones;
}

std::string to_string(SpectralLine::Kind kind) {
  switch (kind) {
    case SpectralLine::Kind::kDesired:
      return "desired";
    case SpectralLine::Kind::kSum:
      return "sum";
    case SpectralLine::Kind::kDifference:
      return "difference";
    case SpectralLine::Kind::kDc:
      return "dc";
  }
  return "unknown";
}

std::vector<SpectralLine> intermodulation_table(std::span<const ToneSchedule> tones,
                                                double duration) {
  std::vector<double> freq;
  std::vector<double> amp;
  for (const ToneSchedule& tone : tones) {
    tone.validate();
    freq.push_back(0.5 * tone.carrier_mhz);
    double peak = 0.0;
    for (std::size_t k = 0; k <= kEnvelopeScan; ++k) {
      peak = std::max(peak, tone_amplitude(tone, duration * static_cast<double>(k) / kEnvelopeScan));
    }
    amp.push_back(peak);
  }
  std::vector<SpectralLine> lines;
  double dc = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k) {
    dc += 0.5 * amp[k] * amp[k];
    lines.push_back({SpectralLine::Kind::kDesired, 2.0 * freq[k], 0.5 * amp[k] * amp[k],
                     static_cast<int>(k), static_cast<int>(k), 0.0});
  }
  for (std::size_t k = 0; k < freq.size(); ++k) {
    for (std::size_t l = k + 1; l < freq.size(); ++l) {
      const double a = amp[k] * amp[l];
      lines.push_back({SpectralLine::Kind::kSum, freq[k] + freq[l], a, static_cast<int>(k),
                       static_cast<int>(l), 0.0});
      lines.push_back({SpectralLine::Kind::kDifference, std::abs(freq[k] - freq[l]), a,
                       static_cast<int>(k), static_cast<int>(l), 0.0});
    }
  }
  lines.push_back({SpectralLine::Kind::kDc, 0.0, dc, -1, -1, 0.0});
  for (SpectralLine& line : lines) {
    double best = std::numeric_limits<double>::infinity();
    for (double f : freq) {
      const double off = line.frequency_mhz - 2.0 * f;
      if (std::abs(off) < std::abs(best)) best = off;
    }
    line.nearest_desired_offset_mhz = best;
  }
  return lines;
}

CalibrationFit fit_autler_townes(std::span<const CalibrationPoint> points) {
  if (points.empty()) throw InvalidInput("calibration needs data points");
  const bool all_equal = std::all_of(points.begin(), points.end(), [&](const CalibrationPoint& p) {
    return p.vpp == points.front().vpp;
  });
  if (all_equal) throw NumericalError("degenerate calibration design: all amplitudes are equal");
  if (points.size() < 3) throw InvalidInput("calibration needs at least 3 points");
  double sxx = 0.0;
  double sxy = 0.0;
  for (const CalibrationPoint& p : points) {
    if (p.vpp < 0.0 || p.splitting < 0.0) throw InvalidInput("calibration values must be >= 0");
    const double x = p.vpp * p.vpp;
    sxx += x * x;
    sxy += x * p.splitting;
  }
  if (sxx == 0.0) throw NumericalError("degenerate calibration design: all amplitudes are zero");
  CalibrationFit fit;
  fit.alpha = sxy / sxx;
  double rss = 0.0;
  for (const CalibrationPoint& p : points) {
    const double r = p.splitting - fit.alpha * p.vpp * p.vpp;
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

std::vector<double> simulate_autler_townes_spectrum(double omega, std::span<const double> probe,
                                                    double linewidth) {
  if (!(linewidth > 0.0)) throw InvalidInput("linewidth must be > 0");
  if (!(omega >= 0.0)) throw InvalidInput("Rabi frequency must be >= 0");
  std::vector<double> r(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double a = (probe[i] - 0.5 * omega) / linewidth;
    const double b = (probe[i] + 0.5 * omega) / linewidth;
    r[i] = 0.5 / (1.0 + a * a) + 0.5 / (1.0 + b * b);
  }
  return r;
}

double autler_townes_splitting(std::span<const double> probe, std::span<const double> response) {
  std::vector<Peak> peaks = find_peaks(probe, response, 0.05);
  if (peaks.size() < 2) return 0.0;
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return std::abs(peaks[0].position - peaks[1].position);
}

namespace {

constexpr std::array<char, 4> kMagic = {'R', 'P', 'W', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> raw{};
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.write(reinterpret_cast<const char*>(raw.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> raw{};
  in.read(reinterpret_cast<char*>(raw.data()), sizeof(T));
  if (!in) throw InvalidInput("truncated waveform file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

}  // namespace

// Layout: "RPWF", u32 version, f64 rate (samples/us), u32 bits, u32 reserved,
// u64 length, then int16 codes. All little endian.
void write_waveform_binary(const WaveformBuffer& buffer, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<double>(out, buffer.sample_rate);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(buffer.bits));
  put_le<std::uint32_t>(out, 0);
  put_le<std::uint64_t>(out, buffer.codes.size());
  for (std::int16_t c : buffer.codes) put_le<std::int16_t>(out, c);
}

WaveformBuffer read_waveform_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidInput("not a waveform file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw InvalidInput("unsupported waveform version " + std::to_string(version));
  WaveformBuffer buf;
  buf.sample_rate = get_le<double>(in);
  buf.bits = static_cast<int>(get_le<std::uint32_t>(in));
  (void)get_le<std::uint32_t>(in);
  const auto length = get_le<std::uint64_t>(in);
  buf.codes.resize(length);
  for (auto& c : buf.codes) c = get_le<std::int16_t>(in);
  buf.normalization = 0.0;
  return buf;
}

void write_waveform_csv(const WaveformBuffer& buffer, std::ostream& out) {
  out << "# sample_rate_per_us," << buffer.sample_rate << "\n# bits," << buffer.bits << "\n";
  out << "index,time_us,code\n";
  for (std::size_t i = 0; i < buffer.codes.size(); ++i) {
    out << i << ',' << static_cast<double>(i) / buffer.sample_rate << ',' << buffer.codes[i] << '\n';
  }
}

}  // namespace rydpump
