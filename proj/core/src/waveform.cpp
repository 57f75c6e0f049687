#include "uwfd/waveform.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace uwfd {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

void FrontEndConfig::validate() const {
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must lie in [0, 1]");
  require(filter_span_symbols >= 2 && filter_span_symbols % 2 == 0,
          "filter_span_symbols must be even and >= 2");
  require(samples_per_symbol >= 2, "samples_per_symbol must be >= 2");
  const double highest = 5.0 * carrier_hz + bandwidth_hz * (1.0 + rolloff) / 2.0;
  require(sample_rate_hz() > 2.0 * highest,
          "samples_per_symbol too small: fifth PA harmonic would alias");
  require(carrier_hz > bandwidth_hz * (1.0 + rolloff) / 2.0,
          "carrier_hz must exceed half the occupied bandwidth");
}

ComplexSeq modulate_bpsk(std::span<const std::uint8_t> bits, double symbol_rate_hz) {
  ComplexSeq out;
  out.rate_hz = symbol_rate_hz;
  out.domain = Domain::SymbolRateComplex;
  out.samples.reserve(bits.size());
  for (auto b : bits) {
    if (b > 1) throw InvalidArgument("modulate_bpsk: bits must be 0 or 1");
    out.samples.emplace_back(b == 0 ? 1.0 : -1.0, 0.0);
  }
  return out;
}

std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
  require(rolloff >= 0.0 && rolloff <= 1.0, "rrc_taps: rolloff must lie in [0, 1]");
  require(span_symbols >= 1 && sps >= 1, "rrc_taps: span and sps must be positive");
  const int n_taps = span_symbols * sps + 1;
  const int centre = n_taps / 2;
  const double a = rolloff;
  std::vector<double> taps(static_cast<std::size_t>(n_taps));
  for (int k = 0; k < n_taps; ++k) {
    // Mirror so the two halves are bit-identical.
    const int offset = std::abs(k - centre);
    const double t = static_cast<double>(offset) / sps;  // in symbol periods
    double v;
    if (offset == 0) {
      v = 1.0 - a + 4.0 * a / kPi;
    } else if (a > 0.0 && std::abs(std::abs(4.0 * a * t) - 1.0) < 1e-12) {
      v = a / std::sqrt(2.0) *
          ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * a)) +
           (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * a)));
    } else {
      const double num =
          std::sin(kPi * t * (1.0 - a)) + 4.0 * a * t * std::cos(kPi * t * (1.0 + a));
      const double den = kPi * t * (1.0 - (4.0 * a * t) * (4.0 * a * t));
      v = num / den;
    }
    taps[static_cast<std::size_t>(k)] = v;
  }
  double energy = 0.0;
  for (double v : taps) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : taps) v *= scale;
  return taps;
}

RealSeq pulse_shape_upconvert(const ComplexSeq& symbols, const FrontEndConfig& cfg) {
  cfg.validate();
  require(symbols.domain == Domain::SymbolRateComplex,
          "pulse_shape_upconvert: input must be symbol-rate");
  const int sps = cfg.samples_per_symbol;
  const auto taps = rrc_taps(cfg.rolloff, cfg.filter_span_symbols, sps);
  const int half = cfg.group_delay_samples();
  const double gain = std::sqrt(static_cast<double>(sps));
  const double w = 2.0 * kPi * cfg.carrier_hz / cfg.sample_rate_hz();

  const std::size_t n_sym = symbols.size();
  RealSeq out;
  out.rate_hz = cfg.sample_rate_hz();
  if (n_sym == 0) return out;
  out.samples.assign(n_sym * static_cast<std::size_t>(sps) + 2 * static_cast<std::size_t>(half),
                     0.0);

  // Sample j lies at offset k = j - half from the centre of symbol 0, and
  // sees the symbols m with |k - m*sps| <= half (polyphase form).
  const auto n_out = static_cast<long>(out.samples.size());
  for (long j = 0; j < n_out; ++j) {
    const long k = j - half;
    const long m_lo = k - half <= 0 ? 0L : (k - half + sps - 1) / sps;
    const long m_hi = std::min(static_cast<long>(n_sym) - 1, (k + half) / sps);
    cdouble acc{0.0, 0.0};
    for (long m = m_lo; m <= m_hi; ++m) {
      acc += symbols.samples[static_cast<std::size_t>(m)] *
             taps[static_cast<std::size_t>(k - m * sps + half)];
    }
    const double phase = w * static_cast<double>(j);
    out.samples[static_cast<std::size_t>(j)] =
        gain * (acc.real() * std::cos(phase) - acc.imag() * std::sin(phase));
  }
  return out;
}

RealSeq pa_apply(const RealSeq& passband, const FrontEndConfig& cfg, Rng& rng) {
  require(passband.domain == Domain::PassbandReal, "pa_apply: input must be passband-real");
  const auto& c = cfg.pa;
  const double noise_power =
      std::isfinite(cfg.pa_noise_power_db) ? db_to_linear(cfg.pa_noise_power_db) : 0.0;
  RealSeq out;
  out.rate_hz = passband.rate_hz;
  out.samples.resize(passband.size());
  for (std::size_t k = 0; k < passband.size(); ++k) {
    const double p = passband.samples[k];
    const double p2 = p * p;
    double q = p * (c.a1 + p2 * (c.a3 + p2 * c.a5));
    if (noise_power > 0.0) q += real_gaussian(rng, noise_power);
    out.samples[k] = q;
  }
  return out;
}

ComplexSeq downconvert_matched_downsample(const RealSeq& passband, const FrontEndConfig& cfg) {
  cfg.validate();
  require(passband.domain == Domain::PassbandReal,
          "downconvert_matched_downsample: input must be passband-real");
  require(std::abs(passband.rate_hz - cfg.sample_rate_hz()) <= 1e-9 * cfg.sample_rate_hz(),
          "downconvert_matched_downsample: sample rate does not match sps * bandwidth");
  const int sps = cfg.samples_per_symbol;
  const long half = cfg.group_delay_samples();
  if (passband.size() == 0) {
    ComplexSeq empty;
    empty.rate_hz = cfg.bandwidth_hz;
    return empty;
  }
  require(passband.size() >= static_cast<std::size_t>(2 * half) &&
              (passband.size() - static_cast<std::size_t>(2 * half)) %
                      static_cast<std::size_t>(sps) == 0,
          "downconvert_matched_downsample: length must be n*sps + span*sps");
  const auto taps = rrc_taps(cfg.rolloff, cfg.filter_span_symbols, sps);
  const double w = 2.0 * kPi * cfg.carrier_hz / cfg.sample_rate_hz();
  // 2 undoes the cos mixing loss, 1/sqrt(sps) undoes the shaping gain.
  const double gain = 2.0 / std::sqrt(static_cast<double>(sps));

  const auto n_in = static_cast<long>(passband.size());
  const std::size_t n_sym =
      (passband.size() - static_cast<std::size_t>(2 * half)) / static_cast<std::size_t>(sps);
  ComplexSeq out;
  out.rate_hz = cfg.bandwidth_hz;
  out.domain = Domain::SymbolRateComplex;
  out.samples.resize(n_sym);
  CVec mixed(passband.size());
  for (long k = 0; k < n_in; ++k) {
    const double phase = w * static_cast<double>(k);
    const double s = passband.samples[static_cast<std::size_t>(k)];
    mixed[static_cast<std::size_t>(k)] = cdouble(s * std::cos(phase), -s * std::sin(phase));
  }
  for (std::size_t m = 0; m < n_sym; ++m) {
    const long centre = half + static_cast<long>(m) * sps;
    cdouble acc{0.0, 0.0};
    for (long k = centre - half; k <= centre + half; ++k) {
      acc += mixed[static_cast<std::size_t>(k)] * taps[static_cast<std::size_t>(k - centre + half)];
    }
    out.samples[m] = gain * acc;
  }
  return out;
}

double mean_power(std::span<const cdouble> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc / static_cast<double>(x.size());
}

ComplexSeq normalize_power(const ComplexSeq& seq, double target_db) {
  const double p = mean_power(seq.samples);
  if (!(p > 0.0)) throw InvalidArgument("normalize_power: input has zero power");
  const double scale = std::sqrt(db_to_linear(target_db) / p);
  ComplexSeq out = seq;
  for (auto& v : out.samples) v *= scale;
  return out;
}

ComplexSeq make_local_reference(std::span<const std::uint8_t> bits, const FrontEndConfig& cfg,
                                Rng& rng) {
  cfg.validate();
  const auto symbols = modulate_bpsk(bits, cfg.bandwidth_hz);
  const auto passband = pulse_shape_upconvert(symbols, cfg);
  const auto amplified = pa_apply(passband, cfg, rng);
  const auto baseband = downconvert_matched_downsample(amplified, cfg);
  return normalize_power(baseband, cfg.local_ref_power_db);
}

}  // namespace uwfd
