#pragma once

// Local transmit chain and receiver front end: BPSK mapping, root-raised-cosine
// shaping, passband conversion, odd-order polynomial PA and the matched-filter
// path that produces the local reference i[n].

#include <limits>
#include <span>
#include <vector>

#include "uwfd/random.hpp"
#include "uwfd/types.hpp"

namespace uwfd {

enum class Domain { PassbandReal, BasebandComplex, SymbolRateComplex };

struct PaCoefficients {
  double a1 = 100.0;
  double a3 = 5.0;
  double a5 = 10.0;
};

struct FrontEndConfig {
  double bandwidth_hz = 5000.0;  // symbol rate equals bandwidth
  double carrier_hz = 12000.0;
  double rolloff = 0.5;
  int filter_span_symbols = 12;
  int samples_per_symbol = 32;
  PaCoefficients pa;
  double pa_noise_power_db = 10.0;  // absolute passband sample power; -inf disables
  double local_ref_power_db = 0.0;
  double remote_symbol_power_db = 0.0;

  double sample_rate_hz() const { return bandwidth_hz * samples_per_symbol; }
  /// Number of samples each filter delays its input by: span * sps / 2.
  int group_delay_samples() const { return filter_span_symbols * samples_per_symbol / 2; }

  /// Throws InvalidArgument naming the offending field. Also enforces that
  /// the fifth PA harmonic plus half the occupied bandwidth stays below Nyquist.
  void validate() const;
};

/// Complex sequence; symbol-rate or oversampled baseband.
struct ComplexSeq {
  CVec samples;
  double rate_hz = 0.0;
  Domain domain = Domain::SymbolRateComplex;

  std::size_t size() const { return samples.size(); }
};

struct RealSeq {
  std::vector<double> samples;
  double rate_hz = 0.0;
  Domain domain = Domain::PassbandReal;

  std::size_t size() const { return samples.size(); }
};

/// 0 -> +1, 1 -> -1.
ComplexSeq modulate_bpsk(std::span<const std::uint8_t> bits, double symbol_rate_hz = 5000.0);

/// span*sps + 1 symmetric taps with unit energy.
std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps);

/// Shapes symbols with the RRC pulse (scaled so a unit-power symbol stream
/// gives a unit-power baseband waveform) and mixes onto cos(2 pi f_c t).
/// The output keeps the full pulse support: group_delay_samples() lead-in,
/// n*sps samples, then the same tail. Sample group_delay + k*sps is the
/// centre of symbol k's pulse.
RealSeq pulse_shape_upconvert(const ComplexSeq& symbols, const FrontEndConfig& cfg);

/// q = a1 p + a3 p^3 + a5 p^5 + w_PA.
RealSeq pa_apply(const RealSeq& passband, const FrontEndConfig& cfg, Rng& rng);

/// Mixes down with exp(-j 2 pi f_c t), applies the matched RRC filter and
/// keeps every sps-th sample so that output n lines up with symbol n. Input
/// length must be n*sps + 2*group_delay_samples().
/// Exact inverse of pulse_shape_upconvert up to RRC truncation residue.
ComplexSeq downconvert_matched_downsample(const RealSeq& passband, const FrontEndConfig& cfg);

/// Rescales so the sample-mean power is 10^(target_db/10).
ComplexSeq normalize_power(const ComplexSeq& seq, double target_db);

double mean_power(std::span<const cdouble> x);

/// bits -> BPSK -> shaping/upconversion -> PA (+noise) -> matched-filter
/// downconversion -> power normalisation to P_i. One output per input bit.
ComplexSeq make_local_reference(std::span<const std::uint8_t> bits, const FrontEndConfig& cfg,
                                Rng& rng);

}  // namespace uwfd
