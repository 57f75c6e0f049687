#pragma once

// Time-varying multipath channels built from power-delay profiles, and the
// composition y[n] = s[n] + r[n] + w[n].
//
// Convention: a tap vector c acts on a signal as s[n] = c^H i[n], i.e. the
// impulse response is conj(c).

#include <filesystem>
#include <span>
#include <vector>

#include "uwfd/random.hpp"
#include "uwfd/types.hpp"

namespace uwfd {

struct PdpSpec {
  std::vector<double> profile;  // linear per-tap power at symbol spacing
  std::vector<bool> static_mask;
  double target_power_db = 0.0;

  std::size_t length() const { return profile.size(); }
  double total_power() const;
  void validate() const;
};

/// Shape of the shipped two-cluster SI profile. The numbers approximate a
/// lake-measured SI response: a stable direct path at tap 0 and a
/// surface-reflection cluster near the middle of the window.
struct SiProfileShape {
  static constexpr double kDirectPower = 1.0;
  static constexpr double kSecondaryRatio = 0.1;       // cluster peak / direct (-10 dB)
  static constexpr double kSkirtDbPerTap = 3.0;        // cluster decay each side
  static constexpr double kFloorRatio = 1e-3;          // diffuse floor (-30 dB)
};

PdpSpec si_pdp_default(int taps = 30);

/// profile[k] = exp(-decay * k), all taps time-varying.
PdpSpec remote_pdp(int taps = 70, double decay = 0.25);

/// Rescales so sum(profile) = 10^((signal_db - input_db)/10).
PdpSpec scale_pdp(const PdpSpec& pdp, double signal_power_db, double input_power_db);

/// Reads "tap_index power_linear static_flag" triples, one per line. Blank
/// lines and '#' comments are ignored. Indices must cover 0..N-1 exactly once.
PdpSpec load_pdp_file(const std::filesystem::path& path);

/// Row-major N x taps matrix of per-symbol tap vectors.
class TapTrajectory {
 public:
  TapTrajectory() = default;
  TapTrajectory(std::size_t n_symbols, std::size_t n_taps, PdpSpec pdp, double coherence_symbols);

  std::size_t size() const { return n_symbols_; }
  std::size_t taps() const { return n_taps_; }
  std::span<const cdouble> at(std::size_t n) const {
    return {data_.data() + n * n_taps_, n_taps_};
  }
  std::span<cdouble> at(std::size_t n) { return {data_.data() + n * n_taps_, n_taps_}; }
  cdouble tap(std::size_t n, std::size_t k) const { return data_[n * n_taps_ + k]; }

  const PdpSpec& pdp() const { return pdp_; }
  double coherence_symbols() const { return coherence_symbols_; }

 private:
  std::size_t n_symbols_ = 0;
  std::size_t n_taps_ = 0;
  std::vector<cdouble> data_;
  PdpSpec pdp_;
  double coherence_symbols_ = 0.0;
};

/// Per-step correlation of the AR(1) tap process whose autocorrelation
/// falls to 1/e after coherence_symbols steps.
double gauss_markov_coefficient(double coherence_symbols);

/// Non-static taps follow tap[n] = a tap[n-1] + sqrt(1-a^2) g[n] started
/// from the stationary law; static taps get magnitude sqrt(profile) and a
/// uniformly random phase, held fixed.
TapTrajectory gen_tap_trajectory(const PdpSpec& pdp, double coherence_ms, std::size_t n_symbols,
                                 double symbol_rate_hz, Rng& rng);

/// out[n] = sum_k conj(taps[n][k]) x[n-k], with x[m] = 0 for m < 0.
CVec apply_channel(std::span<const cdouble> x, const TapTrajectory& trajectory);

struct NoiseSpec {
  double ambient_power_db = -35.0;
};

struct ReceivedSignal {
  CVec y;  // s + r + w
  CVec s;  // self-interference
  CVec r;  // remote
  CVec w;  // ambient noise
};

ReceivedSignal synthesize_received(std::span<const cdouble> local_ref,
                                   std::span<const cdouble> remote_symbols,
                                   const TapTrajectory& si, const TapTrajectory& remote,
                                   const NoiseSpec& noise, Rng& rng);

}  // namespace uwfd
