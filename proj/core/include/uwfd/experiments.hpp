#pragma once

// Monte Carlo harness: builds one link realization per (seed, point, trial),
// runs the requested receivers on it and reduces to the reported metrics.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwfd/channel.hpp"
#include "uwfd/metrics.hpp"
#include "uwfd/receiver.hpp"
#include "uwfd/waveform.hpp"

namespace uwfd {

enum class SweepAxis { None, Snr, SiPower };

std::string_view to_string(SweepAxis axis);

struct ExperimentConfig {
  FrontEndConfig front_end;

  int si_taps = 30;
  double si_coherence_ms = 70.0;
  std::string si_pdp_file;  // empty: shipped two-cluster default
  int remote_taps = 70;
  double remote_decay = 0.25;
  double remote_coherence_ms = 70.0;
  std::string remote_pdp_file;

  double ps_db = 0.0;
  double pr_db = -20.0;
  double noise_db = -35.0;

  double lambda = 0.98;
  double delta = 1e-4;
  double mu = 1e-3;
  int ff_length = 70;
  int fb_length = 50;
  int training_symbols = 130;
  int dfe_redesign_interval = 1;

  std::size_t symbols = 200000;
  int trials = 1;
  std::uint64_t seed = 1;

  // Grid values are in figure units: remote SNR P_r/sigma0^2 (dB) for Snr,
  // P_s/P_r (dB) for SiPower.
  SweepAxis sweep_axis = SweepAxis::None;
  std::vector<double> sweep_grid;

  std::vector<ReceiverMode> modes{ReceiverMode::Proposed, ReceiverMode::Conventional,
                                  ReceiverMode::Ideal};
  int capture_tap = -1;  // remote tap index to record for trajectory plots
  int threads = 0;       // 0: hardware concurrency

  ReceiverConfig receiver_config() const;
  /// Symbols excluded from every metric: training + K + Delta'.
  std::size_t warmup() const;
  /// Throws ConfigError naming the field.
  void validate() const;
  /// Value of the sweep coordinate this configuration sits at.
  double sweep_coordinate() const;
};

/// Copy of cfg moved to a sweep grid value.
ExperimentConfig config_at(const ExperimentConfig& cfg, double sweep_value);

struct Realization {
  Bits local_bits;
  Bits remote_bits;
  CVec i_ref;  // local reference i[n], normalised to P_i
  CVec x;      // remote symbols
  TapTrajectory si;
  TapTrajectory remote;
  ReceivedSignal rx;
};

Realization make_realization(const ExperimentConfig& cfg, std::uint64_t run_seed);

struct TrajectorySample {
  long n = 0;
  cdouble truth{};
  cdouble estimated{};
  cdouble damped{};
};

struct ModeResult {
  ReceiverMode mode = ReceiverMode::Proposed;
  ErrorCount errors;
  double rho_c_hat = 0.0;
  double rho_h_hat = 0.0;
  double rho_h_bar = 0.0;
  double rho_r_hat = 0.0;
  long rls_resets = 0;
  std::vector<TrajectorySample> trajectory;

  double ber() const { return errors.ber(); }
};

struct PowerBreakdown {
  double y = 0.0;
  double s = 0.0;
  double r = 0.0;
  double w = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<ModeResult> modes;
  /// SI-channel NMSE of the conventional receiver on the same realization;
  /// NaN when that mode was not run.
  double rho_c_tilde = std::numeric_limits<double>::quiet_NaN();
  PowerBreakdown powers;

  const ModeResult* find(ReceiverMode mode) const;
};

ModeResult run_receiver(const Realization& link, const ExperimentConfig& cfg, ReceiverMode mode);

/// Runs every mode on the realization generated from run_seed.
RunResult run_link(const ExperimentConfig& cfg, std::span<const ReceiverMode> modes,
                   std::uint64_t run_seed);
RunResult run_link(const ExperimentConfig& cfg, ReceiverMode mode, std::uint64_t run_seed);

/// Seed for one (point, trial) cell of a sweep.
std::uint64_t derive_run_seed(std::uint64_t seed, std::size_t point, std::size_t trial);

struct SweepRow {
  ReceiverMode mode = ReceiverMode::Proposed;
  double sweep_value = 0.0;
  double ber = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t symbols = 0;
  double rho_c_hat = 0.0;
  double rho_c_tilde = std::numeric_limits<double>::quiet_NaN();
  double rho_h_hat = 0.0;
  double rho_h_bar = 0.0;
  double rho_r_hat = 0.0;
  std::uint64_t seed = 0;

  bool reliable() const { return errors >= 20; }
};

using SweepTable = std::vector<SweepRow>;

/// Reduces trials of one grid point: BER pooled by error counts, the rho
/// metrics averaged on the linear scale.
std::vector<SweepRow> aggregate(std::span<const RunResult> trials, double sweep_value,
                                std::uint64_t seed, std::span<const ReceiverMode> modes);

/// One row per (grid point, mode), grid-major. Axis None runs the single
/// configured point. Trials and points run on cfg.threads workers.
SweepTable sweep(const ExperimentConfig& cfg);

}  // namespace uwfd
