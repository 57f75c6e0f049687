#include "uwfd/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace uwfd {

namespace {

enum StreamId : std::uint64_t {
  kLocalBits = 1,
  kRemoteBits,
  kPaNoise,
  kSiChannel,
  kRemoteChannel,
  kAmbientNoise,
};

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::Snr: return "snr";
    case SweepAxis::SiPower: return "si";
  }
  return "unknown";
}

ReceiverConfig ExperimentConfig::receiver_config() const {
  ReceiverConfig rc;
  rc.si_taps = si_taps;
  rc.remote_taps = remote_taps;
  rc.lambda = lambda;
  rc.delta = delta;
  rc.mu = mu;
  rc.ff_length = ff_length;
  rc.fb_length = fb_length;
  rc.training_symbols = training_symbols;
  rc.noise_power = std::isfinite(noise_db) ? db_to_linear(noise_db) : 0.0;
  rc.redesign_interval = dfe_redesign_interval;
  return rc;
}

std::size_t ExperimentConfig::warmup() const {
  return static_cast<std::size_t>(training_symbols + std::max(si_taps, remote_taps) + ff_length - 1);
}

void ExperimentConfig::validate() const {
  try {
    front_end.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("front_end", e.what());
  }
  require(si_taps >= 2, "si_taps", "must be >= 2");
  require(remote_taps >= 1, "remote_taps", "must be >= 1");
  require(remote_decay > 0.0, "remote_decay", "must be positive");
  require(si_coherence_ms > 0.0, "si_coherence_ms", "must be positive");
  require(remote_coherence_ms > 0.0, "remote_coherence_ms", "must be positive");
  require(std::isfinite(ps_db), "ps_db", "must be finite");
  require(std::isfinite(pr_db), "pr_db", "must be finite");
  require(!std::isnan(noise_db), "noise_db", "must be a number");
  require(lambda > 0.0 && lambda <= 1.0, "lambda", "must lie in (0, 1]");
  require(delta > 0.0, "delta", "must be positive");
  require(mu >= 0.0 && mu <= 1.0, "mu", "must lie in [0, 1]");
  require(ff_length >= 1, "ff_length", "must be >= 1");
  require(fb_length >= 0, "fb_length", "must be >= 0");
  require(ff_length <= std::max(si_taps, remote_taps), "ff_length",
          "estimation delay ff_length must not exceed max(si_taps, remote_taps)");
  require(training_symbols >= 0, "training_symbols", "must be >= 0");
  require(dfe_redesign_interval >= 1, "dfe_redesign_interval", "must be >= 1");
  require(trials >= 1, "trials", "must be >= 1");
  require(symbols > warmup() + static_cast<std::size_t>(ff_length), "symbols",
          "run length must exceed training + K + equalizer delay (" +
              std::to_string(warmup() + static_cast<std::size_t>(ff_length)) + ")");
  require(!modes.empty(), "modes", "at least one receiver mode is required");
  require(capture_tap < remote_taps, "capture_tap", "must be < remote_taps");
  require(threads >= 0, "threads", "must be >= 0");
  if (sweep_axis != SweepAxis::None)
    require(!sweep_grid.empty(), "sweep_grid", "empty grid for a sweep axis");
  for (double v : sweep_grid) require(std::isfinite(v), "sweep_grid", "values must be finite");
}

double ExperimentConfig::sweep_coordinate() const {
  switch (sweep_axis) {
    case SweepAxis::SiPower: return ps_db - pr_db;
    case SweepAxis::Snr:
    case SweepAxis::None: return pr_db - noise_db;
  }
  return 0.0;
}

ExperimentConfig config_at(const ExperimentConfig& cfg, double sweep_value) {
  ExperimentConfig out = cfg;
  switch (cfg.sweep_axis) {
    case SweepAxis::Snr: out.noise_db = cfg.pr_db - sweep_value; break;
    case SweepAxis::SiPower: out.ps_db = cfg.pr_db + sweep_value; break;
    case SweepAxis::None: break;
  }
  return out;
}

Realization make_realization(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  cfg.validate();
  const std::size_t n = cfg.symbols;
  const double rate = cfg.front_end.bandwidth_hz;
  Realization link;

  auto local_bits_rng = make_stream(run_seed, {kLocalBits});
  auto remote_bits_rng = make_stream(run_seed, {kRemoteBits});
  auto pa_rng = make_stream(run_seed, {kPaNoise});
  auto si_rng = make_stream(run_seed, {kSiChannel});
  auto remote_rng = make_stream(run_seed, {kRemoteChannel});
  auto noise_rng = make_stream(run_seed, {kAmbientNoise});

  link.local_bits = random_bits(local_bits_rng, n);
  link.remote_bits = random_bits(remote_bits_rng, n);
  link.i_ref = make_local_reference(link.local_bits, cfg.front_end, pa_rng).samples;
  link.x = modulate_bpsk(link.remote_bits, rate).samples;
  const double px = db_to_linear(cfg.front_end.remote_symbol_power_db);
  if (px != 1.0)
    for (auto& v : link.x) v *= std::sqrt(px);

  PdpSpec si_shape = cfg.si_pdp_file.empty() ? si_pdp_default(cfg.si_taps) : load_pdp_file(cfg.si_pdp_file);
  PdpSpec remote_shape = cfg.remote_pdp_file.empty() ? remote_pdp(cfg.remote_taps, cfg.remote_decay)
                                                     : load_pdp_file(cfg.remote_pdp_file);
  if (static_cast<int>(si_shape.length()) != cfg.si_taps)
    throw ConfigError("si_pdp_file", "profile length differs from si_taps");
  if (static_cast<int>(remote_shape.length()) != cfg.remote_taps)
    throw ConfigError("remote_pdp_file", "profile length differs from remote_taps");
  const auto si_pdp = scale_pdp(si_shape, cfg.ps_db, cfg.front_end.local_ref_power_db);
  const auto rem_pdp = scale_pdp(remote_shape, cfg.pr_db, cfg.front_end.remote_symbol_power_db);

  link.si = gen_tap_trajectory(si_pdp, cfg.si_coherence_ms, n, rate, si_rng);
  link.remote = gen_tap_trajectory(rem_pdp, cfg.remote_coherence_ms, n, rate, remote_rng);
  link.rx = synthesize_received(link.i_ref, link.x, link.si, link.remote,
                                NoiseSpec{cfg.noise_db}, noise_rng);
  return link;
}

const ModeResult* RunResult::find(ReceiverMode mode) const {
  for (const auto& m : modes)
    if (m.mode == mode) return &m;
  return nullptr;
}

ModeResult run_receiver(const Realization& link, const ExperimentConfig& cfg, ReceiverMode mode) {
  const ReceiverConfig rc = cfg.receiver_config();
  const std::size_t n_total = link.x.size();
  const auto training = std::span<const cdouble>(link.x).first(
      std::min<std::size_t>(n_total, static_cast<std::size_t>(cfg.training_symbols)));
  Receiver rx(rc, mode, training);

  const long first = static_cast<long>(cfg.warmup());
  // Same channel-metric window for every mode: the proposed receiver's
  // estimates lag by Delta, so the last Delta instants are never estimated.
  const long last_estimate = static_cast<long>(n_total) - 1 - rc.estimation_delay();

  ModeResult result;
  result.mode = mode;
  NmseAccumulator c_acc, h_acc, hbar_acc;
  double r_err = 0.0;
  double r_ref = 0.0;

  for (std::size_t n = 0; n < n_total; ++n) {
    const ChannelTruth truth{link.si.at(n), link.remote.at(n)};
    const CycleOutput out = rx.cycle(link.rx.y[n], link.i_ref[n], &truth);

    if (out.detected && out.detected_index >= first) {
      result.errors.symbols += 1;
      if (out.detected->real() * link.x[static_cast<std::size_t>(out.detected_index)].real() <= 0.0)
        result.errors.errors += 1;
    }
    if (static_cast<long>(n) >= first) {
      r_err += std::norm(link.rx.r[n] - out.r_hat);
      r_ref += std::norm(link.rx.r[n]);
    }
    const long t = out.estimate_index;
    if (t >= first && t <= last_estimate) {
      const auto ts = static_cast<std::size_t>(t);
      c_acc.add(link.si.at(ts), rx.c_hat());
      h_acc.add(link.remote.at(ts), rx.h_hat());
      hbar_acc.add(link.remote.at(ts), rx.h_bar());
    }
    if (cfg.capture_tap >= 0 && t >= 0) {
      const auto k = static_cast<std::size_t>(cfg.capture_tap);
      result.trajectory.push_back(
          {t, link.remote.tap(static_cast<std::size_t>(t), k), rx.h_hat()[k], rx.h_bar()[k]});
    }
  }
  result.rho_c_hat = c_acc.value();
  result.rho_h_hat = h_acc.value();
  result.rho_h_bar = hbar_acc.value();
  result.rho_r_hat = r_ref > 0.0 ? r_err / r_ref : 0.0;
  result.rls_resets = rx.rls().resets;
  return result;
}

RunResult run_link(const ExperimentConfig& cfg, std::span<const ReceiverMode> modes,
                   std::uint64_t run_seed) {
  const Realization link = make_realization(cfg, run_seed);
  RunResult result;
  result.seed = run_seed;
  result.powers = {mean_power(link.rx.y), mean_power(link.rx.s), mean_power(link.rx.r),
                   mean_power(link.rx.w)};
  for (auto mode : modes) {
    result.modes.push_back(run_receiver(link, cfg, mode));
    if (mode == ReceiverMode::Conventional) result.rho_c_tilde = result.modes.back().rho_c_hat;
  }
  return result;
}

RunResult run_link(const ExperimentConfig& cfg, ReceiverMode mode, std::uint64_t run_seed) {
  const ReceiverMode modes[] = {mode};
  return run_link(cfg, modes, run_seed);
}

std::uint64_t derive_run_seed(std::uint64_t seed, std::size_t point, std::size_t trial) {
  auto rng = make_stream(seed, {0x5eedULL, point, trial});
  return rng();
}

std::vector<SweepRow> aggregate(std::span<const RunResult> trials, double sweep_value,
                                std::uint64_t seed, std::span<const ReceiverMode> modes) {
  std::vector<SweepRow> rows;
  for (auto mode : modes) {
    SweepRow row;
    row.mode = mode;
    row.sweep_value = sweep_value;
    row.seed = seed;
    ErrorCount pooled;
    double c = 0.0, ct = 0.0, h = 0.0, hb = 0.0, r = 0.0;
    std::size_t n = 0, n_ct = 0;
    for (const auto& run : trials) {
      const ModeResult* m = run.find(mode);
      if (m == nullptr) continue;
      pooled += m->errors;
      c += m->rho_c_hat;
      h += m->rho_h_hat;
      hb += m->rho_h_bar;
      r += m->rho_r_hat;
      ++n;
      if (!std::isnan(run.rho_c_tilde)) {
        ct += run.rho_c_tilde;
        ++n_ct;
      }
    }
    if (n == 0) continue;
    const auto dn = static_cast<double>(n);
    row.errors = pooled.errors;
    row.symbols = pooled.symbols;
    row.ber = pooled.ber();
    row.rho_c_hat = c / dn;
    row.rho_h_hat = h / dn;
    row.rho_h_bar = hb / dn;
    row.rho_r_hat = r / dn;
    if (n_ct > 0) row.rho_c_tilde = ct / static_cast<double>(n_ct);
    rows.push_back(row);
  }
  return rows;
}

SweepTable sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> grid = cfg.sweep_grid;
  if (cfg.sweep_axis == SweepAxis::None) grid = {cfg.sweep_coordinate()};
  if (grid.empty()) throw ConfigError("sweep_grid", "empty grid");

  const std::size_t n_points = grid.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<RunResult>> results(n_points, std::vector<RunResult>(n_trials));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_points * n_trials) return;
      const std::size_t point = job / n_trials;
      const std::size_t trial = job % n_trials;
      try {
        const auto point_cfg = config_at(cfg, grid[point]);
        results[point][trial] = run_link(point_cfg, cfg.modes, derive_run_seed(cfg.seed, point, trial));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_points * n_trials);
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_points * n_trials));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepTable table;
  for (std::size_t p = 0; p < n_points; ++p) {
    auto rows = aggregate(results[p], grid[p], cfg.seed, cfg.modes);
    table.insert(table.end(), rows.begin(), rows.end());
  }
  return table;
}

}  // namespace uwfd
