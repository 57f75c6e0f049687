#include "uwfd/channel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace uwfd {

double PdpSpec::total_power() const {
  double acc = 0.0;
  for (double p : profile) acc += p;
  return acc;
}

void PdpSpec::validate() const {
  if (profile.empty()) throw InvalidArgument("PdpSpec: empty profile");
  if (static_mask.size() != profile.size())
    throw InvalidArgument("PdpSpec: static_mask length differs from profile length");
  for (double p : profile)
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("PdpSpec: negative or non-finite tap power");
}

PdpSpec si_pdp_default(int taps) {
  if (taps < 2) throw InvalidArgument("si_pdp_default: at least 2 taps required");
  using S = SiProfileShape;
  PdpSpec pdp;
  pdp.profile.resize(static_cast<std::size_t>(taps));
  pdp.static_mask.assign(static_cast<std::size_t>(taps), false);
  const int peak = taps / 2;
  pdp.profile[0] = S::kDirectPower;
  pdp.static_mask[0] = true;
  for (int k = 1; k < taps; ++k) {
    const double skirt = S::kSecondaryRatio * std::pow(10.0, -S::kSkirtDbPerTap * std::abs(k - peak) / 10.0);
    pdp.profile[static_cast<std::size_t>(k)] = S::kDirectPower * std::max(skirt, S::kFloorRatio);
  }
  pdp.target_power_db = linear_to_db(pdp.total_power());
  return pdp;
}

PdpSpec remote_pdp(int taps, double decay) {
  if (taps < 1) throw InvalidArgument("remote_pdp: at least 1 tap required");
  if (!(decay > 0.0)) throw InvalidArgument("remote_pdp: decay must be positive");
  PdpSpec pdp;
  pdp.profile.resize(static_cast<std::size_t>(taps));
  pdp.static_mask.assign(static_cast<std::size_t>(taps), false);
  for (int k = 0; k < taps; ++k) pdp.profile[static_cast<std::size_t>(k)] = std::exp(-decay * k);
  pdp.target_power_db = linear_to_db(pdp.total_power());
  return pdp;
}

PdpSpec scale_pdp(const PdpSpec& pdp, double signal_power_db, double input_power_db) {
  pdp.validate();
  const double total = pdp.total_power();
  if (!(total > 0.0)) throw InvalidArgument("scale_pdp: profile has zero power");
  const double target = db_to_linear(signal_power_db - input_power_db);
  PdpSpec out = pdp;
  for (double& p : out.profile) p *= target / total;
  out.target_power_db = signal_power_db - input_power_db;
  return out;
}

PdpSpec load_pdp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("load_pdp_file: cannot open " + path.string());
  std::map<int, std::pair<double, bool>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int index;
    if (!(ss >> index)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected tap index");
    }
    double power;
    int flag;
    std::string extra;
    if (!(ss >> power >> flag) || (ss >> extra) || (flag != 0 && flag != 1) || index < 0)
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'tap_index power_linear static_flag(0|1)'");
    if (!rows.emplace(index, std::pair{power, flag == 1}).second)
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": duplicate tap index");
  }
  if (rows.empty()) throw InvalidArgument("load_pdp_file: no taps in " + path.string());
  PdpSpec pdp;
  int expected = 0;
  for (const auto& [index, row] : rows) {
    if (index != expected++)
      throw InvalidArgument("load_pdp_file: tap indices must be contiguous from 0");
    pdp.profile.push_back(row.first);
    pdp.static_mask.push_back(row.second);
  }
  pdp.validate();
  pdp.target_power_db = linear_to_db(pdp.total_power());
  return pdp;
}

TapTrajectory::TapTrajectory(std::size_t n_symbols, std::size_t n_taps, PdpSpec pdp,
                             double coherence_symbols)
    : n_symbols_(n_symbols),
      n_taps_(n_taps),
      data_(n_symbols * n_taps),
      pdp_(std::move(pdp)),
      coherence_symbols_(coherence_symbols) {}

double gauss_markov_coefficient(double coherence_symbols) {
  return std::exp(-1.0 / coherence_symbols);
}

TapTrajectory gen_tap_trajectory(const PdpSpec& pdp, double coherence_ms, std::size_t n_symbols,
                                 double symbol_rate_hz, Rng& rng) {
  pdp.validate();
  if (n_symbols < 1) throw InvalidArgument("gen_tap_trajectory: n_symbols must be >= 1");
  if (!(symbol_rate_hz > 0.0)) throw InvalidArgument("gen_tap_trajectory: symbol rate must be positive");
  bool any_varying = false;
  for (std::size_t k = 0; k < pdp.length(); ++k) any_varying |= !pdp.static_mask[k];
  if (any_varying && !(coherence_ms > 0.0))
    throw InvalidArgument("gen_tap_trajectory: coherence time must be positive");

  const double coherence_symbols = any_varying ? coherence_ms * 1e-3 * symbol_rate_hz : 0.0;
  TapTrajectory traj(n_symbols, pdp.length(), pdp, coherence_symbols);
  const double a = any_varying ? gauss_markov_coefficient(coherence_symbols) : 0.0;
  const double innovation = std::sqrt(std::max(0.0, 1.0 - a * a));
  std::uniform_real_distribution<double> uniform_phase(0.0, 2.0 * std::numbers::pi);

  std::vector<cdouble> current(pdp.length());
  for (std::size_t k = 0; k < pdp.length(); ++k) {
    const double power = pdp.profile[k];
    if (pdp.static_mask[k]) {
      current[k] = std::polar(std::sqrt(power), uniform_phase(rng));
    } else {
      current[k] = complex_gaussian(rng, power);
    }
  }
  for (std::size_t n = 0; n < n_symbols; ++n) {
    auto row = traj.at(n);
    if (n > 0) {
      for (std::size_t k = 0; k < pdp.length(); ++k) {
        if (pdp.static_mask[k]) continue;
        current[k] = a * current[k] + innovation * complex_gaussian(rng, pdp.profile[k]);
      }
    }
    std::copy(current.begin(), current.end(), row.begin());
  }
  return traj;
}

CVec apply_channel(std::span<const cdouble> x, const TapTrajectory& trajectory) {
  if (trajectory.size() < x.size())
    throw InvalidArgument("apply_channel: trajectory shorter than signal");
  CVec out(x.size());
  const std::size_t n_taps = trajectory.taps();
  for (std::size_t n = 0; n < x.size(); ++n) {
    const auto taps = trajectory.at(n);
    const std::size_t k_max = std::min(n_taps, n + 1);
    cdouble acc{0.0, 0.0};
    for (std::size_t k = 0; k < k_max; ++k) acc += std::conj(taps[k]) * x[n - k];
    out[n] = acc;
  }
  return out;
}

ReceivedSignal synthesize_received(std::span<const cdouble> local_ref,
                                   std::span<const cdouble> remote_symbols,
                                   const TapTrajectory& si, const TapTrajectory& remote,
                                   const NoiseSpec& noise, Rng& rng) {
  if (local_ref.size() != remote_symbols.size())
    throw InvalidArgument("synthesize_received: local and remote sequences differ in length");
  ReceivedSignal rx;
  rx.s = apply_channel(local_ref, si);
  rx.r = apply_channel(remote_symbols, remote);
  const double noise_power =
      std::isfinite(noise.ambient_power_db) ? db_to_linear(noise.ambient_power_db) : 0.0;
  rx.w.resize(local_ref.size());
  rx.y.resize(local_ref.size());
  for (std::size_t n = 0; n < rx.y.size(); ++n) {
    rx.w[n] = noise_power > 0.0 ? complex_gaussian(rng, noise_power) : cdouble{};
    rx.y[n] = rx.s[n] + rx.r[n] + rx.w[n];
  }
  return rx;
}

}  // namespace uwfd
