#include "uwfd/receiver.hpp"

#include <string>

namespace uwfd {

std::string_view to_string(ReceiverMode mode) {
  switch (mode) {
    case ReceiverMode::Proposed: return "proposed";
    case ReceiverMode::Conventional: return "conventional";
    case ReceiverMode::Ideal: return "ideal";
  }
  return "unknown";
}

ReceiverMode parse_mode(std::string_view name) {
  if (name == "proposed") return ReceiverMode::Proposed;
  if (name == "conventional") return ReceiverMode::Conventional;
  if (name == "ideal") return ReceiverMode::Ideal;
  throw InvalidArgument("unknown receiver mode '" + std::string(name) + "'");
}

void ReceiverConfig::validate() const {
  if (si_taps < 1) throw InvalidArgument("si_taps must be >= 1");
  if (remote_taps < 1) throw InvalidArgument("remote_taps must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in (0, 1]");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidArgument("mu must lie in [0, 1]");
  if (ff_length < 1) throw InvalidArgument("ff_length must be >= 1");
  if (fb_length < 0) throw InvalidArgument("fb_length must be >= 0");
  if (estimation_delay() > max_taps())
    throw InvalidArgument("ff_length must not exceed max(si_taps, remote_taps)");
  if (training_symbols < 0) throw InvalidArgument("training_symbols must be >= 0");
  if (!(noise_power >= 0.0)) throw InvalidArgument("noise power must be >= 0");
  if (redesign_interval < 1) throw InvalidArgument("dfe_redesign_interval must be >= 1");
}

cdouble cancel_si(cdouble y, std::span<const cdouble> c_hat, std::span<const cdouble> i_window) {
  if (c_hat.size() != i_window.size())
    throw InvalidArgument("cancel_si: estimate and reference window lengths differ");
  cdouble s_hat{};
  for (std::size_t k = 0; k < c_hat.size(); ++k) s_hat += std::conj(c_hat[k]) * i_window[k];
  return y - s_hat;
}

void damp_in_place(std::span<cdouble> h_bar, std::span<const cdouble> h_hat, double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidArgument("damp: mu must lie in [0, 1]");
  if (h_bar.size() != h_hat.size()) throw InvalidArgument("damp: length mismatch");
  for (std::size_t k = 0; k < h_bar.size(); ++k) h_bar[k] = (1.0 - mu) * h_bar[k] + mu * h_hat[k];
}

CVec damp(std::span<const cdouble> h_bar_prev, std::span<const cdouble> h_hat, double mu) {
  CVec out(h_bar_prev.begin(), h_bar_prev.end());
  damp_in_place(out, h_hat, mu);
  return out;
}

namespace {

DfeDesign empty_design(const ReceiverConfig& cfg) {
  DfeDesign d;
  d.fff.assign(static_cast<std::size_t>(cfg.ff_length), cdouble{});
  d.fbf.assign(static_cast<std::size_t>(cfg.fb_length), cdouble{});
  d.delay = cfg.equalizer_delay();
  return d;
}

}  // namespace

Receiver::Receiver(const ReceiverConfig& cfg, ReceiverMode mode, std::span<const cdouble> training)
    : cfg_(cfg),
      mode_(mode),
      training_(training.begin(), training.end()),
      c_hat_(static_cast<std::size_t>(cfg.si_taps)),
      h_hat_(static_cast<std::size_t>(cfg.remote_taps)),
      h_bar_(static_cast<std::size_t>(cfg.remote_taps)),
      dfe_(empty_design(cfg)),
      y_hist_(static_cast<std::size_t>(cfg.estimation_delay() + 1)),
      i_hist_(static_cast<std::size_t>(cfg.si_taps + cfg.estimation_delay())),
      symbol_hist_(static_cast<std::size_t>(cfg.remote_taps)) {
  cfg_.validate();
  if (training_.size() < static_cast<std::size_t>(cfg.training_symbols))
    throw InvalidArgument("Receiver: fewer training symbols supplied than configured");
  training_.resize(static_cast<std::size_t>(cfg.training_symbols));
  switch (mode_) {
    case ReceiverMode::Proposed:
      rls_ = rls_init(cfg.si_taps, cfg.remote_taps, cfg.lambda, cfg.delta);
      v_ = Eigen::VectorXcd::Zero(cfg.si_taps + cfg.remote_taps);
      break;
    case ReceiverMode::Conventional:
      rls_ = rls_init(cfg.si_taps, cfg.lambda, cfg.delta);
      v_ = Eigen::VectorXcd::Zero(cfg.si_taps);
      break;
    case ReceiverMode::Ideal:
      break;
  }
}

void Receiver::maybe_redesign(std::span<const cdouble> h, bool force) {
  if (!force && designed_ && n_ % cfg_.redesign_interval != 0) return;
  double energy = 0.0;
  for (const auto& v : h) energy += std::norm(v);
  if (!(energy > 0.0)) return;
  CVec response(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) response[k] = std::conj(h[k]);
  dfe_.set_design(design_dfe(response, cfg_.noise_power, cfg_.ff_length, cfg_.fb_length));
  designed_ = true;
}

void Receiver::proposed_estimate(cdouble& r_hat, long& estimate_index) {
  const int delta = cfg_.estimation_delay();
  const auto L = static_cast<std::size_t>(cfg_.remote_taps);
  const auto M = static_cast<std::size_t>(cfg_.si_taps);
  if (n_ >= delta) {
    for (std::size_t l = 0; l < L; ++l) v_(static_cast<Eigen::Index>(l)) = symbol_hist_[l];
    for (std::size_t m = 0; m < M; ++m)
      v_(static_cast<Eigen::Index>(L + m)) = i_hist_[static_cast<std::size_t>(delta) + m];
    rls_update(rls_, v_, y_hist_[static_cast<std::size_t>(delta)]);
    for (std::size_t l = 0; l < L; ++l) h_hat_[l] = rls_.u(static_cast<Eigen::Index>(l));
    for (std::size_t m = 0; m < M; ++m) c_hat_[m] = rls_.u(static_cast<Eigen::Index>(L + m));
    estimate_index = n_ - delta;
    // Undamped while the estimator is still on training rows.
    if (estimate_index < cfg_.training_symbols) {
      h_bar_ = h_hat_;
    } else {
      damp_in_place(h_bar_, h_hat_, cfg_.mu);
    }
  }
  r_hat = y_hist_[0];
  for (std::size_t m = 0; m < M; ++m) r_hat -= std::conj(c_hat_[m]) * i_hist_[m];
  maybe_redesign(h_bar_, false);
}

void Receiver::freeze_remote_from_training() {
  const Eigen::Index dim = cfg_.remote_taps + cfg_.si_taps;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(dim, dim) * cfg_.delta;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  for (std::size_t n = 0; n < training_rows_.size(); ++n) {
    gram.noalias() += training_rows_[n] * training_rows_[n].adjoint();
    rhs += training_rows_[n] * std::conj(training_y_[n]);
  }
  const Eigen::VectorXcd u = gram.ldlt().solve(rhs);
  for (Eigen::Index l = 0; l < cfg_.remote_taps; ++l) h_hat_[static_cast<std::size_t>(l)] = u(l);
  h_bar_ = h_hat_;
  frozen_ = true;
  training_rows_.clear();
  training_y_.clear();
  maybe_redesign(h_bar_, true);
}

void Receiver::conventional_estimate(cdouble& r_hat, long& estimate_index) {
  const auto M = static_cast<std::size_t>(cfg_.si_taps);
  for (std::size_t m = 0; m < M; ++m) v_(static_cast<Eigen::Index>(m)) = i_hist_[m];
  // Cancel with the a-priori estimate, then fold y[n] into the SI-only fit.
  r_hat = y_hist_[0];
  for (std::size_t m = 0; m < M; ++m) r_hat -= std::conj(c_hat_[m]) * i_hist_[m];
  rls_update(rls_, v_, y_hist_[0]);
  for (std::size_t m = 0; m < M; ++m) c_hat_[m] = rls_.u(static_cast<Eigen::Index>(m));
  estimate_index = n_;

  if (!frozen_) {
    if (n_ < cfg_.training_symbols) {
      const auto L = static_cast<std::size_t>(cfg_.remote_taps);
      Eigen::VectorXcd row(static_cast<Eigen::Index>(L + M));
      for (std::size_t l = 0; l < L; ++l) {
        const long j = n_ - static_cast<long>(l);
        row(static_cast<Eigen::Index>(l)) = j >= 0 ? training_[static_cast<std::size_t>(j)] : cdouble{};
      }
      for (std::size_t m = 0; m < M; ++m) row(static_cast<Eigen::Index>(L + m)) = i_hist_[m];
      training_rows_.push_back(std::move(row));
      training_y_.push_back(y_hist_[0]);
    }
    if (n_ + 1 >= cfg_.training_symbols) freeze_remote_from_training();
  }
}

void Receiver::ideal_estimate(const ChannelTruth* truth, cdouble& r_hat, long& estimate_index) {
  if (truth == nullptr) throw InvalidArgument("Receiver: ideal mode requires true channels");
  if (truth->c.size() != c_hat_.size() || truth->h.size() != h_hat_.size())
    throw InvalidArgument("Receiver: true channel dimensions do not match the configuration");
  std::copy(truth->c.begin(), truth->c.end(), c_hat_.begin());
  std::copy(truth->h.begin(), truth->h.end(), h_hat_.begin());
  h_bar_ = h_hat_;
  estimate_index = n_;
  r_hat = y_hist_[0];
  for (std::size_t m = 0; m < c_hat_.size(); ++m) r_hat -= std::conj(c_hat_[m]) * i_hist_[m];
  maybe_redesign(h_bar_, false);
}

CycleOutput Receiver::cycle(cdouble y, cdouble i, const ChannelTruth* truth) {
  y_hist_.push(y);
  i_hist_.push(i);

  CycleOutput out;
  out.n = n_;
  switch (mode_) {
    case ReceiverMode::Proposed: proposed_estimate(out.r_hat, out.estimate_index); break;
    case ReceiverMode::Conventional: conventional_estimate(out.r_hat, out.estimate_index); break;
    case ReceiverMode::Ideal: ideal_estimate(truth, out.r_hat, out.estimate_index); break;
  }

  const cdouble soft = dfe_.filter(out.r_hat);
  const long j = n_ - cfg_.equalizer_delay();
  out.detected_index = j;
  if (j < 0) {
    dfe_.commit(cdouble{});
  } else if (j < cfg_.training_symbols) {
    const cdouble known = training_[static_cast<std::size_t>(j)];
    dfe_.commit(known);
    symbol_hist_.push(known);
  } else {
    const cdouble decided = bpsk_decide(soft);
    dfe_.commit(decided);
    symbol_hist_.push(decided);
    out.detected = decided;
  }
  ++n_;
  return out;
}

}  // namespace uwfd
