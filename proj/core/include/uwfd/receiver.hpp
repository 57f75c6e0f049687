#pragma once

// The adaptive full-duplex receiver and its two baselines.
//
// Proposed: joint RLS over [x_hat window ; i window] run Delta = Delta' + 1
// symbols behind, SI cancellation with c_hat, damped remote estimate h_bar
// driving a per-cycle MMSE-DFE redesign.
// Conventional: SI-only RLS (remote signal treated as noise), remote channel
// frozen at the joint least-squares fit over the training block.
// Ideal: true channels for both cancellation and DFE design.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uwfd/dfe.hpp"
#include "uwfd/rls.hpp"
#include "uwfd/types.hpp"

namespace uwfd {

enum class ReceiverMode { Proposed, Conventional, Ideal };

std::string_view to_string(ReceiverMode mode);
ReceiverMode parse_mode(std::string_view name);

struct ReceiverConfig {
  int si_taps = 30;       // M
  int remote_taps = 70;   // L
  double lambda = 0.98;
  double delta = 1e-4;
  double mu = 1e-3;
  int ff_length = 70;
  int fb_length = 50;
  int training_symbols = 130;
  double noise_power = std::pow(10.0, -3.5);  // linear, used in the MMSE design
  int redesign_interval = 1;

  int equalizer_delay() const { return ff_length - 1; }       // Delta'
  int estimation_delay() const { return ff_length; }          // Delta = Delta' + 1
  int max_taps() const { return std::max(si_taps, remote_taps); }  // K
  void validate() const;
};

/// Current true tap vectors, Hermitian convention; required in ideal mode.
struct ChannelTruth {
  std::span<const cdouble> c;
  std::span<const cdouble> h;
};

struct CycleOutput {
  long n = 0;
  cdouble r_hat{};
  long detected_index = -1;          // n - Delta'; negative before the first output
  std::optional<cdouble> detected;   // empty during cold start and training
  long estimate_index = -1;          // time index c_hat()/h_hat() refer to
};

/// Returns r_hat = y - c_hat^H i_window.
cdouble cancel_si(cdouble y, std::span<const cdouble> c_hat, std::span<const cdouble> i_window);

/// (1 - mu) h_bar_prev + mu h_hat.
CVec damp(std::span<const cdouble> h_bar_prev, std::span<const cdouble> h_hat, double mu);
void damp_in_place(std::span<cdouble> h_bar, std::span<const cdouble> h_hat, double mu);

/// Fixed-capacity history; [k] is the k-th most recent value, zero if unset.
template <typename T>
class History {
 public:
  explicit History(std::size_t capacity = 1) : buf_(std::max<std::size_t>(capacity, 1)) {}
  void push(const T& value) {
    head_ = (head_ + buf_.size() - 1) % buf_.size();
    buf_[head_] = value;
  }
  const T& operator[](std::size_t k) const { return buf_[(head_ + k) % buf_.size()]; }
  std::size_t capacity() const { return buf_.size(); }

 private:
  std::vector<T> buf_;
  std::size_t head_ = 0;
};

class Receiver {
 public:
  Receiver(const ReceiverConfig& cfg, ReceiverMode mode, std::span<const cdouble> training);

  /// One receiver cycle for received sample y[n] and local reference i[n].
  CycleOutput cycle(cdouble y, cdouble i, const ChannelTruth* truth = nullptr);

  ReceiverMode mode() const { return mode_; }
  const ReceiverConfig& config() const { return cfg_; }
  std::span<const cdouble> c_hat() const { return c_hat_; }
  std::span<const cdouble> h_hat() const { return h_hat_; }
  std::span<const cdouble> h_bar() const { return h_bar_; }
  const RlsState& rls() const { return rls_; }
  const DfeEqualizer& equalizer() const { return dfe_; }
  long cycles() const { return n_; }

 private:
  void proposed_estimate(cdouble& r_hat, long& estimate_index);
  void conventional_estimate(cdouble& r_hat, long& estimate_index);
  void ideal_estimate(const ChannelTruth* truth, cdouble& r_hat, long& estimate_index);
  void maybe_redesign(std::span<const cdouble> h, bool force);
  void freeze_remote_from_training();

  ReceiverConfig cfg_;
  ReceiverMode mode_;
  CVec training_;

  RlsState rls_;
  CVec c_hat_, h_hat_, h_bar_;
  DfeEqualizer dfe_;
  bool designed_ = false;
  bool frozen_ = false;

  History<cdouble> y_hist_;
  History<cdouble> i_hist_;
  History<cdouble> symbol_hist_;   // fed-back symbols, most recent = index n - Delta
  std::vector<Eigen::VectorXcd> training_rows_;
  CVec training_y_;
  long n_ = 0;
  Eigen::VectorXcd v_;
};

}  // namespace uwfd
