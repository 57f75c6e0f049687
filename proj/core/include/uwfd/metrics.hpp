#pragma once

#include <cstdint>
#include <span>

#include "uwfd/channel.hpp"
#include "uwfd/types.hpp"

namespace uwfd {

/// Accumulates E||truth - estimate||^2 / E||truth||^2 over time.
class NmseAccumulator {
 public:
  void add(std::span<const cdouble> truth, std::span<const cdouble> estimate);
  void merge(const NmseAccumulator& other);
  /// Throws if no truth energy was accumulated.
  double value() const;
  double error_energy() const { return error_; }
  double truth_energy() const { return truth_; }
  std::size_t count() const { return count_; }

 private:
  double error_ = 0.0;
  double truth_ = 0.0;
  std::size_t count_ = 0;
};

/// Compares truth row t with estimate row t + shift for t >= first.
/// An estimator that runs `shift` cycles behind stores its estimate of
/// time t at row t + shift.
double normalized_channel_mse(const TapTrajectory& truth, const TapTrajectory& estimate,
                              std::size_t first = 0, std::size_t shift = 0);

/// E|r - r_hat|^2 / E|r|^2 over samples [first, end).
double residual_mse(std::span<const cdouble> r_true, std::span<const cdouble> r_hat,
                    std::size_t first = 0);

struct ErrorCount {
  std::uint64_t errors = 0;
  std::uint64_t symbols = 0;

  double ber() const { return symbols ? static_cast<double>(errors) / static_cast<double>(symbols) : 0.0; }
  /// Fewer than 20 errors gives a loose BER estimate.
  bool reliable() const { return errors >= 20; }
  ErrorCount& operator+=(const ErrorCount& o) {
    errors += o.errors;
    symbols += o.symbols;
    return *this;
  }
};

}  // namespace uwfd
