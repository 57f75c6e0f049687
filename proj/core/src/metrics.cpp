#include "uwfd/metrics.hpp"

namespace uwfd {

void NmseAccumulator::add(std::span<const cdouble> truth, std::span<const cdouble> estimate) {
  if (truth.size() != estimate.size()) throw InvalidArgument("NmseAccumulator: length mismatch");
  for (std::size_t k = 0; k < truth.size(); ++k) {
    error_ += std::norm(truth[k] - estimate[k]);
    truth_ += std::norm(truth[k]);
  }
  ++count_;
}

void NmseAccumulator::merge(const NmseAccumulator& other) {
  error_ += other.error_;
  truth_ += other.truth_;
  count_ += other.count_;
}

double NmseAccumulator::value() const {
  if (!(truth_ > 0.0)) throw InvalidArgument("normalized MSE: reference has zero power");
  return error_ / truth_;
}

double normalized_channel_mse(const TapTrajectory& truth, const TapTrajectory& estimate,
                              std::size_t first, std::size_t shift) {
  if (truth.taps() != estimate.taps())
    throw InvalidArgument("normalized_channel_mse: tap counts differ");
  NmseAccumulator acc;
  for (std::size_t t = first; t < truth.size() && t + shift < estimate.size(); ++t)
    acc.add(truth.at(t), estimate.at(t + shift));
  return acc.value();
}

double residual_mse(std::span<const cdouble> r_true, std::span<const cdouble> r_hat,
                    std::size_t first) {
  if (r_true.size() != r_hat.size()) throw InvalidArgument("residual_mse: length mismatch");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t n = first; n < r_true.size(); ++n) {
    err += std::norm(r_true[n] - r_hat[n]);
    ref += std::norm(r_true[n]);
  }
  if (!(ref > 0.0)) throw InvalidArgument("residual_mse: remote signal has zero power");
  return err / ref;
}

}  // namespace uwfd
