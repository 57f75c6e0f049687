#pragma once

// MMSE decision-feedback equalizer for BPSK.
//
// Filters are stored in direct form. With z[n] the equalizer input and
// d[j] = x_hat[n - delay - j] the past decisions,
//   soft[n] = sum_i fff[i] z[n-i] - sum_{j>=1} fbf[j-1] d[j]
// estimates x[n - delay].

#include <span>
#include <vector>

#include "uwfd/types.hpp"

namespace uwfd {

struct DfeDesign {
  CVec fff;
  CVec fbf;
  int delay = 0;  // fff.size() - 1
};

inline constexpr double kDfeRidge = 1e-9;

/// Designs the MMSE-DFE for an impulse response g (z[n] = sum_k g[k] x[n-k]
/// + noise, unit-power white symbols). The FFF solves
///   (H_u H_u^H + (noise_power + ridge) I) f* = H e_delay
/// where H is the l_ff x (l_ff + len(g) - 1) convolution matrix, H_u keeps
/// only the columns of symbols not removed by feedback, and delay = l_ff - 1.
/// The FBF equals the post-cursor taps of the cascade:
///   fbf[j-1] = (fff * g)[delay + j], j = 1..l_fb.
DfeDesign design_dfe(std::span<const cdouble> impulse_response, double noise_power, int l_ff,
                     int l_fb);

/// Convolution of the FFF with the channel response.
CVec dfe_cascade(const DfeDesign& design, std::span<const cdouble> impulse_response);

/// BPSK slicer on the real part; ties go to +1.
inline cdouble bpsk_decide(cdouble soft) { return {soft.real() >= 0.0 ? 1.0 : -1.0, 0.0}; }

/// Running equalizer: holds the FFF input window and the feedback buffer.
class DfeEqualizer {
 public:
  DfeEqualizer() = default;
  explicit DfeEqualizer(DfeDesign design);

  const DfeDesign& design() const { return design_; }
  /// Replaces the filters; buffers are kept if their lengths still match.
  void set_design(DfeDesign design);

  /// Shifts r into the FFF window and returns the soft estimate of
  /// x[n - delay]. Must be followed by commit() before the next call.
  cdouble filter(cdouble r);
  /// Pushes the symbol to use as feedback for this output.
  void commit(cdouble symbol);
  /// filter + slice + commit of the hard decision. The first `delay`
  /// outputs estimate symbols before time zero, so zeros are fed back for them.
  cdouble step(cdouble r);
  /// Clears both buffers and the output count.
  void reset();

 private:
  DfeDesign design_;
  CVec window_;     // window_[i] = z[n - i]
  CVec decisions_;  // decisions_[j] = x_hat[n - delay - 1 - j]
  long outputs_ = 0;
};

}  // namespace uwfd
