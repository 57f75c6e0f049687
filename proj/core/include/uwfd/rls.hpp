#pragma once

#include <Eigen/Dense>

#include "uwfd/types.hpp"

namespace uwfd {

/// Exponentially weighted RLS estimate. For the joint estimator u stacks
/// [h_hat ; c_hat] to match regressors v = [x_hat window ; i window].
struct RlsState {
  Eigen::VectorXcd u;
  Eigen::MatrixXcd P;  // inverse correlation, Hermitian positive definite
  double lambda = 0.98;
  double delta = 1e-4;
  long resets = 0;  // times P was reinitialised by the numerical safeguard

  Eigen::Index dim() const { return u.size(); }
};

/// u = 0, P = I / delta, dimension M + L.
RlsState rls_init(int m_taps, int l_taps, double lambda, double delta);
RlsState rls_init(int dim, double lambda, double delta);

/// One step of the a-priori-error RLS recursion:
///   y_hat = u^H v, e = y - y_hat,
///   gamma = P v / (lambda + v^H P v),
///   P <- (I - gamma v^H) P / lambda,
///   u <- u + conj(e) gamma.
/// Returns e. P is re-symmetrised after every step; if the gain denominator
/// stops being finite and positive, P is reset to I / delta.
cdouble rls_update(RlsState& state, const Eigen::Ref<const Eigen::VectorXcd>& v, cdouble y);

}  // namespace uwfd
