#include "uwfd/rls.hpp"

#include <cmath>

namespace uwfd {

RlsState rls_init(int dim, double lambda, double delta) {
  if (dim < 1) throw InvalidArgument("rls_init: dimension must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("rls_init: lambda must lie in (0, 1]");
  if (!(delta > 0.0)) throw InvalidArgument("rls_init: delta must be positive");
  RlsState s;
  s.u = Eigen::VectorXcd::Zero(dim);
  s.P = Eigen::MatrixXcd::Identity(dim, dim) / delta;
  s.lambda = lambda;
  s.delta = delta;
  return s;
}

RlsState rls_init(int m_taps, int l_taps, double lambda, double delta) {
  if (m_taps < 1 || l_taps < 1) throw InvalidArgument("rls_init: M and L must be >= 1");
  return rls_init(m_taps + l_taps, lambda, delta);
}

cdouble rls_update(RlsState& state, const Eigen::Ref<const Eigen::VectorXcd>& v, cdouble y) {
  if (v.size() != state.dim()) throw InvalidArgument("rls_update: regressor dimension mismatch");
  if (!v.allFinite() || !std::isfinite(y.real()) || !std::isfinite(y.imag()))
    throw InvalidArgument("rls_update: non-finite input");

  const cdouble y_hat = state.u.dot(v);  // u^H v
  const cdouble e = y - y_hat;

  Eigen::VectorXcd pv = state.P * v;
  const double denom = state.lambda + v.dot(pv).real();
  if (!std::isfinite(denom) || denom <= 1e-300) {
    state.P = Eigen::MatrixXcd::Identity(state.dim(), state.dim()) / state.delta;
    ++state.resets;
    pv = state.P * v;
  }
  const Eigen::VectorXcd gamma = pv / (state.lambda + v.dot(pv).real());

  // (I - gamma v^H) P = P - gamma pv^H for Hermitian P. gamma pv^H is
  // Hermitian too, so update the upper triangle and mirror it.
  const double inv_lambda = 1.0 / state.lambda;
  const Eigen::Index n = state.dim();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cdouble pj = std::conj(pv(j));
    cdouble* col = state.P.col(j).data();
    for (Eigen::Index i = 0; i < j; ++i) {
      const cdouble value = (col[i] - gamma(i) * pj) * inv_lambda;
      col[i] = value;
      state.P(j, i) = std::conj(value);
    }
    col[j] = cdouble((col[j] - gamma(j) * pj).real() * inv_lambda, 0.0);
  }

  if ((state.P.diagonal().real().array() <= 0.0).any() || !state.P.allFinite()) {
    state.P = Eigen::MatrixXcd::Identity(state.dim(), state.dim()) / state.delta;
    ++state.resets;
  }

  state.u += std::conj(e) * gamma;
  return e;
}

}  // namespace uwfd
