#include "uwfd/dfe.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace uwfd {

namespace {

// Builds R = H_u H_u^H in O(l_ff * (l_ff + len g)) using the shift structure
// of the convolution matrix: moving one step down a diagonal only changes the
// terms where column membership of H_u flips.
// Row-major n x n Hermitian matrix.
std::vector<cdouble> undecided_correlation(std::span<const cdouble> g, int l_ff, int l_fb) {
  const int lg = static_cast<int>(g.size());
  const int n_cols = l_ff + lg - 1;
  const int delay = l_ff - 1;
  auto in_u = [&](int m) {
    if (m < 0 || m >= n_cols) return false;
    return m <= delay || m >= delay + l_fb + 1;
  };
  auto tap = [&](int idx) { return (idx >= 0 && idx < lg) ? g[static_cast<std::size_t>(idx)] : cdouble{}; };

  // Columns where membership flips between m and m + 1.
  std::vector<std::pair<int, double>> flips;
  for (int m : {delay, delay + l_fb, n_cols - 1}) {
    const int change = static_cast<int>(in_u(m + 1)) - static_cast<int>(in_u(m));
    bool seen = false;
    for (const auto& f : flips) seen |= f.first == m;
    if (change != 0 && !seen) flips.emplace_back(m, static_cast<double>(change));
  }

  const auto n = static_cast<std::size_t>(l_ff);
  std::vector<cdouble> R(n * n);
  auto at = [&](int i, int k) -> cdouble& { return R[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(k)]; };
  for (int d = 0; d < l_ff; ++d) {
    // R[0][d] = sum over undecided m of g[m] conj(g[m - d]).
    cdouble acc{};
    for (int m = d; m < std::min(n_cols, lg); ++m)
      if (in_u(m)) acc += g[static_cast<std::size_t>(m)] * std::conj(g[static_cast<std::size_t>(m - d)]);
    at(0, d) = acc;
    for (int i = 0; i + 1 + d < l_ff; ++i) {
      const int k = i + d;
      for (const auto& [m, change] : flips) acc += change * tap(m - i) * std::conj(tap(m - k));
      at(i + 1, k + 1) = acc;
    }
  }
  for (int i = 0; i < l_ff; ++i) {
    at(i, i) = cdouble(at(i, i).real(), 0.0);
    for (int k = i + 1; k < l_ff; ++k) at(k, i) = std::conj(at(i, k));
  }
  return R;
}

// Solves a x = b for Hermitian positive definite row-major a (overwritten
// with its lower Cholesky factor). Plain loops: for the 50..100 sizes used
// here this beats the blocked library factorisation.
bool cholesky_solve(std::vector<cdouble>& a, std::size_t n, std::vector<cdouble>& b) {
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble* rj = &a[j * n];
    double d = a[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(rj[k]);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    const double inv = 1.0 / d;
    for (std::size_t i = j + 1; i < n; ++i) {
      const cdouble* ri = &a[i * n];
      double sr = a[i * n + j].real();
      double si = a[i * n + j].imag();
      for (std::size_t k = 0; k < j; ++k) {
        // s -= ri[k] * conj(rj[k])
        const double ar = ri[k].real(), ai = ri[k].imag();
        const double br = rj[k].real(), bi = rj[k].imag();
        sr -= ar * br + ai * bi;
        si -= ai * br - ar * bi;
      }
      a[i * n + j] = cdouble(sr * inv, si * inv);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    cdouble s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i].real();
  }
  for (std::size_t i = n; i-- > 0;) {
    cdouble s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= std::conj(a[k * n + i]) * b[k];
    b[i] = s / a[i * n + i].real();
  }
  return true;
}

}  // namespace

DfeDesign design_dfe(std::span<const cdouble> impulse_response, double noise_power, int l_ff,
                     int l_fb) {
  if (l_ff < 1) throw InvalidArgument("design_dfe: l_ff must be >= 1");
  if (l_fb < 0) throw InvalidArgument("design_dfe: l_fb must be >= 0");
  if (!(noise_power >= 0.0)) throw InvalidArgument("design_dfe: noise power must be >= 0");
  double energy = 0.0;
  for (const auto& v : impulse_response) energy += std::norm(v);
  if (impulse_response.empty() || !(energy > 0.0))
    throw InvalidArgument("design_dfe: channel response is zero; system is singular");

  const int delay = l_ff - 1;
  const auto n = static_cast<std::size_t>(l_ff);
  std::vector<cdouble> R = undecided_correlation(impulse_response, l_ff, l_fb);
  for (std::size_t i = 0; i < n; ++i) R[i * n + i] += noise_power + kDfeRidge;

  const int lg = static_cast<int>(impulse_response.size());
  std::vector<cdouble> a(n);
  for (int i = 0; i < l_ff; ++i) {
    const int idx = delay - i;
    a[static_cast<std::size_t>(i)] = idx < lg ? impulse_response[static_cast<std::size_t>(idx)] : cdouble{};
  }
  if (!cholesky_solve(R, n, a)) throw InvalidArgument("design_dfe: correlation matrix is not positive definite");

  DfeDesign design;
  design.delay = delay;
  design.fff.resize(static_cast<std::size_t>(l_ff));
  for (int i = 0; i < l_ff; ++i) design.fff[static_cast<std::size_t>(i)] = std::conj(a[static_cast<std::size_t>(i)]);

  design.fbf.assign(static_cast<std::size_t>(l_fb), cdouble{});
  const CVec cascade = dfe_cascade(design, impulse_response);
  for (int j = 1; j <= l_fb; ++j) {
    const auto idx = static_cast<std::size_t>(delay + j);
    if (idx < cascade.size()) design.fbf[static_cast<std::size_t>(j - 1)] = cascade[idx];
  }
  return design;
}

CVec dfe_cascade(const DfeDesign& design, std::span<const cdouble> impulse_response) {
  const std::size_t n = design.fff.size() + impulse_response.size() - 1;
  CVec out(n, cdouble{});
  for (std::size_t i = 0; i < design.fff.size(); ++i)
    for (std::size_t k = 0; k < impulse_response.size(); ++k)
      out[i + k] += design.fff[i] * impulse_response[k];
  return out;
}

DfeEqualizer::DfeEqualizer(DfeDesign design) { set_design(std::move(design)); }

void DfeEqualizer::set_design(DfeDesign design) {
  if (window_.size() != design.fff.size()) window_.assign(design.fff.size(), cdouble{});
  if (decisions_.size() != design.fbf.size()) decisions_.assign(design.fbf.size(), cdouble{});
  design_ = std::move(design);
}

void DfeEqualizer::reset() {
  std::fill(window_.begin(), window_.end(), cdouble{});
  std::fill(decisions_.begin(), decisions_.end(), cdouble{});
  outputs_ = 0;
}

cdouble DfeEqualizer::filter(cdouble r) {
  if (window_.empty()) throw InvalidArgument("DfeEqualizer: no design loaded");
  std::rotate(window_.rbegin(), window_.rbegin() + 1, window_.rend());
  window_[0] = r;
  cdouble soft{};
  for (std::size_t i = 0; i < window_.size(); ++i) soft += design_.fff[i] * window_[i];
  for (std::size_t j = 0; j < decisions_.size(); ++j) soft -= design_.fbf[j] * decisions_[j];
  return soft;
}

void DfeEqualizer::commit(cdouble symbol) {
  if (decisions_.empty()) return;
  std::rotate(decisions_.rbegin(), decisions_.rbegin() + 1, decisions_.rend());
  decisions_[0] = symbol;
}

cdouble DfeEqualizer::step(cdouble r) {
  const cdouble decided = bpsk_decide(filter(r));
  // Outputs before the first full delay refer to symbols before time zero.
  commit(outputs_ < design_.delay ? cdouble{} : decided);
  ++outputs_;
  return decided;
}

}  // namespace uwfd
