#include "uwfd/selftest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "uwfd/channel.hpp"
#include "uwfd/dfe.hpp"
#include "uwfd/experiments.hpp"
#include "uwfd/random.hpp"
#include "uwfd/receiver.hpp"
#include "uwfd/rls.hpp"
#include "uwfd/waveform.hpp"

namespace uwfd {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

SelfTestResult rls_matches_batch_ls() {
  double worst = 0.0;
  auto rng = make_stream(11, {});
  for (int dim = 6; dim <= 12; ++dim) {
    const double delta = 1e-4;
    auto state = rls_init(dim, 1.0, delta);
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(dim, dim) * delta;
    Eigen::VectorXcd cross = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd truth(dim);
    for (auto& t : truth) t = complex_gaussian(rng, 1.0);
    for (int n = 0; n < 20 * dim; ++n) {
      Eigen::VectorXcd v(dim);
      for (auto& x : v) x = complex_gaussian(rng, 1.0);
      const cdouble y = truth.dot(v) + complex_gaussian(rng, 1e-2);
      rls_update(state, v, y);
      gram += v * v.adjoint();
      cross += v * std::conj(y);
    }
    const Eigen::VectorXcd ls = gram.ldlt().solve(cross);
    worst = std::max(worst, (state.u - ls).norm() / ls.norm());
  }
  return {"rls lambda=1 equals batch least squares", worst < 1e-6, "max relative error " + fmt(worst)};
}

SelfTestResult cancellation_exact() {
  auto rng = make_stream(12, {});
  auto dyadic = [&rng](int bits) {
    auto draw = [&] { return std::ldexp(static_cast<double>(static_cast<int>(rng() % 33) - 16), -bits); };
    const double re = draw();
    return cdouble(re, draw());
  };
  const std::size_t n = 500, m = 30;
  CVec c(m), i(n), rw(n);
  for (auto& v : c) v = dyadic(6);
  for (auto& v : i) v = dyadic(4);
  for (auto& v : rw) v = dyadic(9);
  PdpSpec pdp;
  pdp.profile.assign(m, 1.0);
  pdp.static_mask.assign(m, true);
  TapTrajectory traj(n, m, pdp, 0.0);
  for (std::size_t t = 0; t < n; ++t) std::copy(c.begin(), c.end(), traj.at(t).begin());
  const auto s = apply_channel(i, traj);
  History<cdouble> window(m);
  CVec iw(m);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < n; ++t) {
    window.push(i[t]);
    for (std::size_t k = 0; k < m; ++k) iw[k] = window[k];
    if (cancel_si(s[t] + rw[t], c, iw) != rw[t]) ++mismatches;
  }
  return {"perfect-CSI cancellation returns r+w exactly", mismatches == 0,
          std::to_string(mismatches) + " mismatching samples"};
}

SelfTestResult dfe_two_tap() {
  const CVec g{{1.0, 0.0}, {0.5, 0.0}};
  const auto design = design_dfe(g, 0.0, 70, 50);
  auto rng = make_stream(13, {});
  const auto bits = random_bits(rng, 5000);
  const auto x = modulate_bpsk(bits).samples;
  DfeEqualizer eq(design);
  std::size_t errors = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    cdouble z = g[0] * x[n];
    if (n > 0) z += g[1] * x[n - 1];
    const cdouble d = eq.step(z);
    const long k = static_cast<long>(n) - design.delay;
    if (k >= 0 && d != x[static_cast<std::size_t>(k)]) ++errors;
  }
  return {"mmse-dfe on a noiseless two-tap channel", errors == 0, std::to_string(errors) + " symbol errors"};
}

SelfTestResult rrc_nyquist() {
  const int sps = 32, span = 12;
  const auto h = rrc_taps(0.5, span, sps);
  std::vector<double> p(2 * h.size() - 1, 0.0);
  for (std::size_t a = 0; a < h.size(); ++a)
    for (std::size_t b = 0; b < h.size(); ++b) p[a + b] += h[a] * h[b];
  const std::size_t peak = h.size() - 1;
  double worst = 0.0;
  for (std::size_t k = peak % sps; k < p.size(); k += sps)
    if (k != peak) worst = std::max(worst, std::abs(p[k]));
  worst /= p[peak];
  return {"rrc cascade is Nyquist", worst < 1e-2, "worst off-peak/peak " + fmt(worst)};
}

SelfTestResult gauss_markov_lag() {
  PdpSpec pdp;
  pdp.profile = {1.0};
  pdp.static_mask = {false};
  auto rng = make_stream(14, {});
  const auto t = gen_tap_trajectory(pdp, 70.0, 1000000, 5000.0, rng);
  const std::size_t n = t.size();
  double power = 0.0;
  for (std::size_t k = 0; k < n; ++k) power += std::norm(t.tap(k, 0));
  auto corr = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t k = lag; k < n; ++k) acc += (t.tap(k, 0) * std::conj(t.tap(k - lag, 0))).real();
    return acc / power * static_cast<double>(n) / static_cast<double>(n - lag);
  };
  const double target = std::exp(-1.0);
  double lag = 0.0, prev = 1.0;
  for (std::size_t l = 1; l <= 700; ++l) {
    const double r = corr(l);
    if (r <= target) {
      lag = static_cast<double>(l - 1) + (prev - target) / (prev - r);
      break;
    }
    prev = r;
  }
  const bool ok = lag >= 0.85 * 350.0 && lag <= 1.15 * 350.0;
  return {"gauss-markov 1/e lag near 350 symbols", ok, "lag " + fmt(lag)};
}

SelfTestResult pa_polynomial() {
  FrontEndConfig cfg;
  cfg.pa_noise_power_db = -std::numeric_limits<double>::infinity();
  RealSeq p;
  p.samples = {0.1, -0.2, 0.0};
  auto rng = make_stream(15, {});
  const auto q = pa_apply(p, cfg, rng);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = p.samples[k];
    worst = std::max(worst, std::abs(q.samples[k] - (100 * x + 5 * x * x * x + 10 * std::pow(x, 5))));
  }
  return {"pa polynomial", worst < 1e-12, "max deviation " + fmt(worst)};
}

SelfTestResult loopback() {
  FrontEndConfig cfg;
  auto rng = make_stream(16, {});
  const auto sym = modulate_bpsk(random_bits(rng, 400));
  const auto back = downconvert_matched_downsample(pulse_shape_upconvert(sym, cfg), cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k < sym.size(); ++k) worst = std::max(worst, std::abs(back.samples[k] - sym.samples[k]));
  return {"shaping/matched-filter loopback", worst < 1e-2, "max symbol error " + fmt(worst)};
}

SelfTestResult link_determinism() {
  ExperimentConfig cfg;
  cfg.symbols = 1200;
  cfg.threads = 1;
  const auto a = run_link(cfg, cfg.modes, 17);
  const auto b = run_link(cfg, cfg.modes, 17);
  bool same = a.modes.size() == b.modes.size();
  for (std::size_t m = 0; same && m < a.modes.size(); ++m)
    same = a.modes[m].errors.errors == b.modes[m].errors.errors && a.modes[m].rho_c_hat == b.modes[m].rho_c_hat &&
           a.modes[m].rho_r_hat == b.modes[m].rho_r_hat;
  const double sum = a.powers.s + a.powers.r + a.powers.w;
  const double dev = std::abs(a.powers.y - sum) / sum;
  return {"link run is deterministic and power-conserving", same && dev < 0.05,
          std::string(same ? "repeatable" : "differs between calls") + ", power deviation " + fmt(dev)};
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  const std::function<SelfTestResult()> checks[] = {rls_matches_batch_ls, cancellation_exact, dfe_two_tap,
                                                    rrc_nyquist,          gauss_markov_lag,   pa_polynomial,
                                                    loopback,             link_determinism};
  std::vector<SelfTestResult> out;
  for (const auto& check : checks) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(check threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace uwfd
