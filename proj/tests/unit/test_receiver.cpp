#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uwfd/channel.hpp"
#include "uwfd/receiver.hpp"

using namespace uwfd;

namespace {

struct StaticLink {
  CVec c, h;  // Hermitian-convention tap vectors
  CVec i, x, s, r, w, y;
};

StaticLink make_static_link(int M, int L, std::size_t n, double si_power, double remote_power,
                            double noise_power, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  StaticLink link;
  link.c.resize(static_cast<std::size_t>(M));
  link.h.resize(static_cast<std::size_t>(L));
  double cs = 0.0, hs = 0.0;
  for (int k = 0; k < M; ++k) {
    link.c[static_cast<std::size_t>(k)] = complex_gaussian(rng, std::exp(-0.2 * k));
    cs += std::norm(link.c[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < L; ++k) {
    link.h[static_cast<std::size_t>(k)] = complex_gaussian(rng, std::exp(-0.25 * k));
    hs += std::norm(link.h[static_cast<std::size_t>(k)]);
  }
  for (auto& v : link.c) v *= std::sqrt(si_power / cs);
  for (auto& v : link.h) v *= std::sqrt(remote_power / hs);
  link.i.resize(n);
  link.x.resize(n);
  for (auto& v : link.i) v = complex_gaussian(rng, 1.0);
  for (auto& v : link.x) v = (rng() & 1) ? 1.0 : -1.0;
  link.s = oracle::static_channel(link.i, link.c);
  link.r = oracle::static_channel(link.x, link.h);
  link.w.resize(n);
  link.y.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    link.w[k] = noise_power > 0.0 ? complex_gaussian(rng, noise_power) : cdouble{};
    link.y[k] = link.s[k] + link.r[k] + link.w[k];
  }
  return link;
}

struct RunStats {
  int errors = 0;
  int decisions = 0;
  double c_err = 0.0;
  double h_err = 0.0;
};

RunStats run(Receiver& rx, const StaticLink& link, long first) {
  RunStats st;
  const ChannelTruth truth{link.c, link.h};
  for (std::size_t n = 0; n < link.y.size(); ++n) {
    const auto out = rx.cycle(link.y[n], link.i[n], &truth);
    if (out.detected && out.detected_index >= first) {
      ++st.decisions;
      if (*out.detected != link.x[static_cast<std::size_t>(out.detected_index)]) ++st.errors;
    }
  }
  for (std::size_t k = 0; k < link.c.size(); ++k) st.c_err += std::norm(rx.c_hat()[k] - link.c[k]);
  for (std::size_t k = 0; k < link.h.size(); ++k) st.h_err += std::norm(rx.h_hat()[k] - link.h[k]);
  return st;
}

ReceiverConfig small_config() {
  ReceiverConfig cfg;
  cfg.si_taps = 6;
  cfg.remote_taps = 8;
  cfg.ff_length = 8;
  cfg.fb_length = 7;
  cfg.training_symbols = 60;
  return cfg;
}

}  // namespace

TEST_CASE("mode names round-trip") {
  for (auto m : {ReceiverMode::Proposed, ReceiverMode::Conventional, ReceiverMode::Ideal})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_mode("oracle"), InvalidArgument);
}

TEST_CASE("ReceiverConfig defaults and delays") {
  ReceiverConfig cfg;
  CHECK(cfg.equalizer_delay() == 69);
  CHECK(cfg.estimation_delay() == 70);
  CHECK(cfg.max_taps() == 70);
  CHECK_NOTHROW(cfg.validate());
  cfg.ff_length = 71;  // Delta would exceed K
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ReceiverConfig{};
  cfg.lambda = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ReceiverConfig{};
  cfg.mu = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("cancel_si") {
  auto rng = make_stream(1, {});
  CVec c(5), win(5);
  for (auto& v : c) v = complex_gaussian(rng, 0.2);
  for (auto& v : win) v = complex_gaussian(rng, 1.0);
  const cdouble y(0.7, -0.2);
  CHECK(cancel_si(y, CVec(5), win) == y);
  cdouble s{};
  for (std::size_t k = 0; k < 5; ++k) s += std::conj(c[k]) * win[k];
  CHECK(std::abs(cancel_si(y, c, win) - (y - s)) < 1e-15);
  CHECK_THROWS_AS(cancel_si(y, c, CVec(4)), InvalidArgument);
}

TEST_CASE("perfect-CSI cancellation leaves exactly r + w on exact-arithmetic data") {
  // Values on a coarse dyadic grid keep every product and sum exact, so the
  // only way to miss bit equality is a mismatch between how the channel and
  // the canceller form c^H i.
  auto rng = make_stream(2, {});
  auto dyadic = [&rng](int bits) {
    const double scale = std::ldexp(1.0, -bits);
    auto draw = [&] { return static_cast<double>(static_cast<int>(rng() % 33) - 16) * scale; };
    const double re = draw();
    return cdouble(re, draw());
  };
  const std::size_t n = 400, M = 30;
  CVec c(M), i(n), r(n), w(n);
  for (auto& v : c) v = dyadic(6);
  for (auto& v : i) v = dyadic(4);
  for (auto& v : r) v = dyadic(8);
  for (auto& v : w) v = dyadic(10);
  PdpSpec pdp;
  pdp.profile.assign(M, 1.0);
  pdp.static_mask.assign(M, true);
  TapTrajectory traj(n, M, pdp, 0.0);
  for (std::size_t t = 0; t < n; ++t) std::copy(c.begin(), c.end(), traj.at(t).begin());
  const auto s = apply_channel(i, traj);
  History<cdouble> window(M);
  for (std::size_t t = 0; t < n; ++t) {
    const cdouble y = s[t] + r[t] + w[t];
    window.push(i[t]);
    CVec iw(M);
    for (std::size_t k = 0; k < M; ++k) iw[k] = window[k];
    const cdouble r_hat = cancel_si(y, c, iw);
    REQUIRE(r_hat == r[t] + w[t]);
  }
}

TEST_CASE("perfect-CSI cancellation on Gaussian data is exact to rounding") {
  auto rng = make_stream(3, {});
  const std::size_t n = 2000, M = 30;
  CVec c(M), i(n);
  for (auto& v : c) v = complex_gaussian(rng, 1.0 / M);
  for (auto& v : i) v = complex_gaussian(rng, 1.0);
  PdpSpec pdp;
  pdp.profile.assign(M, 1.0 / M);
  pdp.static_mask.assign(M, true);
  TapTrajectory traj(n, M, pdp, 0.0);
  for (std::size_t t = 0; t < n; ++t) std::copy(c.begin(), c.end(), traj.at(t).begin());
  CVec x(n, 1.0);
  PdpSpec rp;
  rp.profile = {0.01};
  rp.static_mask = {true};
  TapTrajectory rtraj(n, 1, rp, 0.0);
  for (std::size_t t = 0; t < n; ++t) rtraj.at(t)[0] = 0.1;
  const auto rx = synthesize_received(i, x, traj, rtraj, NoiseSpec{-35.0}, rng);
  History<cdouble> window(M);
  for (std::size_t t = 0; t < n; ++t) {
    window.push(i[t]);
    CVec iw(M);
    for (std::size_t k = 0; k < M; ++k) iw[k] = window[k];
    const cdouble r_hat = cancel_si(rx.y[t], c, iw);
    // The canceller rebuilds s[t] bit for bit ...
    REQUIRE(rx.y[t] - r_hat == rx.y[t] - (rx.y[t] - rx.s[t]));
    // ... so the residual differs from r + w only by the rounding of y.
    REQUIRE(std::abs(r_hat - (rx.r[t] + rx.w[t])) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                         std::abs(rx.y[t]));
  }
}

TEST_CASE("estimation error of -20 dB leaves -20 dB residual SI") {
  auto rng = make_stream(4, {});
  const std::size_t M = 30, n = 100000;
  CVec c(M), err(M);
  double e2 = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    c[k] = complex_gaussian(rng, 1.0 / M);
    err[k] = complex_gaussian(rng, 1.0);
    e2 += std::norm(err[k]);
  }
  CVec c_hat(M);
  for (std::size_t k = 0; k < M; ++k) c_hat[k] = c[k] + err[k] * std::sqrt(0.01 / e2);
  History<cdouble> window(M);
  double residual = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    window.push(complex_gaussian(rng, 1.0));
    CVec iw(M);
    cdouble s{};
    for (std::size_t k = 0; k < M; ++k) {
      iw[k] = window[k];
      s += std::conj(c[k]) * iw[k];
    }
    residual += std::norm(cancel_si(s, c_hat, iw));
  }
  CHECK(linear_to_db(residual / n) == doctest::Approx(-20.0).epsilon(0.01));
}

TEST_CASE("damp") {
  const CVec prev{cdouble(1, 2), cdouble(-3, 0.5)};
  const CVec hat{cdouble(0.5, -1), cdouble(2, 2)};
  CHECK(damp(prev, hat, 1.0) == hat);
  CHECK(damp(prev, hat, 0.0) == prev);
  CHECK(damp(CVec{0.0}, CVec{2.0}, 0.5) == CVec{1.0});
  CHECK_THROWS_AS(damp(prev, hat, 1.5), InvalidArgument);
  CHECK_THROWS_AS(damp(prev, hat, -0.01), InvalidArgument);
  CHECK_THROWS_AS(damp(prev, CVec{1.0}, 0.5), InvalidArgument);
}

TEST_CASE("damp contracts toward the new estimate") {
  auto rng = make_stream(5, {});
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    CVec a(7), h(7);
    for (auto& v : a) v = complex_gaussian(rng, 1.0);
    for (auto& v : h) v = complex_gaussian(rng, 1.0);
    const auto out = damp(a, h, mu);
    double d_out = 0.0, d_in = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
      d_out += std::norm(out[k] - h[k]);
      d_in += std::norm(a[k] - h[k]);
    }
    CHECK(std::sqrt(d_out) == doctest::Approx((1.0 - mu) * std::sqrt(d_in)).epsilon(1e-12));
  }
}

TEST_CASE("History ring buffer") {
  History<int> h(3);
  CHECK(h[0] == 0);
  h.push(1);
  h.push(2);
  h.push(3);
  CHECK(h[0] == 3);
  CHECK(h[2] == 1);
  h.push(4);
  CHECK(h[0] == 4);
  CHECK(h[1] == 3);
  CHECK(h[2] == 2);
}

TEST_CASE("ideal receiver, noiseless static channels: no errors after warm-up") {
  ReceiverConfig cfg;
  cfg.noise_power = 0.0;
  const auto link = make_static_link(30, 70, 3000, 1.0, 0.01, 0.0, 11);
  Receiver rx(cfg, ReceiverMode::Ideal, std::span(link.x).first(130));
  const auto st = run(rx, link, 130 + 70 + 69);
  CHECK(st.decisions == 3000 - 269 - 69);  // the last delay symbols are never output
  CHECK(st.errors == 0);
}

TEST_CASE("ideal receiver requires the true channels") {
  Receiver rx(ReceiverConfig{}, ReceiverMode::Ideal, CVec(130, 1.0));
  CHECK_THROWS_AS(rx.cycle(1.0, 1.0, nullptr), InvalidArgument);
  const CVec c(30), h(69);
  const ChannelTruth wrong{c, h};
  CHECK_THROWS_AS(rx.cycle(1.0, 1.0, &wrong), InvalidArgument);
}

TEST_CASE("receiver rejects a short training block") {
  CHECK_THROWS_AS(Receiver(ReceiverConfig{}, ReceiverMode::Proposed, CVec(10, 1.0)), InvalidArgument);
}

TEST_CASE("cycle bookkeeping") {
  const auto cfg = small_config();
  const auto link = make_static_link(6, 8, 200, 1.0, 0.1, 1e-4, 12);
  Receiver rx(cfg, ReceiverMode::Proposed, std::span(link.x).first(60));
  for (std::size_t n = 0; n < link.y.size(); ++n) {
    const auto out = rx.cycle(link.y[n], link.i[n]);
    const long ln = static_cast<long>(n);
    CHECK(out.n == ln);
    CHECK(out.detected_index == ln - 7);
    // Nothing is emitted during cold start or while training symbols are fed back.
    CHECK(out.detected.has_value() == (ln - 7 >= 60));
    CHECK(out.estimate_index == (ln >= 8 ? ln - 8 : -1));
  }
  CHECK(rx.cycles() == 200);
}

TEST_CASE("proposed receiver tracks static channels") {
  ReceiverConfig cfg;
  cfg.noise_power = std::pow(10.0, -3.5);
  const auto link = make_static_link(30, 70, 6000, 1.0, 0.01, cfg.noise_power, 13);
  Receiver rx(cfg, ReceiverMode::Proposed, std::span(link.x).first(130));
  const auto st = run(rx, link, 269);
  CHECK(st.errors == 0);
  CHECK(st.c_err < 1e-3);          // relative to ||c||^2 = 1
  CHECK(st.h_err / 0.01 < 0.1);
  double hb = 0.0;
  for (std::size_t k = 0; k < 70; ++k) hb += std::norm(rx.h_bar()[k] - link.h[k]);
  CHECK(hb < st.h_err);  // damping removes estimation noise on a static channel
  CHECK(rx.rls().resets == 0);
}

TEST_CASE("proposed receiver with perfect feedback converges on a noiseless channel") {
  auto cfg = small_config();
  cfg.noise_power = 0.0;
  const auto link = make_static_link(6, 8, 400, 1.0, 0.1, 0.0, 14);
  // All symbols known: feedback is always correct.
  cfg.training_symbols = 400;
  Receiver rx(cfg, ReceiverMode::Proposed, link.x);
  const auto st = run(rx, link, 0);
  CHECK(std::sqrt(st.c_err + st.h_err) < 1e-6);
}

TEST_CASE("conventional receiver freezes the training least-squares fit") {
  auto cfg = small_config();
  cfg.noise_power = 1e-4;
  const auto link = make_static_link(6, 8, 400, 1.0, 0.1, 1e-4, 15);
  Receiver rx(cfg, ReceiverMode::Conventional, std::span(link.x).first(60));

  // Oracle: joint LS over the training rows with the same regularisation.
  std::vector<Eigen::VectorXcd> rows;
  CVec ys;
  for (std::size_t n = 0; n < 60; ++n) {
    Eigen::VectorXcd v(14);
    for (int l = 0; l < 8; ++l) v(l) = n >= static_cast<std::size_t>(l) ? link.x[n - l] : cdouble{};
    for (int m = 0; m < 6; ++m) v(8 + m) = n >= static_cast<std::size_t>(m) ? link.i[n - m] : cdouble{};
    rows.push_back(v);
    ys.push_back(link.y[n]);
  }
  const auto u = oracle::batch_ls(rows, ys, cfg.delta);

  const ChannelTruth truth{link.c, link.h};
  for (std::size_t n = 0; n < 60; ++n) rx.cycle(link.y[n], link.i[n], &truth);
  CVec frozen(rx.h_hat().begin(), rx.h_hat().end());
  for (int l = 0; l < 8; ++l) CHECK(std::abs(frozen[static_cast<std::size_t>(l)] - u(l)) < 1e-9);
  for (std::size_t n = 60; n < 400; ++n) rx.cycle(link.y[n], link.i[n], &truth);
  for (int l = 0; l < 8; ++l) CHECK(rx.h_hat()[static_cast<std::size_t>(l)] == frozen[static_cast<std::size_t>(l)]);
  CHECK(rx.rls().dim() == 6);
}

TEST_CASE("conventional SI estimate is biased by the remote signal") {
  ReceiverConfig cfg;
  const auto link = make_static_link(30, 70, 5000, 1.0, 0.01, std::pow(10.0, -3.5), 16);
  Receiver conv(cfg, ReceiverMode::Conventional, std::span(link.x).first(130));
  Receiver prop(cfg, ReceiverMode::Proposed, std::span(link.x).first(130));
  const auto sc = run(conv, link, 269);
  const auto sp = run(prop, link, 269);
  CHECK(sc.c_err > 3.0 * sp.c_err);
}

TEST_CASE("redesign interval changes only the cadence") {
  auto cfg = small_config();
  const auto link = make_static_link(6, 8, 600, 1.0, 0.1, 1e-4, 17);
  cfg.redesign_interval = 25;
  Receiver rx(cfg, ReceiverMode::Proposed, std::span(link.x).first(60));
  const auto st = run(rx, link, 60 + 8 + 7);
  CHECK(st.errors == 0);
  cfg.redesign_interval = 0;
  CHECK_THROWS_AS(Receiver(cfg, ReceiverMode::Proposed, std::span(link.x).first(60)), InvalidArgument);
}
