#include <doctest.h>

#include "uwfd/metrics.hpp"

using namespace uwfd;

namespace {

TapTrajectory random_trajectory(std::size_t n, std::size_t taps, std::uint64_t seed) {
  PdpSpec pdp;
  pdp.profile.assign(taps, 1.0);
  pdp.static_mask.assign(taps, false);
  auto rng = make_stream(seed, {});
  return gen_tap_trajectory(pdp, 10.0, n, 5000.0, rng);
}

}  // namespace

TEST_CASE("normalized_channel_mse basics") {
  const auto t = random_trajectory(500, 4, 1);
  CHECK(normalized_channel_mse(t, t) == 0.0);
  TapTrajectory zero(500, 4, t.pdp(), 1.0);
  CHECK(normalized_channel_mse(t, zero) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(normalized_channel_mse(zero, t), InvalidArgument);
  const auto other = random_trajectory(500, 3, 2);
  CHECK_THROWS_AS(normalized_channel_mse(t, other), InvalidArgument);
}

TEST_CASE("normalized_channel_mse honours window and shift") {
  const auto t = random_trajectory(300, 2, 3);
  // Estimate row t + 5 holds truth row t.
  TapTrajectory lagged(300, 2, t.pdp(), 1.0);
  for (std::size_t n = 0; n + 5 < 300; ++n)
    std::copy(t.at(n).begin(), t.at(n).end(), lagged.at(n + 5).begin());
  CHECK(normalized_channel_mse(t, lagged, 0, 5) == 0.0);
  CHECK(normalized_channel_mse(t, lagged, 0, 0) > 0.0);
  // Scale errors: estimate = 0.9 truth gives 0.01 regardless of window.
  TapTrajectory scaled(300, 2, t.pdp(), 1.0);
  for (std::size_t n = 0; n < 300; ++n)
    for (std::size_t k = 0; k < 2; ++k) scaled.at(n)[k] = 0.9 * t.tap(n, k);
  CHECK(normalized_channel_mse(t, scaled, 100) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("NmseAccumulator merge is order independent") {
  auto rng = make_stream(4, {});
  NmseAccumulator a, b, all;
  for (int i = 0; i < 50; ++i) {
    CVec t(3), e(3);
    for (auto& v : t) v = complex_gaussian(rng, 1.0);
    for (auto& v : e) v = complex_gaussian(rng, 1.0);
    (i % 2 ? a : b).add(t, e);
    all.add(t, e);
  }
  NmseAccumulator ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  CHECK(ab.value() == doctest::Approx(all.value()).epsilon(1e-14));
  CHECK(ba.value() == doctest::Approx(all.value()).epsilon(1e-14));
  CHECK(ab.count() == 50);
  CHECK_THROWS_AS(NmseAccumulator{}.value(), InvalidArgument);
  CHECK_THROWS_AS(all.add(CVec(3), CVec(2)), InvalidArgument);
}

TEST_CASE("residual_mse") {
  auto rng = make_stream(5, {});
  const std::size_t n = 200000;
  CVec r(n), r_hat(n);
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = complex_gaussian(rng, 0.01);
    r_hat[k] = r[k] + complex_gaussian(rng, 0.001);
  }
  CHECK(residual_mse(r, r, 0) == 0.0);
  CHECK(residual_mse(r, r_hat, 0) == doctest::Approx(0.1).epsilon(0.02));
  CHECK(residual_mse(r, r_hat, n / 2) == doctest::Approx(0.1).epsilon(0.03));
  CHECK_THROWS_AS(residual_mse(CVec(10), CVec(10), 0), InvalidArgument);
  CHECK_THROWS_AS(residual_mse(CVec(10), CVec(9), 0), InvalidArgument);
}

TEST_CASE("ErrorCount") {
  ErrorCount e;
  CHECK(e.ber() == 0.0);
  e += ErrorCount{5, 1000};
  e += ErrorCount{15, 1000};
  CHECK(e.ber() == doctest::Approx(0.01));
  CHECK(e.reliable());
  CHECK_FALSE((ErrorCount{19, 10}).reliable());
}
