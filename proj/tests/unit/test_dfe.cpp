#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uwfd/dfe.hpp"
#include "uwfd/random.hpp"

using namespace uwfd;

namespace {

CVec random_channel(Rng& rng, std::size_t len) {
  CVec g(len);
  for (std::size_t k = 0; k < len; ++k) g[k] = complex_gaussian(rng, std::exp(-0.25 * static_cast<double>(k)));
  return g;
}

double max_abs_diff(const CVec& a, const CVec& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// Runs a static channel noiselessly through the equalizer with true-symbol
/// or decision feedback and counts errors after the first delay outputs.
int count_errors(const CVec& g, const DfeDesign& d, std::size_t n_sym, Rng& rng) {
  CVec x(n_sym);
  for (auto& s : x) s = (rng() & 1) ? 1.0 : -1.0;
  DfeEqualizer eq(d);
  int errors = 0;
  for (std::size_t n = 0; n < n_sym; ++n) {
    cdouble z{};
    for (std::size_t k = 0; k < g.size() && k <= n; ++k) z += g[k] * x[n - k];
    const cdouble out = eq.step(z);
    const long idx = static_cast<long>(n) - d.delay;
    if (idx >= 0 && out != x[static_cast<std::size_t>(idx)]) ++errors;
  }
  return errors;
}

}  // namespace

TEST_CASE("single-tap channel gives the scalar MMSE weight") {
  for (double noise : {0.0, 0.01, 0.5, 2.0}) {
    const CVec g{1.0};
    const auto d = design_dfe(g, noise, 1, 0);
    REQUIRE(d.fff.size() == 1);
    CHECK(d.fbf.empty());
    CHECK(d.delay == 0);
    CHECK(std::abs(d.fff[0] - 1.0 / (1.0 + noise)) < 1e-8);
  }
}

TEST_CASE("two-tap noiseless design cancels all ISI") {
  const CVec g{1.0, 0.5};
  const auto d = design_dfe(g, 0.0, 8, 4);
  CHECK(d.delay == 7);
  const auto q = dfe_cascade(d, g);
  REQUIRE(q.size() == 9);
  for (int j = 1; j <= 4; ++j) {
    const std::size_t idx = static_cast<std::size_t>(7 + j);
    const cdouble post = idx < q.size() ? q[idx] : cdouble{};
    CHECK(d.fbf[static_cast<std::size_t>(j - 1)] == post);
  }
  // Decision-point response after feedback subtraction: unit at the delay,
  // nothing elsewhere.
  double isi = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    cdouble r = q[m];
    if (m > 7 && m <= 11) r -= d.fbf[m - 8];
    if (m == 7) r -= 1.0;
    isi = std::max(isi, std::abs(r));
  }
  CHECK(isi < 1e-6);
  const auto ref = oracle::mmse_dfe(g, 0.0, 8, 4, kDfeRidge);
  CHECK(max_abs_diff(d.fff, ref.fff) < 1e-9);
}

TEST_CASE("published equalizer lengths give delay 69") {
  auto rng = make_stream(1, {});
  const auto d = design_dfe(random_channel(rng, 70), 1e-3, 70, 50);
  CHECK(d.delay == 69);
  CHECK(d.fff.size() == 70);
  CHECK(d.fbf.size() == 50);
}

TEST_CASE("design matches the explicit matrix oracle") {
  auto rng = make_stream(2, {});
  struct Case {
    std::size_t len;
    int l_ff, l_fb;
    double noise;
  };
  for (const Case c : {Case{1, 1, 0, 0.0}, Case{2, 8, 4, 0.0}, Case{5, 12, 3, 0.01}, Case{5, 12, 0, 0.1},
                       Case{9, 6, 20, 1.0}, Case{20, 30, 25, 0.003}, Case{70, 70, 50, 3e-4},
                       Case{3, 1, 5, 0.5}}) {
    CAPTURE(c.len);
    CAPTURE(c.l_ff);
    CAPTURE(c.l_fb);
    const auto g = random_channel(rng, c.len);
    const auto d = design_dfe(g, c.noise + 1e-3, c.l_ff, c.l_fb);
    const auto ref = oracle::mmse_dfe(g, c.noise + 1e-3, c.l_ff, c.l_fb, kDfeRidge);
    double scale = 0.0;
    for (auto v : ref.fff) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(d.fff, ref.fff) < 1e-9 * scale);
    CHECK(max_abs_diff(d.fbf, ref.fbf) < 1e-9 * scale);
  }
}

TEST_CASE("cascade identity holds exactly for any design") {
  auto rng = make_stream(3, {});
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_channel(rng, 1 + rng() % 30);
    const int l_ff = 1 + static_cast<int>(rng() % 40);
    const int l_fb = static_cast<int>(rng() % 40);
    const auto d = design_dfe(g, 1e-2, l_ff, l_fb);
    const auto q = dfe_cascade(d, g);
    for (int j = 1; j <= l_fb; ++j) {
      const auto idx = static_cast<std::size_t>(d.delay + j);
      REQUIRE(d.fbf[static_cast<std::size_t>(j - 1)] == (idx < q.size() ? q[idx] : cdouble{}));
    }
  }
}

TEST_CASE("design_dfe argument checks") {
  CHECK_THROWS_AS(design_dfe(CVec{0.0, 0.0}, 0.0, 4, 2), InvalidArgument);
  CHECK_THROWS_AS(design_dfe(CVec{}, 0.1, 4, 2), InvalidArgument);
  CHECK_THROWS_AS(design_dfe(CVec{1.0}, 0.1, 0, 2), InvalidArgument);
  CHECK_THROWS_AS(design_dfe(CVec{1.0}, 0.1, 4, -1), InvalidArgument);
  CHECK_THROWS_AS(design_dfe(CVec{1.0}, -0.1, 4, 1), InvalidArgument);
}

TEST_CASE("identity channel equalizer is the slicer") {
  DfeEqualizer eq(DfeDesign{{1.0}, {}, 0});
  auto rng = make_stream(4, {});
  for (int n = 0; n < 200; ++n) {
    const cdouble r = complex_gaussian(rng, 1.0);
    CHECK(eq.step(r) == cdouble(r.real() >= 0 ? 1.0 : -1.0, 0.0));
  }
}

TEST_CASE("noiseless static two-tap channel: no errors after the delay") {
  const CVec g{cdouble(0.9, 0.1), cdouble(-0.4, 0.3)};
  auto rng = make_stream(5, {});
  CHECK(count_errors(g, design_dfe(g, 0.0, 8, 4), 5000, rng) == 0);
  CHECK(count_errors(g, design_dfe(g, 0.0, 70, 50), 5000, rng) == 0);
}

TEST_CASE("noiseless long channel with the published lengths") {
  auto rng = make_stream(6, {});
  const auto g = random_channel(rng, 70);
  CHECK(count_errors(g, design_dfe(g, 1e-6, 70, 50), 5000, rng) == 0);
}

TEST_CASE("slicer outputs are always +-1") {
  auto rng = make_stream(7, {});
  const auto g = random_channel(rng, 10);
  DfeEqualizer eq(design_dfe(g, 0.1, 12, 9));
  for (int n = 0; n < 1000; ++n) {
    const auto out = eq.step(complex_gaussian(rng, 4.0));
    REQUIRE((out == cdouble(1.0) || out == cdouble(-1.0)));
  }
}

TEST_CASE("decisions are invariant to positive scaling of the input") {
  auto rng = make_stream(8, {});
  CVec r(2000);
  for (auto& v : r) v = complex_gaussian(rng, 1.0);
  const CVec scales{1e-3, 0.5, 7.0, 1e4};
  SUBCASE("slicer") {
    for (const auto& v : r)
      for (auto c : scales) REQUIRE(bpsk_decide(v) == bpsk_decide(c.real() * v));
  }
  SUBCASE("feedforward-only equalizer") {
    const auto g = random_channel(rng, 15);
    const auto d = design_dfe(g, 0.05, 20, 0);
    for (auto c : scales) {
      DfeEqualizer a(d), b(d);
      for (const auto& v : r) REQUIRE(a.step(v) == b.step(c.real() * v));
    }
  }
  SUBCASE("DFE redesigned for the scaled channel") {
    // Feedback subtracts unit-power decisions, so the input scale must be
    // matched by the design: channel c*g with noise c^2*sigma^2.
    const auto g = random_channel(rng, 15);
    const double noise = 0.05;
    const auto d = design_dfe(g, noise, 20, 14);
    CVec z(r.size());
    CVec x(r.size());
    for (auto& s : x) s = (rng() & 1) ? 1.0 : -1.0;
    for (std::size_t n = 0; n < z.size(); ++n) {
      for (std::size_t k = 0; k < g.size() && k <= n; ++k) z[n] += g[k] * x[n - k];
      z[n] += std::sqrt(noise) * r[n];
    }
    for (double c : {0.5, 7.0, 30.0}) {
      CVec gc(g);
      for (auto& v : gc) v *= c;
      const auto dc = design_dfe(gc, c * c * noise, 20, 14);
      DfeEqualizer a(d), b(dc);
      for (const auto& v : z) REQUIRE(a.step(v) == b.step(c * v));
    }
  }
}

TEST_CASE("filter/commit allows external feedback") {
  const CVec g{1.0, 0.5};
  const auto d = design_dfe(g, 0.0, 4, 2);
  DfeEqualizer eq(d);
  // Feeding back the wrong symbol changes the next soft output by fbf[0]*2.
  DfeEqualizer eq2(d);
  const cdouble z0 = 1.0;
  eq.filter(z0);
  eq.commit(1.0);
  eq2.filter(z0);
  eq2.commit(-1.0);
  const cdouble s1 = eq.filter(0.2), s2 = eq2.filter(0.2);
  CHECK(std::abs((s2 - s1) - 2.0 * d.fbf[0]) < 1e-12);
}

TEST_CASE("bpsk_decide ties go to +1") {
  CHECK(bpsk_decide(0.0) == cdouble(1.0));
  CHECK(bpsk_decide(cdouble(-0.0, 5.0)) == cdouble(1.0));
  CHECK(bpsk_decide(cdouble(-1e-300, 0.0)) == cdouble(-1.0));
}
