#include "uwfd/random.hpp"

#include <cmath>
#include <vector>

namespace uwfd {

namespace {

// splitmix64 finalizer; spreads nearby labels across the seed space.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = mix(seed);
  for (auto label : path) state = mix(state ^ mix(label + 0x632be59bd9b4e019ULL));
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(state),
                                   static_cast<std::uint32_t>(state >> 32),
                                   static_cast<std::uint32_t>(path.size())};
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

cdouble complex_gaussian(Rng& rng, double power) {
  std::normal_distribution<double> n(0.0, std::sqrt(power / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double real_gaussian(Rng& rng, double power) {
  std::normal_distribution<double> n(0.0, std::sqrt(power));
  return n(rng);
}

Bits random_bits(Rng& rng, std::size_t count) {
  Bits bits(count);
  std::bernoulli_distribution coin(0.5);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return bits;
}

}  // namespace uwfd
