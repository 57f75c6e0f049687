#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "uwfd/types.hpp"

namespace uwfd {

using Rng = std::mt19937_64;

/// Derives an independent stream from a root seed and a path of integer
/// labels, e.g. make_stream(seed, {point, trial, kStreamNoise}).
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Circular complex Gaussian sample with E|z|^2 = power.
cdouble complex_gaussian(Rng& rng, double power);

/// Real Gaussian sample with variance `power`.
double real_gaussian(Rng& rng, double power);

Bits random_bits(Rng& rng, std::size_t count);

}  // namespace uwfd
