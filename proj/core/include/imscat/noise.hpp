#pragma once

#include <cstdint>

#include "imscat/forward.hpp"

namespace imscat {

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Counter-based uniform draw in (0, 1]: a pure function of (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Complex Gaussian with independent N(0, sigma^2) real and imaginary parts,
/// drawn by Box-Muller from counters 2c and 2c + 1.
Complex complex_gaussian(std::uint64_t seed, std::uint64_t counter, double sigma);

/// Adds CN(0, sigma^2) noise to every entry; entry (j, n) uses counter n * J + j.
/// sigma == 0 returns the input unchanged.
FarFieldSet add_noise(const FarFieldSet& clean, const NoiseModel& model);

}  // namespace imscat
