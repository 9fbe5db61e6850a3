#include "imscat/noise.hpp"

#include <cmath>

namespace imscat {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

Complex complex_gaussian(std::uint64_t seed, std::uint64_t counter, double sigma) {
  const double u1 = counter_uniform(seed, 2 * counter);
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  const double radius = sigma * std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

FarFieldSet add_noise(const FarFieldSet& clean, const NoiseModel& model) {
  if (!(model.sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be >= 0");
  FarFieldSet out = clean;
  out.sigma = model.sigma;
  if (model.sigma == 0.0) return out;
  const auto rows = static_cast<std::uint64_t>(clean.values.rows());
  for (Eigen::Index n = 0; n < clean.values.cols(); ++n) {
    for (Eigen::Index j = 0; j < clean.values.rows(); ++j) {
      const std::uint64_t counter = static_cast<std::uint64_t>(n) * rows + static_cast<std::uint64_t>(j);
      out.values(j, n) += complex_gaussian(model.seed, counter, model.sigma);
    }
  }
  return out;
}

}  // namespace imscat
