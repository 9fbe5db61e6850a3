#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "imscat/forward.hpp"
#include "imscat/grid.hpp"
#include "imscat/jacobian.hpp"

namespace imscat {

/// CSV with header `m1,m2,x,y,re_q,im_q`; m1 varies fastest.
void write_medium_csv(const std::filesystem::path& path, const Medium& medium);
Medium read_medium_csv(const std::filesystem::path& path, const CellGrid& grid);

/// Sidecar record accompanying farfield.csv.
struct FarFieldMeta {
  double k = 0.0;
  int J = 0;
  int N = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double S = 0.0;
  int M = 0;
  int fine_grid = 0;
  double period = 0.0;
  std::string shape;
  std::string rng = "splitmix64-counter/box-muller";
};

/// CSV `j,n,re,im` with 1-based direction indices, n slowest.
void write_farfield_csv(const std::filesystem::path& path, const FarFieldSet& data);
FarFieldSet read_farfield_csv(const std::filesystem::path& path, int obs_count, int inc_count);

void write_farfield_meta(const std::filesystem::path& path, const FarFieldMeta& meta);
FarFieldMeta read_farfield_meta(const std::filesystem::path& path);

/// CSV `n,j,m,re,im` dump of the derivative blocks (1-based n, j; 0-based cell index m).
void write_jacobian_csv(const std::filesystem::path& path, const LinearizedOperator& op);

/// Shortest decimal text that round-trips a double.
std::string format_double(double v);

}  // namespace imscat
