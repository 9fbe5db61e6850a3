#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "imscat/grid.hpp"
#include "imscat/types.hpp"

namespace imscat {

/// Periodization cell and node lattice used by the Lippmann-Schwinger solver.
///
/// Nodes sit at subcell midpoints -L/2 + (i + 1/2) h, h = L / n, so every
/// coarse cell of the CellGrid holds exactly refine x refine nodes and no node
/// lies on a cell edge. Only the (2 M refine)^2 nodes inside [-S, S]^2 (the
/// "support nodes") carry unknowns. The kernel is truncated to the disk of
/// radius L - 2S, which keeps the periodized kernel exact for every pair of
/// support nodes whenever L >= (2 + 2 sqrt 2) S.
class FineGrid {
 public:
  FineGrid(const CellGrid& coarse, int nodes_per_axis, double period);

  int nodes_per_axis() const { return n_; }
  double period() const { return period_; }
  double spacing() const { return period_ / n_; }
  double node_area() const { return spacing() * spacing(); }
  int refine() const { return refine_; }
  int support_per_axis() const { return support_; }
  std::size_t support_size() const { return static_cast<std::size_t>(support_) * support_; }
  double truncation_radius() const { return radius_; }
  double half_width() const { return half_width_; }
  int divisions() const { return divisions_; }

  /// True when the truncated kernel equals the free-space kernel for all support pairs.
  bool exact_on_support() const;

  /// Coordinates of support node s (flat index, a fastest).
  const Vec2& node(std::size_t s) const { return nodes_[s]; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  /// Coarse cell index owning support node s.
  std::size_t cell_of(std::size_t s) const { return owner_[s]; }

  bool operator==(const FineGrid& o) const {
    return n_ == o.n_ && period_ == o.period_ && half_width_ == o.half_width_ && divisions_ == o.divisions_;
  }

 private:
  int n_;
  double period_;
  double half_width_;
  int divisions_;
  int refine_;
  int support_;
  double radius_;
  std::vector<Vec2> nodes_;
  std::vector<std::size_t> owner_;
};

/// Default periodization cell side, in units of S.
inline constexpr double kDefaultPeriodFactor = 8.0;

FineGrid make_fine_grid(const CellGrid& coarse, int nodes_per_axis, double period_factor = kDefaultPeriodFactor);

/// Fourier transform of the fundamental solution (i/4) H0(k|x|) truncated to
/// the disk |x| < R, evaluated at frequency magnitude rho.
Complex truncated_kernel_transform(double k, double radius, double rho);

/// Periodized, truncated Helmholtz kernel acting on support-node vectors:
/// (G v)_l = sum_m g(x_l - x_m) v_m, where g carries the node quadrature weight.
/// The product is applied through a zero-padded FFT of size 2 x support.
class KernelOperator {
 public:
  KernelOperator(const FineGrid& fine, double k);
  ~KernelOperator();
  KernelOperator(const KernelOperator&) = delete;
  KernelOperator& operator=(const KernelOperator&) = delete;

  double wavenumber() const { return k_; }
  const FineGrid& fine() const { return fine_; }

  /// Convolution weight g_d for node offset d = (dx, dy), |dx|, |dy| < support.
  Complex weight(int dx, int dy) const;

  void apply(const CVector& v, CVector& out) const;

 private:
  FineGrid fine_;
  double k_;
  int pad_;
  std::vector<Complex> weights_;   // (2 support - 1)^2 offsets
  std::vector<Complex> spectrum_;  // pad_^2 FFT of the embedded weights
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace imscat
