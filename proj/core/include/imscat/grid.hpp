#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imscat/types.hpp"

namespace imscat {

/// Uniform cell grid on [-S, S]^2 with 2M cells per axis.
///
/// Cells are indexed by (m1, m2) with -M <= m1, m2 <= M-1; the flat index
/// runs over m1 fastest: idx = (m2 + M) * 2M + (m1 + M).
class CellGrid {
 public:
  CellGrid(double half_width, int divisions);

  double half_width() const { return half_width_; }
  int divisions() const { return divisions_; }
  int cells_per_axis() const { return 2 * divisions_; }
  std::size_t size() const { return centers_.size(); }
  double cell_size() const { return half_width_ / divisions_; }
  double cell_area() const { return cell_size() * cell_size(); }

  std::size_t index(int m1, int m2) const;
  int m1_of(std::size_t idx) const { return static_cast<int>(idx % cells_per_axis()) - divisions_; }
  int m2_of(std::size_t idx) const { return static_cast<int>(idx / cells_per_axis()) - divisions_; }

  const Vec2& center(std::size_t idx) const { return centers_[idx]; }
  Vec2 center(int m1, int m2) const { return centers_[index(m1, m2)]; }
  const std::vector<Vec2>& centers() const { return centers_; }

  bool operator==(const CellGrid& other) const {
    return half_width_ == other.half_width_ && divisions_ == other.divisions_;
  }

 private:
  double half_width_;
  int divisions_;
  std::vector<Vec2> centers_;
};

CellGrid make_grid(double half_width, int divisions);

/// Equispaced unit vectors; vector n (1-based) has angle 2*pi*n/count.
class DirectionSet {
 public:
  explicit DirectionSet(int count);

  int count() const { return static_cast<int>(dirs_.size()); }
  /// Direction n for n in [1, count].
  const Vec2& operator()(int n) const { return dirs_.at(static_cast<std::size_t>(n - 1)); }
  /// Zero-based access.
  const Vec2& at(std::size_t i) const { return dirs_.at(i); }
  const std::vector<Vec2>& vectors() const { return dirs_; }

 private:
  std::vector<Vec2> dirs_;
};

DirectionSet make_directions(int count);

/// Piecewise-constant complex contrast on a CellGrid.
///
/// Reconstruction iterates share this type, so construction checks only
/// finiteness; `is_physical` tests the Im q >= 0 condition.
class Medium {
 public:
  explicit Medium(CellGrid grid);
  Medium(CellGrid grid, CVector values);

  const CellGrid& grid() const { return grid_; }
  const CVector& values() const { return values_; }
  Complex operator[](std::size_t idx) const { return values_[static_cast<Eigen::Index>(idx)]; }
  std::size_t size() const { return grid_.size(); }

  bool is_physical() const;

 private:
  CellGrid grid_;
  CVector values_;
};

enum class ShapeTag { B1, B2 };

struct ShapeId {
  ShapeTag tag = ShapeTag::B1;
  Complex contrast{0.1, 0.0};
};

ShapeTag parse_shape(const std::string& name);
std::string shape_name(ShapeTag tag);

/// Membership of a point in the support of a test shape.
bool shape_contains(ShapeTag tag, const Vec2& x);

/// Characteristic function of the shape, decided at cell centers.
Medium characteristic_medium(const ShapeId& shape, const CellGrid& grid);

/// Squared Euclidean norm of the cellwise difference (unweighted).
double mse(const Medium& a, const Medium& b);

}  // namespace imscat
