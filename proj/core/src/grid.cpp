#include "imscat/grid.hpp"

#include <cmath>

namespace imscat {

CellGrid::CellGrid(double half_width, int divisions) : half_width_(half_width), divisions_(divisions) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("CellGrid: half width S must be positive");
  }
  if (divisions < 1) {
    throw std::invalid_argument("CellGrid: divisions M must be >= 1");
  }
  const int n = cells_per_axis();
  centers_.reserve(static_cast<std::size_t>(n) * n);
  const double scale = half_width / (2.0 * divisions);
  for (int m2 = -divisions; m2 < divisions; ++m2) {
    for (int m1 = -divisions; m1 < divisions; ++m1) {
      centers_.emplace_back((2 * m1 + 1) * scale, (2 * m2 + 1) * scale);
    }
  }
}

std::size_t CellGrid::index(int m1, int m2) const {
  if (m1 < -divisions_ || m1 >= divisions_ || m2 < -divisions_ || m2 >= divisions_) {
    throw std::out_of_range("CellGrid::index: cell index out of range");
  }
  return static_cast<std::size_t>(m2 + divisions_) * cells_per_axis() + static_cast<std::size_t>(m1 + divisions_);
}

CellGrid make_grid(double half_width, int divisions) { return CellGrid(half_width, divisions); }

DirectionSet::DirectionSet(int count) {
  if (count < 1) throw std::invalid_argument("DirectionSet: count must be >= 1");
  dirs_.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    // Reduce to (-pi, pi] so full and half turns come out exact.
    int m = n % count;
    if (2 * m > count) m -= count;
    const double angle = 2.0 * kPi * m / count;
    dirs_.emplace_back(std::cos(angle), std::sin(angle));
  }
}

DirectionSet make_directions(int count) { return DirectionSet(count); }

Medium::Medium(CellGrid grid) : grid_(std::move(grid)), values_(CVector::Zero(static_cast<Eigen::Index>(grid_.size()))) {}

Medium::Medium(CellGrid grid, CVector values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw DimensionMismatch("Medium: value count does not match the grid");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("Medium: values must be finite");
  }
}

bool Medium::is_physical() const { return (values_.imag().array() >= 0.0).all(); }

ShapeTag parse_shape(const std::string& name) {
  if (name == "b1" || name == "B1") return ShapeTag::B1;
  if (name == "b2" || name == "B2") return ShapeTag::B2;
  throw std::invalid_argument("unsupported shape '" + name + "' (expected b1 or b2)");
}

std::string shape_name(ShapeTag tag) { return tag == ShapeTag::B1 ? "b1" : "b2"; }

bool shape_contains(ShapeTag tag, const Vec2& x) {
  const double x1 = x.x();
  const double x2 = x.y();
  switch (tag) {
    case ShapeTag::B1:
      return x1 * x1 + x2 * x2 < 1.5;
    case ShapeTag::B2:
      return (x1 + 1.5) * (x1 + 1.5) + (x2 + 1.5) * (x2 + 1.5) < 1.0 ||
             (1.0 < x1 && x1 < 2.0 && -2.0 < x2 && x2 < 2.0) ||
             (-2.0 < x1 && x1 < 2.0 && -2.0 < x2 && x2 < -1.0);
  }
  throw std::invalid_argument("shape_contains: unsupported shape tag");
}

Medium characteristic_medium(const ShapeId& shape, const CellGrid& grid) {
  if (shape.tag != ShapeTag::B1 && shape.tag != ShapeTag::B2) {
    throw std::invalid_argument("characteristic_medium: unsupported shape tag");
  }
  CVector values = CVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (shape_contains(shape.tag, grid.center(i))) values[static_cast<Eigen::Index>(i)] = shape.contrast;
  }
  return Medium(grid, std::move(values));
}

double mse(const Medium& a, const Medium& b) {
  if (!(a.grid() == b.grid())) throw DimensionMismatch("mse: media live on different grids");
  return (a.values() - b.values()).squaredNorm();
}

}  // namespace imscat
