#pragma once

#include <cstddef>
#include <vector>

#include "imscat/forward.hpp"
#include "imscat/jacobian.hpp"

namespace imscat {

/// A_n(phi) and A'_n[phi] for every measurement block n.
struct Linearization {
  std::vector<CVector> values;
  std::vector<CMatrix> blocks;
};

/// A_n(phi) and A'_n[phi] for a single block.
struct BlockLinearization {
  CVector value;
  CMatrix jacobian;
};

/// Nonlinear observation operators A_1 .. A_N on a common state space.
/// The reconstruction algorithms only see the model through this interface.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t block_count() const = 0;
  virtual std::size_t block_size() const = 0;

  virtual Linearization linearize(const CVector& phi) const = 0;
  virtual BlockLinearization linearize_block(const CVector& phi, std::size_t n) const = 0;
};

/// A_n(phi) = matrices[n] * phi + offsets[n]; used for surrogate checks.
class LinearObservation final : public ObservationModel {
 public:
  explicit LinearObservation(std::vector<CMatrix> matrices, std::vector<CVector> offsets = {});

  std::size_t state_dim() const override;
  std::size_t block_count() const override { return matrices_.size(); }
  std::size_t block_size() const override;

  Linearization linearize(const CVector& phi) const override;
  BlockLinearization linearize_block(const CVector& phi, std::size_t n) const override;

 private:
  std::vector<CMatrix> matrices_;
  std::vector<CVector> offsets_;
};

/// Far-field map: state = cell contrast, block n = far field for theta_n.
class ScatteringObservation final : public ObservationModel {
 public:
  ScatteringObservation(const ForwardModel& model, int obs_count, int inc_count);

  std::size_t state_dim() const override { return model_.grid().size(); }
  std::size_t block_count() const override { return static_cast<std::size_t>(inc_dirs_.count()); }
  std::size_t block_size() const override { return static_cast<std::size_t>(obs_dirs_.count()); }

  Linearization linearize(const CVector& phi) const override;
  BlockLinearization linearize_block(const CVector& phi, std::size_t n) const override;

  const ForwardModel& model() const { return model_; }

 private:
  const ForwardModel& model_;
  DirectionSet obs_dirs_;
  DirectionSet inc_dirs_;
};

}  // namespace imscat
