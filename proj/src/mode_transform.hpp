#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

#include "params.hpp"

namespace cavnet {

// Physical modes of one polarization, in the column order of ModeTransform.
enum class PhysicalMode : int { Cavity1 = 0, Cavity2 = 1, Cavity3 = 2, Fiber1 = 3, Fiber2 = 4 };

inline constexpr std::array<PhysicalMode, 5> kPhysicalModes{PhysicalMode::Cavity1, PhysicalMode::Cavity2,
                                                            PhysicalMode::Cavity3, PhysicalMode::Fiber1,
                                                            PhysicalMode::Fiber2};

/// Subsystem label of a physical mode, e.g. "cav2.R" or "fib1.L".
std::string physical_mode_label(PhysicalMode mode, Polarization p);

/// Orthogonal map from (a₁, a₂, a₃, b₁, b₂) to the collective modes
/// (c₊√₃, c₋√₃, c₊, c₋, c₀), identical for both polarizations. Row r is the
/// branch with Branch value r; c_n = Σ_i matrix(n, i)·mode_i.
struct ModeTransform {
  Eigen::Matrix<double, 5, 5> matrix;

  double coefficient(Branch n, PhysicalMode mode) const {
    return matrix(static_cast<int>(n), static_cast<int>(mode));
  }
  Eigen::Matrix<double, 1, 5> row(Branch n) const { return matrix.row(static_cast<int>(n)); }

  /// Coefficient of c_n in the expansion of atom k's own cavity mode a_k.
  double cavity_weight(Branch n, int atom) const {
    return coefficient(n, static_cast<PhysicalMode>(atom - 1));
  }
};

const ModeTransform& mode_transform_matrix();

/// Eigenvalue of collective mode n under the hopping Hamiltonian, in units of ν.
double hopping_eigenvalue(Branch n);

}  // namespace cavnet
