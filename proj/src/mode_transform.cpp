#include "mode_transform.hpp"

#include <cmath>
#include <string>

namespace cavnet {

std::string physical_mode_label(PhysicalMode mode, Polarization p) {
  std::string label;
  switch (mode) {
    case PhysicalMode::Cavity1: label = "cav1"; break;
    case PhysicalMode::Cavity2: label = "cav2"; break;
    case PhysicalMode::Cavity3: label = "cav3"; break;
    case PhysicalMode::Fiber1: label = "fib1"; break;
    case PhysicalMode::Fiber2: label = "fib2"; break;
  }
  label += '.';
  label += polarization_suffix(p);
  return label;
}

const ModeTransform& mode_transform_matrix() {
  static const ModeTransform transform = [] {
    const double s3 = std::sqrt(3.0);
    ModeTransform t;
    // columns: a1, a2, a3, b1, b2
    t.matrix << 2.0, 1.0, 1.0, s3, s3,
                2.0, 1.0, 1.0, -s3, -s3,
                0.0, -1.0, 1.0, -1.0, 1.0,
                0.0, -1.0, 1.0, 1.0, -1.0,
                -1.0, 1.0, 1.0, 0.0, 0.0;
    t.matrix.row(0) /= 2.0 * s3;
    t.matrix.row(1) /= 2.0 * s3;
    t.matrix.row(2) /= 2.0;
    t.matrix.row(3) /= 2.0;
    t.matrix.row(4) /= s3;
    return t;
  }();
  return transform;
}

double hopping_eigenvalue(Branch n) { return branch_value(n); }

}  // namespace cavnet
