#pragma once

#include <cmath>

namespace gapsol {

/// Coefficients of i dPsi/dt = -c d2Psi/dx2 + V0 sin^2(x) Psi + g |Psi|^2 Psi.
///
/// `kinetic` is c. The default 1.0 is the convention under which the V0 = 4
/// first gap is [1.8898, 3.8591]. A negative c describes anomalous
/// dispersion, which is how the lattice-free envelope references are posed.
struct Model {
  double kinetic = 1.0;
  double lattice_depth = 4.0;
  double nonlinearity = 1.0;

  double potential(double x) const {
    const double s = std::sin(x);
    return lattice_depth * s * s;
  }
};

}  // namespace gapsol
