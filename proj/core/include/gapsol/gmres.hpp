#pragma once

#include <Eigen/Dense>
#include <functional>

namespace gapsol {

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Restarted GMRES for real A x = b with right preconditioning A M^{-1} y = b.
/// `apply` computes A v, `precondition` computes M^{-1} v. x holds the
/// initial guess on entry.
GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precondition,
                  const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol = 1e-12,
                  int restart = 120, int max_iter = 3000);

}  // namespace gapsol
