#include "gapsol/gmres.hpp"

#include <cmath>
#include <vector>

namespace gapsol {

GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precondition,
                  const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol, int restart,
                  int max_iter) {
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const Eigen::Index n = b.size();
  Eigen::MatrixXd V(n, restart + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
  std::vector<double> cs(restart), sn(restart);
  Eigen::VectorXd s(restart + 1);

  while (res.iterations < max_iter) {
    Eigen::VectorXd r = b - apply(x);
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    V.col(0) = r / beta;
    s.setZero();
    s[0] = beta;
    H.setZero();
    int j = 0;
    for (; j < restart && res.iterations < max_iter; ++j) {
      ++res.iterations;
      Eigen::VectorXd w = apply(precondition(V.col(j)));
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = den == 0.0 ? 1.0 : H(j, j) / den;
      sn[j] = den == 0.0 ? 0.0 : H(j + 1, j) / den;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      s[j + 1] = -sn[j] * s[j];
      s[j] = cs[j] * s[j];
      res.relative_residual = std::abs(s[j + 1]) / bnorm;
      if (res.relative_residual <= rel_tol || den == 0.0) {
        ++j;
        break;
      }
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(s.head(j));
    x += precondition(V.leftCols(j) * y);
  }
  const double true_rel = (b - apply(x)).norm() / bnorm;
  res.relative_residual = true_rel;
  res.converged = true_rel <= rel_tol;
  return res;
}

}  // namespace gapsol
