#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "imscat/types.hpp"

namespace imscat {

struct GmresResult {
  CVector x;
  bool converged = false;
  int iterations = 0;
  /// Relative residual estimate after each inner iteration.
  std::vector<double> history;
};

/// Restarted GMRES (modified Gram-Schmidt Arnoldi, Givens rotations) for
/// A x = b with A given as a matrix-free product. Convergence is declared on
/// the Arnoldi residual estimate ||b - A x|| / ||b|| <= tol.
inline GmresResult gmres(const std::function<void(const CVector&, CVector&)>& apply, const CVector& b,
                         CVector x0, double tol, int restart, int max_iter) {
  GmresResult out;
  out.x = std::move(x0);
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x.setZero(n);
    out.converged = true;
    return out;
  }
  const int m = std::max(1, restart);
  CVector r(n);
  CVector w(n);
  CMatrix basis(n, m + 1);
  CMatrix hess = CMatrix::Zero(m + 1, m);
  std::vector<Complex> cs(static_cast<std::size_t>(m));
  std::vector<Complex> sn(static_cast<std::size_t>(m));
  CVector g(m + 1);

  while (out.iterations < max_iter) {
    apply(out.x, w);
    r = b - w;
    double beta = r.norm();
    if (beta / bnorm <= tol) {
      out.converged = true;
      return out;
    }
    basis.col(0) = r / beta;
    hess.setZero();
    g.setZero();
    g[0] = beta;
    int used = 0;
    for (int j = 0; j < m && out.iterations < max_iter; ++j) {
      apply(basis.col(j), w);
      for (int i = 0; i <= j; ++i) {
        const Complex h = basis.col(i).dot(w);
        hess(i, j) = h;
        w -= h * basis.col(i);
      }
      const double hnext = w.norm();
      hess(j + 1, j) = hnext;
      if (hnext > 0.0) basis.col(j + 1) = w / hnext;
      for (int i = 0; i < j; ++i) {
        const Complex a = hess(i, j);
        const Complex c = hess(i + 1, j);
        hess(i, j) = std::conj(cs[i]) * a + std::conj(sn[i]) * c;
        hess(i + 1, j) = -sn[i] * a + cs[i] * c;
      }
      const Complex a = hess(j, j);
      const double c = std::abs(hess(j + 1, j));
      const double rho = std::hypot(std::abs(a), c);
      if (rho == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = a / rho;
        sn[j] = hess(j + 1, j) / rho;
      }
      hess(j, j) = rho;
      hess(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      ++used;
      ++out.iterations;
      const double estimate = std::abs(g[j + 1]) / bnorm;
      out.history.push_back(estimate);
      if (estimate <= tol || hnext == 0.0) break;
    }
    const CVector y = hess.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    out.x += basis.leftCols(used) * y;
  }
  apply(out.x, w);
  out.converged = (b - w).norm() / bnorm <= tol;
  return out;
}

}  // namespace imscat
