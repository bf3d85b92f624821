#include "wrm/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>

namespace wrm {

std::vector<double> jacobi_eigenvalues(const RealMatrix& a, double tol, std::size_t max_sweeps) {
  if (a.rows() != a.cols()) throw DimensionError("jacobi_eigenvalues: matrix must be square");
  std::size_t n = a.rows();
  std::vector<double> m = a.data();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  double scale = 0.0;
  for (double x : m) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
    if (off <= tol * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace wrm
