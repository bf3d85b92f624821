#pragma once

#include <vector>

#include "wrm/matrix.hpp"

namespace wrm {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Intended for the small matrices of the spectral property checks (n <= ~16).
std::vector<double> jacobi_eigenvalues(const RealMatrix& a, double tol = 1e-14,
                                       std::size_t max_sweeps = 64);

}  // namespace wrm
