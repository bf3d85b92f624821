#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "wrm/expr.hpp"
#include "wrm/matrix.hpp"

namespace wrm {

/// LU factorization with partial pivoting of a square matrix.
class LuFactorization {
 public:
  explicit LuFactorization(const RealMatrix& a, JacobianStats* stats = nullptr);

  RealVector solve(const RealVector& b, JacobianStats* stats = nullptr) const;
  double determinant() const;
  std::size_t size() const { return n_; }
  bool singular() const { return singular_; }
  std::size_t singular_pivot() const { return singular_pivot_; }
  /// Throws SingularError naming the pivot when the factorization collapsed.
  void require_nonsingular(const std::string& context) const;

 private:
  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  int perm_sign_ = 1;
  bool singular_ = false;
  std::size_t singular_pivot_ = 0;
};

/// Solve A x = b by LU with partial pivoting.
RealVector lu_solve(const RealMatrix& a, const RealVector& b);

/// Determinant via LU (0 when singular to working precision).
double determinant(const RealMatrix& a);

enum class SolveMethod { Newton, Picard };
enum class JacobianMode { Analytic, FiniteDifference };

struct SolveOptions {
  SolveMethod method = SolveMethod::Newton;
  JacobianMode jacobian_mode = JacobianMode::Analytic;
  double fd_step_scale = 1e-6;
  double tol_residual = 1e-10;  // max-norm on residual(x) - rhs
  double tol_step = 1e-12;      // max-norm on the damped update
  std::size_t max_iter = 50;
  double damping = 1.0;         // in (0, 1], applied to Newton steps
};

struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> residual_norm_history;  // after each step
  std::vector<double> step_norm_history;
  RealVector solution;
  JacobianStats jacobian_stats;  // accumulated over all Jacobian evaluations
  double wall_seconds = 0.0;
};

/// A general residual map with optional analytic Jacobian; residual(x) is the
/// full defect (right-hand side already subtracted).
struct NonlinearFunction {
  std::size_t dim = 0;
  std::function<RealVector(const RealVector&)> residual;
  std::function<RealMatrix(const RealVector&, JacobianStats*)> jacobian;  // may be empty
};

/// Newton iteration on an arbitrary residual map.
SolveReport newton_solve(const NonlinearFunction& fn, const RealVector& x0,
                         const SolveOptions& opts);

/// Newton iteration on a formulation tree: x_{k+1} = x_k - damping * J^{-1} (residual - rhs).
SolveReport newton(const HSystem& system, const RealVector& x0, const SolveOptions& opts);

/// Picard iteration on the designated linear part: x_{k+1} = D^{-1} (rhs - N(x_k)).
SolveReport picard(const HSystem& system, const RealVector& x0, const SolveOptions& opts);

}  // namespace wrm
