#include "wrm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace wrm {

namespace {

void add_mults(JacobianStats* s, std::size_t n) {
  if (s) s->multiplications += n;
}

void validate_options(const SolveOptions& opts) {
  if (opts.tol_residual <= 0.0 || opts.tol_step <= 0.0) {
    throw DomainError("SolveOptions: tolerances must be positive");
  }
  if (opts.max_iter < 1) throw DomainError("SolveOptions: max_iter must be at least 1");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw DomainError("SolveOptions: damping must lie in (0, 1]");
  }
}

}  // namespace

LuFactorization::LuFactorization(const RealMatrix& a, JacobianStats* stats) : n_(a.rows()) {
  if (a.rows() != a.cols()) {
    throw DimensionError("LuFactorization: matrix must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  lu_ = a.data();
  perm_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

  double scale = max_norm(a);
  double tiny = scale > 0.0 ? scale * 1e-14 : 0.0;

  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t pivot_row = k;
    double pivot_mag = std::abs(lu_[k * n_ + k]);
    for (std::size_t i = k + 1; i < n_; ++i) {
      double mag = std::abs(lu_[i * n_ + k]);
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag <= tiny) {
      singular_ = true;
      singular_pivot_ = k;
      return;
    }
    if (pivot_row != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[pivot_row * n_ + j]);
      std::swap(perm_[k], perm_[pivot_row]);
      perm_sign_ = -perm_sign_;
    }
    double pivot = lu_[k * n_ + k];
    for (std::size_t i = k + 1; i < n_; ++i) {
      double m = lu_[i * n_ + k] / pivot;
      lu_[i * n_ + k] = m;
      add_mults(stats, n_ - k);
      for (std::size_t j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= m * lu_[k * n_ + j];
    }
  }
}

void LuFactorization::require_nonsingular(const std::string& context) const {
  if (singular_) {
    std::ostringstream os;
    os << context << ": matrix singular to working precision at pivot " << singular_pivot_;
    throw SingularError(os.str(), singular_pivot_);
  }
}

RealVector LuFactorization::solve(const RealVector& b, JacobianStats* stats) const {
  require_nonsingular("lu_solve");
  if (b.size() != n_) {
    throw DimensionError("lu_solve: rhs length " + std::to_string(b.size()) + " vs " +
                         std::to_string(n_));
  }
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < i; ++j) y[i] -= lu_[i * n_ + j] * y[j];
    add_mults(stats, i);
  }
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t j = i + 1; j < n_; ++j) y[i] -= lu_[i * n_ + j] * y[j];
    y[i] /= lu_[i * n_ + i];
    add_mults(stats, n_ - i);
  }
  return RealVector(std::move(y));
}

double LuFactorization::determinant() const {
  if (singular_) return 0.0;
  double det = perm_sign_;
  for (std::size_t i = 0; i < n_; ++i) det *= lu_[i * n_ + i];
  return det;
}

RealVector lu_solve(const RealMatrix& a, const RealVector& b) {
  LuFactorization lu(a);
  lu.require_nonsingular("lu_solve");
  return lu.solve(b);
}

double determinant(const RealMatrix& a) { return LuFactorization(a).determinant(); }

// ---- Newton ----------------------------------------------------------------

SolveReport newton_solve(const NonlinearFunction& fn, const RealVector& x0,
                         const SolveOptions& opts) {
  validate_options(opts);
  if (x0.size() != fn.dim) {
    throw DimensionError("newton: x0 length " + std::to_string(x0.size()) + " vs system size " +
                         std::to_string(fn.dim));
  }
  auto start = std::chrono::steady_clock::now();
  SolveReport report;
  RealVector x = x0;
  RealVector r = fn.residual(x);

  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    if (max_norm(r) <= opts.tol_residual) {
      report.converged = true;
      break;
    }
    RealMatrix jac = fn.jacobian
                         ? fn.jacobian(x, &report.jacobian_stats)
                         : fd_jacobian_fn([&fn](const RealVector& p) { return fn.residual(p); }, x,
                                          opts.fd_step_scale);
    LuFactorization lu(jac);
    if (lu.singular()) {
      std::ostringstream os;
      os << "newton: singular Jacobian at iteration " << k << " (pivot " << lu.singular_pivot()
         << ")";
      throw SingularError(os.str(), lu.singular_pivot());
    }
    RealVector step = opts.damping * lu.solve(r);
    x = x - step;
    r = fn.residual(x);
    report.iterations += 1;
    report.step_norm_history.push_back(max_norm(step));
    report.residual_norm_history.push_back(max_norm(r));
    if (max_norm(r) <= opts.tol_residual || max_norm(step) <= opts.tol_step) {
      report.converged = max_norm(r) <= opts.tol_residual;
      break;
    }
  }
  if (!report.converged && max_norm(r) <= opts.tol_residual) report.converged = true;

  report.solution = x;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SolveReport newton(const HSystem& system, const RealVector& x0, const SolveOptions& opts) {
  NonlinearFunction fn;
  fn.dim = x0.size();
  fn.residual = [&system](const RealVector& x) {
    return eval_node(system.residual(), x) - system.rhs();
  };
  if (opts.jacobian_mode == JacobianMode::Analytic) {
    fn.jacobian = [&system](const RealVector& x, JacobianStats* stats) {
      auto [jac, cost] = jacobian_with_stats(system.residual(), x);
      if (stats) {
        stats->multiplications += cost.multiplications;
        stats->node_visits += cost.node_visits;
      }
      return jac;
    };
  } else {
    double h = opts.fd_step_scale;
    fn.jacobian = [&system, h](const RealVector& x, JacobianStats* stats) {
      return fd_jacobian(system.residual(), x, h, stats);
    };
  }
  return newton_solve(fn, x0, opts);
}

// ---- Picard ------------------------------------------------------------------

SolveReport picard(const HSystem& system, const RealVector& x0, const SolveOptions& opts) {
  validate_options(opts);
  if (!system.linear_part()) {
    throw DomainError("picard: system has no designated linear part");
  }
  const RealMatrix& d = system.linear_matrix();
  if (x0.size() != d.cols()) {
    throw DimensionError("picard: x0 length " + std::to_string(x0.size()) + " vs system size " +
                         std::to_string(d.cols()));
  }
  LuFactorization lu(d);
  lu.require_nonsingular("picard: linear part");

  auto start = std::chrono::steady_clock::now();
  SolveReport report;
  RealVector x = x0;
  RealVector r = eval_node(system.residual(), x) - system.rhs();

  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    if (max_norm(r) <= opts.tol_residual) {
      report.converged = true;
      break;
    }
    // Lag everything but the designated linear term: N(x) = residual(x) - D x.
    RealVector nonlinear = eval_node(system.residual(), x) - d * x;
    RealVector next = lu.solve(system.rhs() - nonlinear);
    RealVector step = next - x;
    x = next;
    r = eval_node(system.residual(), x) - system.rhs();
    report.iterations += 1;
    report.step_norm_history.push_back(max_norm(step));
    report.residual_norm_history.push_back(max_norm(r));
    if (max_norm(r) <= opts.tol_residual || max_norm(step) <= opts.tol_step) {
      report.converged = max_norm(r) <= opts.tol_residual;
      break;
    }
  }
  if (!report.converged && max_norm(r) <= opts.tol_residual) report.converged = true;

  report.solution = x;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace wrm
