#pragma once

#include <functional>
#include <optional>
#include <string>

#include "wrm/assembly.hpp"
#include "wrm/expr.hpp"
#include "wrm/matrix.hpp"
#include "wrm/solvers.hpp"

namespace wrm {

enum class ProblemName { ExpOde, SinOde, HeatSlab, Beam };
enum class Scheme { Novel, Traditional };

struct HeatParams {
  double alpha = 1.0;   // conductivity slope (must be >= 0)
  double t0 = 0.0;      // fixed value at the left end
  double q_l = 1.0;     // flux datum at the right end
  double length = 1.0;
};

struct BeamParams {
  double load_group = 10.0;       // q L^4 / (E I r)
  double stiffness_group = 0.05;  // 1 / (r L)
};

struct ProblemSpec {
  ProblemName name = ProblemName::ExpOde;
  Scheme scheme = Scheme::Novel;
  std::size_t n = 8;
  BasisKind basis = BasisKind::Legendre;
  HeatParams heat;
  BeamParams beam;
};

/// A closed-form reference solution, when one exists. Construction verifies
/// the governing equation by substitution at 20 sample points.
struct ExactSolution {
  bool present = false;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::string description;
};

/// A problem discretized to a formulation tree, with the basis that built it.
struct BuiltProblem {
  HSystem system;
  BasisSet basis;
  ExactSolution exact;
};

/// Same for the standard-scheme quadratic (Kronecker) form.
struct TraditionalProblem {
  TraditionalForm form;
  BasisSet basis;
  ExactSolution exact;
};

/// First-order problem y' = exp(-y), y(0) = 0: the weighted system is
/// A y - exp o (-B y) = 0 with the unknown endpoint value folded into A.
BuiltProblem build_exp_ode(std::size_t n, BasisKind kind);
BuiltProblem build_exp_ode(std::size_t n, const BasisSet& basis);

/// y'' + sin(y') + 1 = 0, y(0) = 0, y(1) = 1, lifted by g(x) = x:
/// D y + sin o (A y + a) = b.
BuiltProblem build_sin_ode(std::size_t n, BasisKind kind);
BuiltProblem build_sin_ode(std::size_t n, const BasisSet& basis);

/// Heat conduction with conductivity 1 + alpha T, T(0) = T0, flux q_L at the
/// right end: alpha (A T)^{o2} + alpha (B T) o (H T) + D T = rhs.
BuiltProblem build_heat_slab_novel(const HeatParams& params, std::size_t n, BasisKind kind);
BuiltProblem build_heat_slab_novel(const HeatParams& params, std::size_t n, const BasisSet& basis);
TraditionalProblem build_heat_slab_traditional(const HeatParams& params, std::size_t n,
                                               BasisKind kind);
TraditionalProblem build_heat_slab_traditional(const HeatParams& params, std::size_t n,
                                               const BasisSet& basis);

/// Geometrically nonlinear cantilever bending, two coupled fields: transverse
/// deflection W (clamped left end) and axial displacement U. The U equation is
/// linear in U, which the elimination below exploits.
struct CoupledSystem {
  std::size_t n = 0;
  BasisSet w_basis;
  BasisSet u_basis;
  // W equation: D W + [(Aw U + aw) + 1/2 (Bw W)^{o2}] o (Cw W + cw) = b
  RealMatrix d, aw_mat, bw, cw;
  RealVector aw_vec, cw_vec, b;
  // U equation: Au U + (Bu W) o (Cu W + cu) = -au
  RealMatrix au_mat, bu, cu;
  RealVector au_vec, cu_vec;
  HSystem stacked;  // both equations over the concatenated unknown (W, U)
};

CoupledSystem build_beam(const BeamParams& params, std::size_t n, BasisKind kind);

/// U = -Au^{-1} (au + (Bu W) o (Cu W + cu)).
RealVector eliminate_u(const CoupledSystem& cs, const RealVector& w,
                       JacobianStats* stats = nullptr);

/// dU/dW = -Au^{-1} (Bu row-scaled by (Cu W + cu) + Cu row-scaled by (Bu W)).
RealMatrix relative_jacobian(const CoupledSystem& cs, const RealVector& w,
                             JacobianStats* stats = nullptr);

/// W-equation defect with U eliminated.
RealVector reduced_residual(const CoupledSystem& cs, const RealVector& w,
                            JacobianStats* stats = nullptr);

/// Analytic Jacobian of the reduced residual via SJT products and dU/dW.
RealMatrix reduced_jacobian(const CoupledSystem& cs, const RealVector& w,
                            JacobianStats* stats = nullptr);

struct CoupledSolve {
  RealVector w;
  RealVector u;
  SolveReport report;
};

/// Newton on the reduced (n-dimensional) system; U recovered afterwards.
CoupledSolve solve_uncoupled(const CoupledSystem& cs, const RealVector& w0,
                             const SolveOptions& opts);

/// Newton on the stacked 2n-dimensional system with finite-difference
/// Jacobians; the reference the uncoupled path is checked against.
CoupledSolve solve_monolithic(const CoupledSystem& cs, const RealVector& w0, const RealVector& u0,
                              const SolveOptions& opts);

ExactSolution exact_solution(const ProblemSpec& spec);

/// Expansion value g(x) + sum_k c_k phi_k(x) at x.
double expansion_value(const BasisSet& basis, const RealVector& coeffs, double x);

/// Quadrature rule adequate for products of `factors` basis functions or
/// derivatives of the given family (exact for the polynomial kinds).
QuadratureRule default_quadrature(BasisKind kind, std::size_t n, int factors, double x_lo,
                                  double x_hi);

}  // namespace wrm
