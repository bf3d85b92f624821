#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "wrm/expr.hpp"
#include "wrm/matrix.hpp"

namespace wrm {

/// A scalar coefficient or lift function with derivatives up to order 2.
struct SmoothFn {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  static SmoothFn zero();
  static SmoothFn constant(double c);
  static SmoothFn linear(double slope, double intercept);

  double operator()(double x, int order = 0) const;
  bool is_zero() const { return !value; }  // zero() leaves value empty
};

enum class BasisKind { Sine, Legendre, Monomial };

/// Homogeneous essential conditions a basis family satisfies at the ends.
enum class EssentialBc {
  LeftValue,    // phi(x_lo) = 0
  BothValues,   // phi(x_lo) = phi(x_hi) = 0
  ClampedLeft,  // phi(x_lo) = phi'(x_lo) = 0
};

/// A family of n smooth, linearly independent global basis functions on
/// [x_lo, x_hi], each satisfying the declared essential conditions, plus an
/// optional lift carrying inhomogeneous boundary values. Derivatives are
/// available up to order 4 (order <= 2 is all assembly ever needs; the higher
/// orders serve strong-form cross-checks).
class BasisSet {
 public:
  static BasisSet make(BasisKind kind, EssentialBc bc, std::size_t n, double x_lo, double x_hi,
                       SmoothFn lift = SmoothFn::zero());

  std::size_t size() const { return n_; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  BasisKind kind() const { return kind_; }
  EssentialBc bc() const { return bc_; }

  /// Value (order 0) or derivative of basis function k, k in [0, n).
  double eval(std::size_t k, double x, int order = 0) const;
  /// Lift value/derivative (order <= 2); identically zero when no lift given.
  double lift(double x, int order = 0) const;
  bool has_lift() const { return !lift_.is_zero(); }

 private:
  BasisSet(BasisKind kind, EssentialBc bc, std::size_t n, double x_lo, double x_hi, SmoothFn lift);
  BasisKind kind_;
  EssentialBc bc_;
  std::size_t n_;
  double x_lo_, x_hi_;
  SmoothFn lift_;
};

/// Gauss-Legendre quadrature; exact for polynomials of degree <= 2m - 1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  double x_lo = 0.0;
  double x_hi = 1.0;

  static QuadratureRule gauss_legendre(std::size_t m, double a, double b);
  std::size_t order() const { return points.size(); }
};

double quadrature_integrate(const std::function<double(double)>& fn, const QuadratureRule& quad);

/// A linear differential operator sum c_d(x) d^d/dx^d with orders d <= 2.
struct LinearOperator1D {
  struct Term {
    SmoothFn coeff;
    int order = 0;
  };
  std::vector<Term> terms;

  static LinearOperator1D identity();
  static LinearOperator1D derivative(int order, double coeff = 1.0);
  static LinearOperator1D of(std::vector<Term> terms);

  int max_order() const;
  /// Apply to basis function k at x.
  double apply_basis(const BasisSet& basis, std::size_t k, double x) const;
  /// Apply to the basis lift at x.
  double apply_lift(const BasisSet& basis, double x) const;
};

LinearOperator1D operator+(const LinearOperator1D& a, const LinearOperator1D& b);

/// How residuals are weighted: Galerkin (W_j = phi_j), collocation at nodes,
/// least squares (W_j = op(phi_j) for the operator being weighted), or an
/// explicit custom family.
class Weighting {
 public:
  enum class Kind { Galerkin, Collocation, LeastSquares, Custom };

  static Weighting galerkin();
  static Weighting collocation(std::vector<double> nodes);
  static Weighting least_squares(LinearOperator1D op);
  static Weighting custom(std::function<double(std::size_t j, double x)> family);

  Kind kind() const { return kind_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double weight(const BasisSet& basis, std::size_t j, double x) const;

 private:
  Kind kind_ = Kind::Galerkin;
  std::vector<double> nodes_;
  LinearOperator1D op_;
  std::function<double(std::size_t, double)> family_;
};

/// The affine factor matrix*x + offset produced by weighting one linear
/// operator; the offset carries the lift contribution.
struct AssembledOperator {
  RealMatrix matrix;
  RealVector offset;
};

AssembledOperator assemble_operator(const LinearOperator1D& op, const BasisSet& basis,
                                    const Weighting& weighting, const QuadratureRule& quad);

RealVector assemble_load(const SmoothFn& f, const BasisSet& basis, const Weighting& weighting,
                         const QuadratureRule& quad);

/// Standard-scheme quadratic system D x + G (x kron x) = b.
struct TraditionalForm {
  RealMatrix d;  // n x n
  RealMatrix g;  // n x n^2, column (k*n + l) couples x_k x_l
  RealVector b;
};

struct QuadraticTerm {
  double factor = 1.0;
  LinearOperator1D p;
  LinearOperator1D r;
};

TraditionalForm assemble_traditional(const std::vector<QuadraticTerm>& products,
                                     const LinearOperator1D& linear, const SmoothFn& f,
                                     const BasisSet& basis, const Weighting& weighting,
                                     const QuadratureRule& quad);

TraditionalForm assemble_traditional_quadratic(const LinearOperator1D& p,
                                               const LinearOperator1D& r,
                                               const LinearOperator1D& linear, const SmoothFn& f,
                                               const BasisSet& basis, const Weighting& weighting,
                                               const QuadratureRule& quad);

RealVector eval_traditional(const TraditionalForm& tf, const RealVector& x,
                            JacobianStats* stats = nullptr);
RealMatrix jacobian_traditional(const TraditionalForm& tf, const RealVector& x,
                                JacobianStats* stats = nullptr);

}  // namespace wrm
