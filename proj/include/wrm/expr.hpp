#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "wrm/matrix.hpp"

namespace wrm {

/// Bookkeeping for Jacobian and residual evaluation cost.
struct JacobianStats {
  std::size_t multiplications = 0;
  std::size_t node_visits = 0;
};

/// Immutable expression tree over an unknown vector x. Nodes combine affine
/// maps with entrywise (Hadamard) products, powers and scalar functions; this
/// is exactly the class of residuals whose Jacobians assemble from SJT
/// products. Copies share structure; evaluation is pure.
class HExpr {
 public:
  enum class Kind { Affine, HadProduct, HadPower, HadFunc, Scale, Sum, Const };

  /// M*x + c applied to the unknown directly.
  static HExpr affine(RealMatrix m, RealVector c);
  static HExpr affine(RealMatrix m);                       // zero offset
  /// M*child(x) + c; composition is differentiated by the chain rule.
  static HExpr affine(RealMatrix m, RealVector c, HExpr child);
  static HExpr had_product(HExpr a, HExpr b);
  static HExpr had_power(HExpr child, double exponent);
  static HExpr had_func(const std::string& fn, HExpr child);
  static HExpr had_func(ScalarFunction fn, HExpr child);
  static HExpr scale(double k, HExpr child);
  static HExpr sum(std::vector<HExpr> children);
  static HExpr constant(RealVector v);
  /// The unknown itself (identity affine of dimension m).
  static HExpr arg(std::size_t m);

  Kind kind() const;
  std::size_t output_length() const;
  /// Dimension of the unknown this subtree depends on; 0 when constant.
  std::size_t unknown_dim() const;

  const RealMatrix& matrix() const;        // Affine
  const RealVector& offset() const;        // Affine
  bool has_affine_child() const;           // Affine
  double exponent() const;                 // HadPower
  double scale_factor() const;             // Scale
  const ScalarFunction& function() const;  // HadFunc
  const RealVector& const_value() const;   // Const
  std::size_t child_count() const;
  const HExpr& child(std::size_t i) const;

 private:
  struct Node;
  explicit HExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend RealVector eval_node(const HExpr&, const RealVector&, JacobianStats*);
  friend struct ExprPass;
};

/// Evaluate the tree at x.
RealVector eval_node(const HExpr& node, const RealVector& x);
RealVector eval_node(const HExpr& node, const RealVector& x, JacobianStats* stats);

/// Analytic Jacobian assembled bottom-up from the SJT product rules.
RealMatrix jacobian_node(const HExpr& node, const RealVector& x);

/// Analytic Jacobian plus the exact multiplication count it cost.
std::pair<RealMatrix, JacobianStats> jacobian_with_stats(const HExpr& node, const RealVector& x);

/// Central-difference Jacobian; column j uses step h_scale*max(1,|x_j|).
RealMatrix fd_jacobian(const HExpr& node, const RealVector& x, double h_scale = 1e-6,
                       JacobianStats* stats = nullptr);

/// Central differences of an arbitrary vector map (used for non-tree systems).
RealMatrix fd_jacobian_fn(const std::function<RealVector(const RealVector&)>& fn,
                          const RealVector& x, double h_scale = 1e-6);

enum class FdScheme { OneSided, Central };

/// Multiplication count of a finite-difference Jacobian of this tree at x,
/// measured by instrumented evaluation of every perturbed point.
JacobianStats fd_jacobian_cost(const HExpr& node, const RealVector& x, FdScheme scheme);

/// A residual tree paired with its right-hand side: residual(x) = rhs.
/// linear_part optionally designates one top-level Affine summand as the
/// Picard splitting matrix.
class HSystem {
 public:
  HSystem(HExpr residual, RealVector rhs, std::optional<std::size_t> linear_part = std::nullopt);

  const HExpr& residual() const { return residual_; }
  const RealVector& rhs() const { return rhs_; }
  std::size_t size() const { return rhs_.size(); }
  std::optional<std::size_t> linear_part() const { return linear_part_; }
  /// Matrix of the designated linear summand; throws when none designated.
  const RealMatrix& linear_matrix() const;

 private:
  HExpr residual_;
  RealVector rhs_;
  std::optional<std::size_t> linear_part_;
};

// ---- catalog of nonlinear-operator analogues ---------------------------------

enum class CatalogForm { CoeffTimesDerivative, Power, ProductOfPowers, Sine, Exp };

/// {c_j} o (Ax * x): variable-coefficient first-order term.
HExpr catalog_coeff_product(const RealVector& c, const RealMatrix& ax);
/// (Ax * x)^{o q}; q = 1 collapses to the plain affine map.
HExpr catalog_power(const RealMatrix& ax, double q);
/// (Ax * x^{o m}) o (Ay * x^{o n}).
HExpr catalog_product_of_powers(const RealMatrix& ax, double m, const RealMatrix& ay, double n);
/// sin o (Ax * x).
HExpr catalog_sine(const RealMatrix& ax);
/// exp o (Ax * x).
HExpr catalog_exp(const RealMatrix& ax);

struct CatalogInputs {
  RealMatrix ax;
  RealMatrix ay;       // ProductOfPowers only
  RealVector coeff;    // CoeffTimesDerivative only
  double q = 2.0;      // Power exponent
  double m = 2.0;      // ProductOfPowers exponents
  double n = 1.0;
};

HExpr build_catalog_form(CatalogForm kind, const CatalogInputs& in);

}  // namespace wrm
