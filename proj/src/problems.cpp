#include "wrm/problems.hpp"

#include <cmath>
#include <sstream>

namespace wrm {

namespace {

void add_mults(JacobianStats* s, std::size_t n) {
  if (s) s->multiplications += n;
}

void require_bc(const BasisSet& basis, EssentialBc expected, const char* problem) {
  // Validate by trace rather than by tag so a custom-built family is accepted
  // whenever it actually satisfies the conditions.
  double lo = basis.x_lo();
  double scale = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    scale = std::max(scale, std::abs(basis.eval(k, 0.5 * (basis.x_lo() + basis.x_hi()))));
  double tol = 1e-9 * std::max(1.0, scale);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    bool ok = true;
    switch (expected) {
      case EssentialBc::LeftValue:
        ok = std::abs(basis.eval(k, lo)) <= tol;
        break;
      case EssentialBc::BothValues:
        ok = std::abs(basis.eval(k, lo)) <= tol && std::abs(basis.eval(k, basis.x_hi())) <= tol;
        break;
      case EssentialBc::ClampedLeft:
        ok = std::abs(basis.eval(k, lo)) <= tol && std::abs(basis.eval(k, lo, 1)) <= tol;
        break;
    }
    if (!ok) {
      std::ostringstream os;
      os << problem << ": basis function " << k << " violates the essential boundary conditions";
      throw DomainError(os.str());
    }
  }
}

// Rank-one boundary coupling phi_k^{(k_order)}(end) * w_j^{(j_order)}(end),
// where the weight family may come from another basis.
RealMatrix trace_outer(const BasisSet& op_basis, int k_order, const BasisSet& w_basis, int j_order,
                       double x) {
  std::size_t n = op_basis.size();
  std::vector<double> out(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      out[j * n + k] = op_basis.eval(k, x, k_order) * w_basis.eval(j, x, j_order);
  return RealMatrix(n, n, std::move(out));
}

ExactSolution checked_exact(std::function<double(double)> value, std::function<double(double)> deriv,
                            std::function<double(double, double, double)> ode_residual,
                            double x_lo, double x_hi, std::string description) {
  // Substitute into the first-order form of the governing equation at 20
  // points before trusting the closed form.
  for (int i = 0; i < 20; ++i) {
    double x = x_lo + (x_hi - x_lo) * (i + 0.5) / 20.0;
    double r = ode_residual(x, value(x), deriv(x));
    if (!(std::abs(r) <= 1e-9)) {
      throw DomainError("exact solution fails substitution check at x = " + std::to_string(x));
    }
  }
  ExactSolution exact;
  exact.present = true;
  exact.value = std::move(value);
  exact.deriv = std::move(deriv);
  exact.description = std::move(description);
  return exact;
}

}  // namespace

QuadratureRule default_quadrature(BasisKind kind, std::size_t n, int factors, double x_lo,
                                  double x_hi) {
  std::size_t points;
  if (kind == BasisKind::Sine) {
    // Trigonometric integrands are not polynomial; resolve the highest product
    // frequency with a comfortable margin instead.
    points = 2 * static_cast<std::size_t>(factors) * n + 16;
  } else {
    points = (static_cast<std::size_t>(factors) * (n + 1)) / 2 + 4;
  }
  return QuadratureRule::gauss_legendre(points, x_lo, x_hi);
}

double expansion_value(const BasisSet& basis, const RealVector& coeffs, double x) {
  if (coeffs.size() != basis.size()) {
    throw DimensionError("expansion_value: coefficient count " + std::to_string(coeffs.size()) +
                         " vs basis size " + std::to_string(basis.size()));
  }
  double acc = basis.has_lift() ? basis.lift(x) : 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) acc += coeffs[k] * basis.eval(k, x);
  return acc;
}

// ---- y' = exp(-y), y(0) = 0 -----------------------------------------------------

BuiltProblem build_exp_ode(std::size_t n, BasisKind kind) {
  return build_exp_ode(n, BasisSet::make(kind, EssentialBc::LeftValue, n, 0.0, 1.0));
}

BuiltProblem build_exp_ode(std::size_t n, const BasisSet& basis) {
  if (n != basis.size()) throw DimensionError("build_exp_ode: n does not match basis size");
  require_bc(basis, EssentialBc::LeftValue, "build_exp_ode");
  QuadratureRule quad = default_quadrature(basis.kind(), n, 2, basis.x_lo(), basis.x_hi());
  Weighting galerkin = Weighting::galerkin();

  // Weighted y' after integration by parts: the y(1) phi_j(1) endpoint term is
  // unknown, so it joins the matrix.
  Weighting minus_dw = Weighting::custom(
      [&basis](std::size_t j, double x) { return -basis.eval(j, x, 1); });
  RealMatrix a = assemble_operator(LinearOperator1D::identity(), basis, minus_dw, quad).matrix +
                 trace_outer(basis, 0, basis, 0, basis.x_hi());
  RealMatrix b_mass = assemble_operator(LinearOperator1D::identity(), basis, galerkin, quad).matrix;

  HExpr residual = HExpr::sum({HExpr::affine(a),
                               HExpr::scale(-1.0, HExpr::had_func("exp", HExpr::affine(-1.0 * b_mass)))});
  HSystem system(std::move(residual), RealVector(n), 0);

  ExactSolution exact = checked_exact(
      [](double x) { return std::log(1.0 + x); }, [](double x) { return 1.0 / (1.0 + x); },
      [](double, double y, double yp) { return yp - std::exp(-y); }, basis.x_lo(), basis.x_hi(),
      "y(x) = ln(1 + x)");
  return BuiltProblem{std::move(system), basis, std::move(exact)};
}

// ---- y'' + sin(y') + 1 = 0, y(0) = 0, y(1) = 1 ------------------------------------

BuiltProblem build_sin_ode(std::size_t n, BasisKind kind) {
  return build_sin_ode(
      n, BasisSet::make(kind, EssentialBc::BothValues, n, 0.0, 1.0, SmoothFn::linear(1.0, 0.0)));
}

BuiltProblem build_sin_ode(std::size_t n, const BasisSet& basis) {
  if (n != basis.size()) throw DimensionError("build_sin_ode: n does not match basis size");
  require_bc(basis, EssentialBc::BothValues, "build_sin_ode");
  QuadratureRule quad = default_quadrature(basis.kind(), n, 2, basis.x_lo(), basis.x_hi());

  Weighting minus_dw = Weighting::custom(
      [&basis](std::size_t j, double x) { return -basis.eval(j, x, 1); });

  // Weighted y'' integrates by parts to -int y' phi_j' (endpoint terms vanish
  // on this family); the lift derivative rides along in the offset.
  AssembledOperator d_op =
      assemble_operator(LinearOperator1D::derivative(1), basis, minus_dw, quad);
  // Weighted y' integrates by parts to -int y phi_j' with the lift inside.
  AssembledOperator a_op = assemble_operator(LinearOperator1D::identity(), basis, minus_dw, quad);
  RealVector ones_weighted =
      assemble_load(SmoothFn::constant(1.0), basis, Weighting::galerkin(), quad);

  RealVector rhs = -1.0 * (d_op.offset + ones_weighted);
  HExpr residual = HExpr::sum(
      {HExpr::affine(d_op.matrix), HExpr::had_func("sin", HExpr::affine(a_op.matrix, a_op.offset))});
  HSystem system(std::move(residual), std::move(rhs), 0);

  ExactSolution exact;  // no closed form for this one
  return BuiltProblem{std::move(system), basis, std::move(exact)};
}

// ---- heat slab with conductivity 1 + alpha T ----------------------------------------

namespace {

ExactSolution heat_exact(const HeatParams& p) {
  // First integral: (1 + alpha T) T' = q_L, so T + alpha T^2 / 2 grows
  // linearly; take the physical (positive-conductivity) root.
  double alpha = p.alpha;
  double c0 = p.t0 + 0.5 * alpha * p.t0 * p.t0;
  if (alpha == 0.0) {
    double t0 = p.t0, ql = p.q_l;
    return checked_exact([t0, ql](double x) { return t0 + ql * x; },
                         [ql](double) { return ql; },
                         [ql](double, double, double tp) { return tp - ql; }, 0.0, p.length,
                         "T(x) = T0 + q_L x");
  }
  // Discriminant must stay positive across the slab for a real temperature.
  for (int i = 0; i <= 20; ++i) {
    double x = p.length * i / 20.0;
    if (1.0 + 2.0 * alpha * (c0 + p.q_l * x) <= 0.0) return ExactSolution{};
  }
  double ql = p.q_l;
  auto value = [alpha, c0, ql](double x) {
    return (-1.0 + std::sqrt(1.0 + 2.0 * alpha * (c0 + ql * x))) / alpha;
  };
  auto deriv = [alpha, c0, ql](double x) {
    return ql / std::sqrt(1.0 + 2.0 * alpha * (c0 + ql * x));
  };
  auto ode = [alpha, ql](double, double t, double tp) { return (1.0 + alpha * t) * tp - ql; };
  return checked_exact(value, deriv, ode, 0.0, p.length,
                       "positive root of T + alpha T^2/2 = T0 + alpha T0^2/2 + q_L x");
}

void validate_heat(const HeatParams& p) {
  if (p.alpha < 0.0) throw DomainError("heat slab: alpha must be nonnegative");
  if (!(p.length > 0.0)) throw DomainError("heat slab: length must be positive");
}

}  // namespace

BuiltProblem build_heat_slab_novel(const HeatParams& params, std::size_t n, BasisKind kind) {
  validate_heat(params);
  return build_heat_slab_novel(
      params, n,
      BasisSet::make(kind, EssentialBc::LeftValue, n, 0.0, params.length,
                     SmoothFn::constant(params.t0)));
}

BuiltProblem build_heat_slab_novel(const HeatParams& params, std::size_t n, const BasisSet& basis) {
  validate_heat(params);
  if (n != basis.size()) throw DimensionError("build_heat_slab_novel: n does not match basis");
  require_bc(basis, EssentialBc::LeftValue, "build_heat_slab_novel");
  double length = basis.x_hi();
  QuadratureRule quad = default_quadrature(basis.kind(), n, 2, basis.x_lo(), length);
  Weighting galerkin = Weighting::galerkin();
  double alpha = params.alpha;
  double t0 = params.t0;

  // Weighted T' (the lift is constant, so no offset survives).
  RealMatrix a = assemble_operator(LinearOperator1D::derivative(1), basis, galerkin, quad).matrix;
  // Weighted T with the lift in the offset.
  AssembledOperator b_op = assemble_operator(LinearOperator1D::identity(), basis, galerkin, quad);
  // Weighted T'' in the product factor: integrate by parts and keep the
  // unknown endpoint slope inside the matrix.
  Weighting minus_dw = Weighting::custom(
      [&basis](std::size_t j, double x) { return -basis.eval(j, x, 1); });
  RealMatrix h = assemble_operator(LinearOperator1D::derivative(1), basis, minus_dw, quad).matrix +
                 trace_outer(basis, 1, basis, 0, length);
  // Weighted T'' in the linear term, kept unintegrated. The natural condition
  // fixes the boundary flux (1 + alpha T) T'; its residual contributes the
  // linear endpoint slope here, a quadratic endpoint product below, and the
  // flux datum on the right-hand side.
  RealMatrix d = assemble_operator(LinearOperator1D::derivative(2), basis, galerkin, quad).matrix -
                 trace_outer(basis, 1, basis, 0, length);

  std::vector<double> rhs(n), trace_val(n * n), trace_slope(n * n), trace_offset(n);
  for (std::size_t j = 0; j < n; ++j) {
    double nj = basis.eval(j, length);
    rhs[j] = -params.q_l * nj;
    trace_offset[j] = t0 * nj;
    for (std::size_t k = 0; k < n; ++k) {
      trace_val[j * n + k] = basis.eval(k, length) * nj;
      trace_slope[j * n + k] = basis.eval(k, length, 1);
    }
  }

  HExpr residual = HExpr::sum(
      {HExpr::scale(alpha, HExpr::had_power(HExpr::affine(a), 2.0)),
       HExpr::scale(alpha, HExpr::had_product(HExpr::affine(b_op.matrix, b_op.offset),
                                              HExpr::affine(h))),
       HExpr::affine(d),
       HExpr::scale(-alpha, HExpr::had_product(HExpr::affine(RealMatrix(n, n, std::move(trace_val)),
                                                             RealVector(std::move(trace_offset))),
                                               HExpr::affine(RealMatrix(n, n, std::move(trace_slope)))))});
  HSystem system(std::move(residual), RealVector(std::move(rhs)), 2);
  return BuiltProblem{std::move(system), basis, heat_exact(params)};
}

TraditionalProblem build_heat_slab_traditional(const HeatParams& params, std::size_t n,
                                               BasisKind kind) {
  validate_heat(params);
  return build_heat_slab_traditional(
      params, n,
      BasisSet::make(kind, EssentialBc::LeftValue, n, 0.0, params.length,
                     SmoothFn::constant(params.t0)));
}

TraditionalProblem build_heat_slab_traditional(const HeatParams& params, std::size_t n,
                                               const BasisSet& basis) {
  validate_heat(params);
  if (n != basis.size()) throw DimensionError("build_heat_slab_traditional: n does not match basis");
  require_bc(basis, EssentialBc::LeftValue, "build_heat_slab_traditional");
  double length = basis.x_hi();
  QuadratureRule quad = default_quadrature(basis.kind(), n, 3, basis.x_lo(), length);
  double alpha = params.alpha;

  // The expanded strong form 1 + alpha T times T'' plus alpha (T')^2, weighted
  // in one shot; both quadratic couplings land in the same G.
  std::vector<QuadraticTerm> products = {
      QuadraticTerm{alpha, LinearOperator1D::identity(), LinearOperator1D::derivative(2)},
      QuadraticTerm{alpha, LinearOperator1D::derivative(1), LinearOperator1D::derivative(1)},
  };
  TraditionalForm tf =
      assemble_traditional(products, LinearOperator1D::derivative(2), SmoothFn::zero(), basis,
                           Weighting::galerkin(), quad);

  // Boundary residual of the flux condition (1 + alpha T) T' = q_L: the
  // endpoint slope and its lift coupling fold into D, the endpoint value-slope
  // product into G, and the flux datum into b.
  std::vector<double> d = tf.d.data(), g = tf.g.data(), b = tf.b.data();
  for (std::size_t j = 0; j < n; ++j) {
    double nj = basis.eval(j, length);
    b[j] -= params.q_l * nj;
    for (std::size_t k = 0; k < n; ++k) {
      d[j * n + k] -= (1.0 + alpha * params.t0) * basis.eval(k, length, 1) * nj;
      for (std::size_t l = 0; l < n; ++l) {
        g[j * n * n + k * n + l] -= alpha * basis.eval(k, length) * basis.eval(l, length, 1) * nj;
      }
    }
  }

  return TraditionalProblem{
      TraditionalForm{RealMatrix(n, n, std::move(d)), RealMatrix(n, n * n, std::move(g)),
                      RealVector(std::move(b))},
      basis, heat_exact(params)};
}

// ---- coupled beam bending ------------------------------------------------------------

CoupledSystem build_beam(const BeamParams& params, std::size_t n, BasisKind kind) {
  if (!(params.stiffness_group > 0.0)) {
    throw DomainError("build_beam: stiffness group must be positive");
  }
  BasisSet wb = BasisSet::make(kind, EssentialBc::ClampedLeft, n, 0.0, 1.0);
  BasisSet ub = BasisSet::make(kind, EssentialBc::LeftValue, n, 0.0, 1.0);
  QuadratureRule quad = default_quadrature(kind, n, 2, 0.0, 1.0);
  double lambda = params.stiffness_group;

  auto weight_of = [](const BasisSet& basis, int order, double sign) {
    return Weighting::custom([&basis, order, sign](std::size_t j, double x) {
      return sign * basis.eval(j, x, order);
    });
  };
  LinearOperator1D d1 = LinearOperator1D::derivative(1);
  LinearOperator1D d2 = LinearOperator1D::derivative(2);

  // W equation, weighted by the W family phi_j. Fourth derivative integrates
  // by parts twice; moment and shear data vanish at the free end.
  RealMatrix d = assemble_operator(d2, wb, weight_of(wb, 2, 1.0), quad).matrix;
  // Axial-slope factor: endpoint slope of U is unknown here, fold it in.
  RealMatrix aw = lambda * (assemble_operator(d1, ub, weight_of(wb, 1, -1.0), quad).matrix +
                            trace_outer(ub, 1, wb, 0, 1.0));
  RealMatrix bw = assemble_operator(d1, wb, Weighting::galerkin(), quad).matrix;
  // The bracket multiplies the weighted curvature with a minus sign; the
  // squared slope term fixes the bracket's own sign, so the minus lives here.
  RealMatrix cw = assemble_operator(d1, wb, weight_of(wb, 1, 1.0), quad).matrix -
                  trace_outer(wb, 1, wb, 0, 1.0);
  RealVector b = assemble_load(SmoothFn::constant(params.load_group), wb, Weighting::galerkin(),
                               quad);

  // U equation, weighted by the U family; the axial natural condition at the
  // free end supplies a zero datum after integration by parts.
  RealMatrix au = lambda * assemble_operator(d1, ub, weight_of(ub, 1, -1.0), quad).matrix;
  RealMatrix bu = assemble_operator(d1, wb, weight_of(ub, 0, 1.0), quad).matrix;
  RealMatrix cu = assemble_operator(d1, wb, weight_of(ub, 1, -1.0), quad).matrix +
                  trace_outer(wb, 1, ub, 0, 1.0);

  LuFactorization au_check(au);
  if (au_check.singular()) {
    throw SingularError("build_beam: axial matrix singular at pivot " +
                            std::to_string(au_check.singular_pivot()),
                        au_check.singular_pivot());
  }

  RealVector zero_n(n);

  // Stacked residual over z = (W, U) built from 2x2 block matrices, so the
  // monolithic reference solve runs on the very same assembly.
  auto block = [n](const RealMatrix* tl, const RealMatrix* tr, const RealMatrix* bl,
                   const RealMatrix* br) {
    std::vector<double> out(4 * n * n, 0.0);
    auto put = [&](const RealMatrix* m, std::size_t ro, std::size_t co) {
      if (!m) return;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[(ro + i) * 2 * n + (co + j)] = (*m)(i, j);
    };
    put(tl, 0, 0);
    put(tr, 0, n);
    put(bl, n, 0);
    put(br, n, n);
    return RealMatrix(2 * n, 2 * n, std::move(out));
  };

  HExpr linear_block = HExpr::affine(block(&d, nullptr, nullptr, &au));
  HExpr left_factor = HExpr::sum(
      {HExpr::affine(block(nullptr, &aw, &bu, nullptr), concat(zero_n, zero_n)),
       HExpr::scale(0.5, HExpr::had_power(HExpr::affine(block(&bw, nullptr, nullptr, nullptr)), 2.0))});
  HExpr right_factor = HExpr::affine(block(&cw, nullptr, &cu, nullptr), concat(zero_n, zero_n));
  HExpr stacked_residual =
      HExpr::sum({linear_block, HExpr::had_product(left_factor, right_factor)});
  HSystem stacked(std::move(stacked_residual), concat(b, zero_n));

  return CoupledSystem{n,
                       wb,
                       ub,
                       std::move(d),
                       std::move(aw),
                       std::move(bw),
                       std::move(cw),
                       RealVector(n),
                       RealVector(n),
                       std::move(b),
                       std::move(au),
                       std::move(bu),
                       std::move(cu),
                       RealVector(n),
                       RealVector(n),
                       std::move(stacked)};
}

RealVector eliminate_u(const CoupledSystem& cs, const RealVector& w, JacobianStats* stats) {
  if (w.size() != cs.n) throw DimensionError("eliminate_u: W length mismatch");
  add_mults(stats, 2 * cs.n * cs.n + cs.n);
  RealVector coupling = cs.au_vec + had_product(cs.bu * w, cs.cu * w + cs.cu_vec);
  LuFactorization lu(cs.au_mat, stats);
  lu.require_nonsingular("eliminate_u");
  return lu.solve(-1.0 * coupling, stats);
}

RealMatrix relative_jacobian(const CoupledSystem& cs, const RealVector& w, JacobianStats* stats) {
  if (w.size() != cs.n) throw DimensionError("relative_jacobian: W length mismatch");
  std::size_t n = cs.n;
  add_mults(stats, 2 * n * n + 2 * n * n);  // two matrix-vector products, two row scalings
  RealMatrix coupling_jac =
      sjt_post(cs.bu, cs.cu * w + cs.cu_vec) + sjt_post(cs.cu, cs.bu * w);
  LuFactorization lu(cs.au_mat, stats);
  lu.require_nonsingular("relative_jacobian");
  // Column-by-column solve of Au X = -coupling_jac.
  std::vector<double> out(n * n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -coupling_jac(i, col);
    RealVector x = lu.solve(RealVector(std::move(rhs)), stats);
    for (std::size_t i = 0; i < n; ++i) out[i * n + col] = x[i];
  }
  return RealMatrix(n, n, std::move(out));
}

RealVector reduced_residual(const CoupledSystem& cs, const RealVector& w, JacobianStats* stats) {
  if (w.size() != cs.n) throw DimensionError("reduced_residual: W length mismatch");
  RealVector u = eliminate_u(cs, w, stats);
  std::size_t n = cs.n;
  add_mults(stats, 4 * n * n + 4 * n);
  RealVector left = cs.aw_mat * u + cs.aw_vec + 0.5 * had_power(cs.bw * w, 2.0);
  RealVector right = cs.cw * w + cs.cw_vec;
  return cs.d * w + had_product(left, right) - cs.b;
}

RealMatrix reduced_jacobian(const CoupledSystem& cs, const RealVector& w, JacobianStats* stats) {
  if (w.size() != cs.n) throw DimensionError("reduced_jacobian: W length mismatch");
  std::size_t n = cs.n;
  RealVector u = eliminate_u(cs, w, stats);
  RealMatrix du_dw = relative_jacobian(cs, w, stats);
  add_mults(stats, n * n * n + 5 * n * n + 4 * n);
  RealVector bw_w = cs.bw * w;
  RealVector right = cs.cw * w + cs.cw_vec;
  RealVector left = cs.aw_mat * u + cs.aw_vec + 0.5 * had_power(bw_w, 2.0);
  RealMatrix left_jac = cs.aw_mat * du_dw + sjt_post(cs.bw, bw_w);
  return cs.d + sjt_post(left_jac, right) + sjt_post(cs.cw, left);
}

CoupledSolve solve_uncoupled(const CoupledSystem& cs, const RealVector& w0,
                             const SolveOptions& opts) {
  NonlinearFunction fn;
  fn.dim = cs.n;
  fn.residual = [&cs](const RealVector& w) { return reduced_residual(cs, w); };
  if (opts.jacobian_mode == JacobianMode::Analytic) {
    fn.jacobian = [&cs](const RealVector& w, JacobianStats* stats) {
      return reduced_jacobian(cs, w, stats);
    };
  }
  SolveReport report = newton_solve(fn, w0, opts);
  RealVector u = eliminate_u(cs, report.solution);
  return CoupledSolve{report.solution, std::move(u), std::move(report)};
}

CoupledSolve solve_monolithic(const CoupledSystem& cs, const RealVector& w0, const RealVector& u0,
                              const SolveOptions& opts) {
  SolveOptions fd_opts = opts;
  fd_opts.jacobian_mode = JacobianMode::FiniteDifference;
  SolveReport report = newton(cs.stacked, concat(w0, u0), fd_opts);
  RealVector w = slice(report.solution, 0, cs.n);
  RealVector u = slice(report.solution, cs.n, cs.n);
  return CoupledSolve{std::move(w), std::move(u), std::move(report)};
}

ExactSolution exact_solution(const ProblemSpec& spec) {
  switch (spec.name) {
    case ProblemName::ExpOde:
      return checked_exact([](double x) { return std::log(1.0 + x); },
                           [](double x) { return 1.0 / (1.0 + x); },
                           [](double, double y, double yp) { return yp - std::exp(-y); }, 0.0, 1.0,
                           "y(x) = ln(1 + x)");
    case ProblemName::HeatSlab:
      validate_heat(spec.heat);
      return heat_exact(spec.heat);
    case ProblemName::SinOde:
    case ProblemName::Beam:
      return ExactSolution{};
  }
  return ExactSolution{};
}

}  // namespace wrm
