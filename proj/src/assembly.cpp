#include "wrm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wrm {

// ---- SmoothFn ----------------------------------------------------------------

SmoothFn SmoothFn::zero() { return SmoothFn{}; }

SmoothFn SmoothFn::constant(double c) {
  return SmoothFn{[c](double) { return c; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }};
}

SmoothFn SmoothFn::linear(double slope, double intercept) {
  return SmoothFn{[slope, intercept](double x) { return slope * x + intercept; },
                  [slope](double) { return slope; }, [](double) { return 0.0; }};
}

double SmoothFn::operator()(double x, int order) const {
  if (is_zero()) return 0.0;
  switch (order) {
    case 0:
      return value(x);
    case 1:
      return d1 ? d1(x) : throw DomainError("SmoothFn: first derivative not provided");
    case 2:
      return d2 ? d2(x) : throw DomainError("SmoothFn: second derivative not provided");
    default:
      throw DomainError("SmoothFn: derivative order " + std::to_string(order) + " unsupported");
  }
}

// ---- Legendre machinery --------------------------------------------------------

namespace {

// P_m and its first three derivatives at xi, for all degrees up to `degree`.
struct LegendreTable {
  std::vector<double> p, p1, p2, p3;

  LegendreTable(std::size_t degree, double xi) {
    std::size_t len = degree + 1;
    p.assign(len, 0.0);
    p1.assign(len, 0.0);
    p2.assign(len, 0.0);
    p3.assign(len, 0.0);
    p[0] = 1.0;
    if (degree >= 1) {
      p[1] = xi;
      p1[1] = 1.0;
    }
    for (std::size_t i = 1; i + 1 <= degree; ++i) {
      double a = 2.0 * i + 1.0;
      p[i + 1] = (a * xi * p[i] - i * p[i - 1]) / (i + 1.0);
      p1[i + 1] = a * p[i] + p1[i - 1];
      p2[i + 1] = a * p1[i] + p2[i - 1];
      p3[i + 1] = a * p2[i] + p3[i - 1];
    }
  }

  double deriv(std::size_t m, int order) const {
    switch (order) {
      case 0:
        return p[m];
      case 1:
        return p1[m];
      case 2:
        return p2[m];
      case 3:
        return p3[m];
      default:
        throw DomainError("LegendreTable: derivative order out of range");
    }
  }
};

// I_m(xi) = integral of P_{m-1} from -1 to xi (m >= 1); vanishes at xi = -1,
// and at xi = +1 for m >= 2.
double legendre_I(const LegendreTable& t, std::size_t m, double xi, int order) {
  if (order == 0) {
    if (m == 1) return xi + 1.0;
    return (t.p[m] - t.p[m - 2]) / (2.0 * m - 1.0);
  }
  return t.deriv(m - 1, order - 1);
}

double falling_factorial(int m, int o) {
  double f = 1.0;
  for (int i = 0; i < o; ++i) f *= m - i;
  return f;
}

double monomial_deriv(int m, double t, int order) {
  if (order > m) return 0.0;
  return falling_factorial(m, order) * std::pow(t, m - order);
}

}  // namespace

// ---- BasisSet -------------------------------------------------------------------

BasisSet::BasisSet(BasisKind kind, EssentialBc bc, std::size_t n, double x_lo, double x_hi,
                   SmoothFn lift)
    : kind_(kind), bc_(bc), n_(n), x_lo_(x_lo), x_hi_(x_hi), lift_(std::move(lift)) {}

BasisSet BasisSet::make(BasisKind kind, EssentialBc bc, std::size_t n, double x_lo, double x_hi,
                        SmoothFn lift) {
  if (n < 1) throw DimensionError("BasisSet: count must be positive");
  if (!(x_hi > x_lo)) throw DomainError("BasisSet: domain must satisfy x_hi > x_lo");
  if (kind == BasisKind::Monomial && n > 10) {
    throw DomainError("BasisSet: monomial kind is capped at n = 10 for conditioning");
  }
  return BasisSet(kind, bc, n, x_lo, x_hi, std::move(lift));
}

double BasisSet::eval(std::size_t k, double x, int order) const {
  if (k >= n_) throw DimensionError("BasisSet::eval: index " + std::to_string(k) + " out of range");
  if (order < 0 || order > 4) {
    throw DomainError("BasisSet::eval: derivative order " + std::to_string(order) +
                      " unsupported (max 4)");
  }
  double h = x_hi_ - x_lo_;
  double t = (x - x_lo_) / h;

  switch (kind_) {
    case BasisKind::Sine: {
      double omega, chain = std::pow(1.0 / h, order);
      if (bc_ == EssentialBc::LeftValue) {
        omega = (k + 0.5) * M_PI;  // free right end
      } else {
        omega = (k + 1.0) * M_PI;
      }
      if (bc_ == EssentialBc::ClampedLeft) {
        // 1 - cos(omega t): value and slope both vanish at the left end
        double w = std::pow(omega, order);
        switch (order % 4) {
          case 0:
            return chain * (order == 0 ? 1.0 - std::cos(omega * t) : -w * std::cos(omega * t));
          case 1:
            return chain * w * std::sin(omega * t);
          case 2:
            return chain * w * std::cos(omega * t);
          case 3:
            return chain * -w * std::sin(omega * t);
        }
      }
      double w = std::pow(omega, order);
      switch (order % 4) {
        case 0:
          return chain * w * std::sin(omega * t);
        case 1:
          return chain * w * std::cos(omega * t);
        case 2:
          return chain * -w * std::sin(omega * t);
        case 3:
          return chain * -w * std::cos(omega * t);
      }
      throw std::logic_error("unreachable");
    }
    case BasisKind::Legendre: {
      double xi = 2.0 * t - 1.0;
      double chain = std::pow(2.0 / h, order);
      std::size_t degree = n_ + 3;  // generous upper bound for all families
      LegendreTable table(degree, xi);
      switch (bc_) {
        case EssentialBc::LeftValue:
          return chain * legendre_I(table, k + 1, xi, order);
        case EssentialBc::BothValues:
          return chain * legendre_I(table, k + 2, xi, order);
        case EssentialBc::ClampedLeft: {
          std::size_t j = k + 1;
          if (order == 0) {
            if (j == 1) return 0.5 * (xi + 1.0) * (xi + 1.0);
            return (legendre_I(table, j + 1, xi, 0) - legendre_I(table, j - 1, xi, 0)) /
                   (2.0 * j - 1.0);
          }
          return chain * legendre_I(table, j, xi, order - 1);
        }
      }
      throw std::logic_error("unreachable");
    }
    case BasisKind::Monomial: {
      double chain = std::pow(1.0 / h, order);
      switch (bc_) {
        case EssentialBc::LeftValue:
          return chain * monomial_deriv(static_cast<int>(k) + 1, t, order);
        case EssentialBc::BothValues:
          return chain * (monomial_deriv(static_cast<int>(k) + 1, t, order) -
                          monomial_deriv(static_cast<int>(k) + 2, t, order));
        case EssentialBc::ClampedLeft:
          return chain * monomial_deriv(static_cast<int>(k) + 2, t, order);
      }
      throw std::logic_error("unreachable");
    }
  }
  throw std::logic_error("unreachable");
}

double BasisSet::lift(double x, int order) const { return lift_(x, order); }

// ---- QuadratureRule --------------------------------------------------------------

QuadratureRule QuadratureRule::gauss_legendre(std::size_t m, double a, double b) {
  if (m < 1) throw DomainError("QuadratureRule: need at least one point");
  if (!(b > a)) throw DomainError("QuadratureRule: domain must satisfy b > a");
  QuadratureRule rule;
  rule.x_lo = a;
  rule.x_hi = b;
  rule.points.resize(m);
  rule.weights.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root of P_m.
    double xi = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pd = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = xi;
      for (std::size_t j = 1; j < m; ++j) {
        double p2 = ((2.0 * j + 1.0) * xi * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      pd = m * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / pd;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - xi * xi) * pd * pd);
    rule.points[m - 1 - i] = a + 0.5 * (xi + 1.0) * (b - a);
    rule.weights[m - 1 - i] = 0.5 * (b - a) * w;
  }
  return rule;
}

double quadrature_integrate(const std::function<double(double)>& fn, const QuadratureRule& quad) {
  double acc = 0.0;
  for (std::size_t i = 0; i < quad.points.size(); ++i) acc += quad.weights[i] * fn(quad.points[i]);
  return acc;
}

// ---- LinearOperator1D --------------------------------------------------------------

LinearOperator1D LinearOperator1D::identity() {
  return of({Term{SmoothFn::constant(1.0), 0}});
}

LinearOperator1D LinearOperator1D::derivative(int order, double coeff) {
  return of({Term{SmoothFn::constant(coeff), order}});
}

LinearOperator1D LinearOperator1D::of(std::vector<Term> terms) {
  if (terms.empty()) throw DimensionError("LinearOperator1D: needs at least one term");
  for (const auto& t : terms) {
    if (t.order < 0 || t.order > 2) {
      throw DomainError("LinearOperator1D: derivative order " + std::to_string(t.order) +
                        " out of range [0, 2]");
    }
  }
  LinearOperator1D op;
  op.terms = std::move(terms);
  return op;
}

int LinearOperator1D::max_order() const {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t.order);
  return m;
}

double LinearOperator1D::apply_basis(const BasisSet& basis, std::size_t k, double x) const {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coeff(x) * basis.eval(k, x, t.order);
  return acc;
}

double LinearOperator1D::apply_lift(const BasisSet& basis, double x) const {
  if (!basis.has_lift()) return 0.0;
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coeff(x) * basis.lift(x, t.order);
  return acc;
}

LinearOperator1D operator+(const LinearOperator1D& a, const LinearOperator1D& b) {
  std::vector<LinearOperator1D::Term> terms = a.terms;
  terms.insert(terms.end(), b.terms.begin(), b.terms.end());
  return LinearOperator1D::of(std::move(terms));
}

// ---- Weighting -----------------------------------------------------------------------

Weighting Weighting::galerkin() { return Weighting{}; }

Weighting Weighting::collocation(std::vector<double> nodes) {
  if (nodes.empty()) throw DimensionError("Weighting::collocation: needs nodes");
  std::vector<double> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      throw DomainError("Weighting::collocation: nodes must be distinct");
    }
  }
  Weighting w;
  w.kind_ = Kind::Collocation;
  w.nodes_ = std::move(nodes);
  return w;
}

Weighting Weighting::least_squares(LinearOperator1D op) {
  Weighting w;
  w.kind_ = Kind::LeastSquares;
  w.op_ = std::move(op);
  return w;
}

Weighting Weighting::custom(std::function<double(std::size_t, double)> family) {
  if (!family) throw DomainError("Weighting::custom: empty family");
  Weighting w;
  w.kind_ = Kind::Custom;
  w.family_ = std::move(family);
  return w;
}

double Weighting::weight(const BasisSet& basis, std::size_t j, double x) const {
  switch (kind_) {
    case Kind::Galerkin:
      return basis.eval(j, x, 0);
    case Kind::LeastSquares:
      return op_.apply_basis(basis, j, x);
    case Kind::Custom:
      return family_(j, x);
    case Kind::Collocation:
      throw DomainError("Weighting: collocation has no integral weight function");
  }
  throw std::logic_error("unreachable");
}

// ---- assembly ------------------------------------------------------------------------

namespace {

void check_collocation_nodes(const Weighting& w, const BasisSet& basis) {
  if (w.nodes().size() != basis.size()) {
    std::ostringstream os;
    os << "collocation: " << w.nodes().size() << " nodes for " << basis.size()
       << " basis functions";
    throw DimensionError(os.str());
  }
  double span = basis.x_hi() - basis.x_lo();
  for (double node : w.nodes()) {
    if (node < basis.x_lo() - 1e-12 * span || node > basis.x_hi() + 1e-12 * span) {
      throw DomainError("collocation: node " + std::to_string(node) + " outside domain");
    }
  }
}

void check_quad_domain(const QuadratureRule& quad, const BasisSet& basis, const char* what) {
  double span = basis.x_hi() - basis.x_lo();
  if (std::abs(quad.x_lo - basis.x_lo()) > 1e-9 * span ||
      std::abs(quad.x_hi - basis.x_hi()) > 1e-9 * span) {
    std::ostringstream os;
    os << what << ": quadrature domain [" << quad.x_lo << ", " << quad.x_hi
       << "] does not match basis domain [" << basis.x_lo() << ", " << basis.x_hi() << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

AssembledOperator assemble_operator(const LinearOperator1D& op, const BasisSet& basis,
                                    const Weighting& weighting, const QuadratureRule& quad) {
  std::size_t n = basis.size();
  std::vector<double> matrix(n * n, 0.0);
  std::vector<double> offset(n, 0.0);

  if (weighting.kind() == Weighting::Kind::Collocation) {
    check_collocation_nodes(weighting, basis);
    for (std::size_t j = 0; j < n; ++j) {
      double x = weighting.nodes()[j];
      for (std::size_t k = 0; k < n; ++k) matrix[j * n + k] = op.apply_basis(basis, k, x);
      offset[j] = op.apply_lift(basis, x);
    }
  } else {
    check_quad_domain(quad, basis, "assemble_operator");
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      double x = quad.points[i];
      double wq = quad.weights[i];
      for (std::size_t j = 0; j < n; ++j) {
        double wj = wq * weighting.weight(basis, j, x);
        if (wj == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) matrix[j * n + k] += wj * op.apply_basis(basis, k, x);
        offset[j] += wj * op.apply_lift(basis, x);
      }
    }
  }
  return AssembledOperator{RealMatrix(n, n, std::move(matrix)), RealVector(std::move(offset))};
}

RealVector assemble_load(const SmoothFn& f, const BasisSet& basis, const Weighting& weighting,
                         const QuadratureRule& quad) {
  std::size_t n = basis.size();
  std::vector<double> load(n, 0.0);
  if (weighting.kind() == Weighting::Kind::Collocation) {
    check_collocation_nodes(weighting, basis);
    for (std::size_t j = 0; j < n; ++j) load[j] = f(weighting.nodes()[j]);
  } else {
    check_quad_domain(quad, basis, "assemble_load");
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      double x = quad.points[i];
      double fv = f(x);
      if (fv == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j)
        load[j] += quad.weights[i] * fv * weighting.weight(basis, j, x);
    }
  }
  return RealVector(std::move(load));
}

TraditionalForm assemble_traditional(const std::vector<QuadraticTerm>& products,
                                     const LinearOperator1D& linear, const SmoothFn& f,
                                     const BasisSet& basis, const Weighting& weighting,
                                     const QuadratureRule& quad) {
  std::size_t n = basis.size();
  std::vector<double> d(n * n, 0.0);
  std::vector<double> g(n * n * n, 0.0);
  std::vector<double> b(n, 0.0);

  auto accumulate_at = [&](std::size_t j, double x, double w) {
    // Expanding u = g_lift + sum_k x_k phi_k inside each product p(u) r(u)
    // sends the phi_k phi_l couplings to G, the lift cross terms to D, and the
    // pure lift parts to b.
    for (std::size_t k = 0; k < n; ++k) {
      d[j * n + k] += w * linear.apply_basis(basis, k, x);
    }
    b[j] += w * (f(x) - linear.apply_lift(basis, x));
    for (const auto& term : products) {
      double pg = term.p.apply_lift(basis, x);
      double rg = term.r.apply_lift(basis, x);
      std::vector<double> pk(n), rk(n);
      for (std::size_t k = 0; k < n; ++k) {
        pk[k] = term.p.apply_basis(basis, k, x);
        rk[k] = term.r.apply_basis(basis, k, x);
      }
      for (std::size_t k = 0; k < n; ++k) {
        d[j * n + k] += w * term.factor * (pk[k] * rg + pg * rk[k]);
        for (std::size_t l = 0; l < n; ++l) {
          g[j * n * n + k * n + l] += w * term.factor * pk[k] * rk[l];
        }
      }
      b[j] -= w * term.factor * pg * rg;
    }
  };

  if (weighting.kind() == Weighting::Kind::Collocation) {
    check_collocation_nodes(weighting, basis);
    for (std::size_t j = 0; j < n; ++j) accumulate_at(j, weighting.nodes()[j], 1.0);
  } else {
    check_quad_domain(quad, basis, "assemble_traditional");
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      double x = quad.points[i];
      for (std::size_t j = 0; j < n; ++j) {
        double wj = quad.weights[i] * weighting.weight(basis, j, x);
        if (wj != 0.0) accumulate_at(j, x, wj);
      }
    }
  }
  return TraditionalForm{RealMatrix(n, n, std::move(d)), RealMatrix(n, n * n, std::move(g)),
                         RealVector(std::move(b))};
}

TraditionalForm assemble_traditional_quadratic(const LinearOperator1D& p,
                                               const LinearOperator1D& r,
                                               const LinearOperator1D& linear, const SmoothFn& f,
                                               const BasisSet& basis, const Weighting& weighting,
                                               const QuadratureRule& quad) {
  return assemble_traditional({QuadraticTerm{1.0, p, r}}, linear, f, basis, weighting, quad);
}

RealVector eval_traditional(const TraditionalForm& tf, const RealVector& x, JacobianStats* stats) {
  if (x.size() != tf.d.cols()) {
    throw DimensionError("eval_traditional: x length " + std::to_string(x.size()) + " vs " +
                         std::to_string(tf.d.cols()));
  }
  std::size_t n = x.size();
  if (stats) stats->multiplications += n * n + n * n + n * n * n;  // D x, x kron x, G (x kron x)
  return tf.d * x + tf.g * kron(x, x) - tf.b;
}

RealMatrix jacobian_traditional(const TraditionalForm& tf, const RealVector& x,
                                JacobianStats* stats) {
  std::size_t n = x.size();
  if (n != tf.d.cols()) {
    throw DimensionError("jacobian_traditional: x length " + std::to_string(n) + " vs " +
                         std::to_string(tf.d.cols()));
  }
  // d/dx of G (x kron x) is G (I kron x + x kron I).
  std::vector<double> s(n * n * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t l = 0; l < n; ++l) s[(m * n + l) * n + m] += x[l];
    for (std::size_t k = 0; k < n; ++k) s[(k * n + m) * n + m] += x[k];
  }
  if (stats) stats->multiplications += n * n * n * n;  // the G-by-selection product
  return tf.d + tf.g * RealMatrix(n * n, n, std::move(s));
}

}  // namespace wrm
