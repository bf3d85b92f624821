#include "wrm/expr.hpp"

#include <cmath>
#include <sstream>

namespace wrm {

struct HExpr::Node {
  Kind kind;
  std::size_t out_len = 0;
  std::size_t unknown = 0;  // 0 = does not reference the unknown
  RealMatrix m;             // Affine
  RealVector c;             // Affine offset
  std::vector<HExpr> children;
  double q = 0.0;           // HadPower
  double k = 0.0;           // Scale
  ScalarFunction fn;        // HadFunc
  RealVector v;             // Const
};

namespace {

std::size_t merge_unknown(std::size_t a, std::size_t b, const char* what) {
  if (a == 0) return b;
  if (b == 0) return a;
  if (a != b) {
    std::ostringstream os;
    os << what << ": children disagree on unknown dimension (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
  return a;
}

}  // namespace

HExpr HExpr::affine(RealMatrix m, RealVector c) {
  if (c.size() != m.rows()) {
    throw DimensionError("HExpr::affine: offset length " + std::to_string(c.size()) +
                         " vs " + std::to_string(m.rows()) + " rows");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Affine;
  n->out_len = m.rows();
  n->unknown = m.cols();
  n->m = std::move(m);
  n->c = std::move(c);
  return HExpr(std::move(n));
}

HExpr HExpr::affine(RealMatrix m) {
  RealVector zero(m.rows());
  return affine(std::move(m), std::move(zero));
}

HExpr HExpr::affine(RealMatrix m, RealVector c, HExpr child) {
  if (c.size() != m.rows()) {
    throw DimensionError("HExpr::affine: offset length " + std::to_string(c.size()) +
                         " vs " + std::to_string(m.rows()) + " rows");
  }
  if (m.cols() != child.output_length()) {
    throw DimensionError("HExpr::affine: matrix has " + std::to_string(m.cols()) +
                         " columns but child produces " + std::to_string(child.output_length()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Affine;
  n->out_len = m.rows();
  n->unknown = child.unknown_dim();
  n->m = std::move(m);
  n->c = std::move(c);
  n->children.push_back(std::move(child));
  return HExpr(std::move(n));
}

HExpr HExpr::had_product(HExpr a, HExpr b) {
  if (a.output_length() != b.output_length()) {
    throw DimensionError("HExpr::had_product: lengths " + std::to_string(a.output_length()) +
                         " vs " + std::to_string(b.output_length()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::HadProduct;
  n->out_len = a.output_length();
  n->unknown = merge_unknown(a.unknown_dim(), b.unknown_dim(), "HExpr::had_product");
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  return HExpr(std::move(n));
}

HExpr HExpr::had_power(HExpr child, double exponent) {
  if (!std::isfinite(exponent)) throw DomainError("HExpr::had_power: non-finite exponent");
  auto n = std::make_shared<Node>();
  n->kind = Kind::HadPower;
  n->out_len = child.output_length();
  n->unknown = child.unknown_dim();
  n->q = exponent;
  n->children.push_back(std::move(child));
  return HExpr(std::move(n));
}

HExpr HExpr::had_func(const std::string& fn, HExpr child) {
  return had_func(scalar_function(fn), std::move(child));
}

HExpr HExpr::had_func(ScalarFunction fn, HExpr child) {
  if (!fn.value || !fn.derivative) {
    throw DomainError("HExpr::had_func: '" + fn.name + "' needs value and derivative");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::HadFunc;
  n->out_len = child.output_length();
  n->unknown = child.unknown_dim();
  n->fn = std::move(fn);
  n->children.push_back(std::move(child));
  return HExpr(std::move(n));
}

HExpr HExpr::scale(double k, HExpr child) {
  if (!std::isfinite(k)) throw DomainError("HExpr::scale: non-finite factor");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->out_len = child.output_length();
  n->unknown = child.unknown_dim();
  n->k = k;
  n->children.push_back(std::move(child));
  return HExpr(std::move(n));
}

HExpr HExpr::sum(std::vector<HExpr> children) {
  if (children.empty()) throw DimensionError("HExpr::sum: needs at least one child");
  std::size_t len = children.front().output_length();
  std::size_t unk = 0;
  for (const auto& ch : children) {
    if (ch.output_length() != len) {
      throw DimensionError("HExpr::sum: child length " + std::to_string(ch.output_length()) +
                           " vs " + std::to_string(len));
    }
    unk = merge_unknown(unk, ch.unknown_dim(), "HExpr::sum");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->out_len = len;
  n->unknown = unk;
  n->children = std::move(children);
  return HExpr(std::move(n));
}

HExpr HExpr::constant(RealVector v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->out_len = v.size();
  n->unknown = 0;
  n->v = std::move(v);
  return HExpr(std::move(n));
}

HExpr HExpr::arg(std::size_t m) { return affine(RealMatrix::identity(m)); }

HExpr::Kind HExpr::kind() const { return node_->kind; }
std::size_t HExpr::output_length() const { return node_->out_len; }
std::size_t HExpr::unknown_dim() const { return node_->unknown; }
const RealMatrix& HExpr::matrix() const { return node_->m; }
const RealVector& HExpr::offset() const { return node_->c; }
bool HExpr::has_affine_child() const {
  return node_->kind == Kind::Affine && !node_->children.empty();
}
double HExpr::exponent() const { return node_->q; }
double HExpr::scale_factor() const { return node_->k; }
const ScalarFunction& HExpr::function() const { return node_->fn; }
const RealVector& HExpr::const_value() const { return node_->v; }
std::size_t HExpr::child_count() const { return node_->children.size(); }
const HExpr& HExpr::child(std::size_t i) const { return node_->children[i]; }

// ---- evaluation ---------------------------------------------------------------

namespace {

void add_mults(JacobianStats* s, std::size_t n) {
  if (s) s->multiplications += n;
}

void visit(JacobianStats* s) {
  if (s) s->node_visits += 1;
}

RealVector pow_checked(const RealVector& u, double q) {
  return had_power(u, q);  // domain errors carry the entry index
}

}  // namespace

RealVector eval_node(const HExpr& node, const RealVector& x, JacobianStats* stats) {
  if (node.unknown_dim() != 0 && node.unknown_dim() != x.size()) {
    throw DimensionError("eval_node: x has length " + std::to_string(x.size()) +
                         " but tree expects " + std::to_string(node.unknown_dim()));
  }
  visit(stats);
  switch (node.kind()) {
    case HExpr::Kind::Affine: {
      RealVector inner =
          node.has_affine_child() ? eval_node(node.child(0), x, stats) : x;
      add_mults(stats, node.matrix().rows() * node.matrix().cols());
      return node.matrix() * inner + node.offset();
    }
    case HExpr::Kind::HadProduct: {
      RealVector a = eval_node(node.child(0), x, stats);
      RealVector b = eval_node(node.child(1), x, stats);
      add_mults(stats, a.size());
      return had_product(a, b);
    }
    case HExpr::Kind::HadPower: {
      RealVector u = eval_node(node.child(0), x, stats);
      add_mults(stats, u.size());
      return pow_checked(u, node.exponent());
    }
    case HExpr::Kind::HadFunc: {
      RealVector u = eval_node(node.child(0), x, stats);
      return had_func(node.function(), u);
    }
    case HExpr::Kind::Scale: {
      RealVector u = eval_node(node.child(0), x, stats);
      add_mults(stats, u.size());
      return node.scale_factor() * u;
    }
    case HExpr::Kind::Sum: {
      RealVector acc = eval_node(node.child(0), x, stats);
      for (std::size_t i = 1; i < node.child_count(); ++i)
        acc = acc + eval_node(node.child(i), x, stats);
      return acc;
    }
    case HExpr::Kind::Const:
      return node.const_value();
  }
  throw std::logic_error("eval_node: unreachable");
}

RealVector eval_node(const HExpr& node, const RealVector& x) {
  return eval_node(node, x, nullptr);
}

// ---- Jacobian pass ---------------------------------------------------------

// One bottom-up traversal produces value and Jacobian together. Values are
// computed only where a parent needs them, so the stats reflect exactly the
// work the SJT rules require: a single Affine root costs zero multiplications.
struct ExprPass {
  const RealVector& x;
  JacobianStats* stats;

  struct Result {
    RealVector value;     // meaningful iff has_value
    bool has_value = false;
    RealMatrix jac;       // meaningful iff !zero_jac
    bool zero_jac = true;
  };

  RealMatrix zero_jacobian(std::size_t rows) const { return RealMatrix(rows, x.size()); }

  Result run(const HExpr& node, bool need_value) {
    visit(stats);
    Result r;
    switch (node.kind()) {
      case HExpr::Kind::Affine: {
        const RealMatrix& m = node.matrix();
        if (!node.has_affine_child()) {
          if (need_value) {
            add_mults(stats, m.rows() * m.cols());
            r.value = m * x + node.offset();
            r.has_value = true;
          }
          r.jac = m;
          r.zero_jac = false;
          return r;
        }
        Result ch = run(node.child(0), need_value);
        if (need_value) {
          add_mults(stats, m.rows() * m.cols());
          r.value = m * ch.value + node.offset();
          r.has_value = true;
        }
        if (!ch.zero_jac) {
          add_mults(stats, m.rows() * m.cols() * x.size());
          r.jac = m * ch.jac;  // chain rule through the composed map
          r.zero_jac = false;
        }
        return r;
      }
      case HExpr::Kind::HadProduct: {
        const HExpr& u = node.child(0);
        const HExpr& v = node.child(1);
        bool u_has_jac = u.unknown_dim() != 0;
        bool v_has_jac = v.unknown_dim() != 0;
        Result ru = run(u, need_value || v_has_jac);
        Result rv = run(v, need_value || u_has_jac);
        if (need_value) {
          add_mults(stats, ru.value.size());
          r.value = had_product(ru.value, rv.value);
          r.has_value = true;
        }
        // d(u o v) = (du) diag-scaled by v  +  (dv) diag-scaled by u
        if (u_has_jac) {
          add_mults(stats, ru.jac.rows() * ru.jac.cols());
          r.jac = sjt_post(ru.jac, rv.value);
          r.zero_jac = false;
        }
        if (v_has_jac) {
          add_mults(stats, rv.jac.rows() * rv.jac.cols());
          RealMatrix second = sjt_post(rv.jac, ru.value);
          r.jac = r.zero_jac ? second : r.jac + second;
          r.zero_jac = false;
        }
        return r;
      }
      case HExpr::Kind::HadPower: {
        bool has_jac = node.child(0).unknown_dim() != 0;
        Result ch = run(node.child(0), true);
        double q = node.exponent();
        if (need_value) {
          add_mults(stats, ch.value.size());
          r.value = pow_checked(ch.value, q);
          r.has_value = true;
        }
        if (has_jac) {
          add_mults(stats, 2 * ch.value.size());
          RealVector scale_vec = q * pow_checked(ch.value, q - 1.0);
          add_mults(stats, ch.jac.rows() * ch.jac.cols());
          r.jac = sjt_post(ch.jac, scale_vec);
          r.zero_jac = false;
        }
        return r;
      }
      case HExpr::Kind::HadFunc: {
        bool has_jac = node.child(0).unknown_dim() != 0;
        Result ch = run(node.child(0), true);
        if (need_value) {
          r.value = had_func(node.function(), ch.value);
          r.has_value = true;
        }
        if (has_jac) {
          std::vector<double> d(ch.value.size());
          for (std::size_t i = 0; i < d.size(); ++i) d[i] = node.function().derivative(ch.value[i]);
          add_mults(stats, ch.jac.rows() * ch.jac.cols());
          r.jac = sjt_post(ch.jac, RealVector(std::move(d)));
          r.zero_jac = false;
        }
        return r;
      }
      case HExpr::Kind::Scale: {
        Result ch = run(node.child(0), need_value);
        if (need_value) {
          add_mults(stats, ch.value.size());
          r.value = node.scale_factor() * ch.value;
          r.has_value = true;
        }
        if (!ch.zero_jac) {
          add_mults(stats, ch.jac.rows() * ch.jac.cols());
          r.jac = node.scale_factor() * ch.jac;
          r.zero_jac = false;
        }
        return r;
      }
      case HExpr::Kind::Sum: {
        for (std::size_t i = 0; i < node.child_count(); ++i) {
          Result ch = run(node.child(i), need_value);
          if (need_value) {
            r.value = r.has_value ? r.value + ch.value : ch.value;
            r.has_value = true;
          }
          if (!ch.zero_jac) {
            r.jac = r.zero_jac ? ch.jac : r.jac + ch.jac;
            r.zero_jac = false;
          }
        }
        return r;
      }
      case HExpr::Kind::Const: {
        if (need_value) {
          r.value = node.const_value();
          r.has_value = true;
        }
        return r;
      }
    }
    throw std::logic_error("jacobian pass: unreachable");
  }
};

std::pair<RealMatrix, JacobianStats> jacobian_with_stats(const HExpr& node, const RealVector& x) {
  if (node.unknown_dim() != 0 && node.unknown_dim() != x.size()) {
    throw DimensionError("jacobian_node: x has length " + std::to_string(x.size()) +
                         " but tree expects " + std::to_string(node.unknown_dim()));
  }
  JacobianStats stats;
  ExprPass pass{x, &stats};
  ExprPass::Result r = pass.run(node, false);
  RealMatrix jac = r.zero_jac ? pass.zero_jacobian(node.output_length()) : r.jac;
  return {std::move(jac), stats};
}

RealMatrix jacobian_node(const HExpr& node, const RealVector& x) {
  return jacobian_with_stats(node, x).first;
}

// ---- finite differences ------------------------------------------------------

namespace {

RealVector with_entry(const RealVector& v, std::size_t i, double value) {
  std::vector<double> data = v.data();
  data[i] = value;
  return RealVector(std::move(data));
}

[[noreturn]] void rethrow_fd(std::size_t column, const std::exception& e) {
  throw DomainError("finite-difference column " + std::to_string(column) + ": " + e.what());
}

}  // namespace

RealMatrix fd_jacobian_fn(const std::function<RealVector(const RealVector&)>& fn,
                          const RealVector& x, double h_scale) {
  std::size_t m = x.size();
  std::size_t rows = 0;
  std::vector<std::vector<double>> cols(m);
  for (std::size_t j = 0; j < m; ++j) {
    double h = h_scale * std::max(1.0, std::abs(x[j]));
    RealVector fp(1), fm(1);
    try {
      fp = fn(with_entry(x, j, x[j] + h));
      fm = fn(with_entry(x, j, x[j] - h));
    } catch (const std::exception& e) {
      rethrow_fd(j, e);
    }
    rows = fp.size();
    cols[j].resize(rows);
    for (std::size_t i = 0; i < rows; ++i) cols[j][i] = (fp[i] - fm[i]) / (2.0 * h);
  }
  std::vector<double> out(rows * m);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = cols[j][i];
  return RealMatrix(rows, m, std::move(out));
}

RealMatrix fd_jacobian(const HExpr& node, const RealVector& x, double h_scale,
                       JacobianStats* stats) {
  if (node.unknown_dim() != 0 && node.unknown_dim() != x.size()) {
    throw DimensionError("fd_jacobian: x has length " + std::to_string(x.size()) +
                         " but tree expects " + std::to_string(node.unknown_dim()));
  }
  std::size_t m = x.size();
  std::size_t rows = node.output_length();
  std::vector<double> out(rows * m);
  for (std::size_t j = 0; j < m; ++j) {
    double h = h_scale * std::max(1.0, std::abs(x[j]));
    RealVector fp(1), fm(1);
    try {
      fp = eval_node(node, with_entry(x, j, x[j] + h), stats);
      fm = eval_node(node, with_entry(x, j, x[j] - h), stats);
    } catch (const std::exception& e) {
      rethrow_fd(j, e);
    }
    add_mults(stats, rows);  // scaling the difference column by 1/(2h)
    for (std::size_t i = 0; i < rows; ++i) out[i * m + j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return RealMatrix(rows, m, std::move(out));
}

JacobianStats fd_jacobian_cost(const HExpr& node, const RealVector& x, FdScheme scheme) {
  JacobianStats stats;
  std::size_t m = x.size();
  std::size_t rows = node.output_length();
  if (scheme == FdScheme::OneSided) {
    eval_node(node, x, &stats);  // base point, reused by every column
    for (std::size_t j = 0; j < m; ++j) {
      double h = 1e-8 * std::max(1.0, std::abs(x[j]));
      eval_node(node, with_entry(x, j, x[j] + h), &stats);
      stats.multiplications += rows;  // column scaling by 1/h
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      eval_node(node, with_entry(x, j, x[j] + h), &stats);
      eval_node(node, with_entry(x, j, x[j] - h), &stats);
      stats.multiplications += rows;
    }
  }
  return stats;
}

// ---- HSystem -----------------------------------------------------------------

HSystem::HSystem(HExpr residual, RealVector rhs, std::optional<std::size_t> linear_part)
    : residual_(std::move(residual)), rhs_(std::move(rhs)), linear_part_(linear_part) {
  if (residual_.output_length() != rhs_.size()) {
    throw DimensionError("HSystem: residual length " + std::to_string(residual_.output_length()) +
                         " vs rhs length " + std::to_string(rhs_.size()));
  }
  if (linear_part_) {
    if (residual_.kind() != HExpr::Kind::Sum) {
      throw DimensionError("HSystem: linear part requires a top-level sum");
    }
    if (*linear_part_ >= residual_.child_count()) {
      throw DimensionError("HSystem: linear part index " + std::to_string(*linear_part_) +
                           " out of range");
    }
    const HExpr& part = residual_.child(*linear_part_);
    if (part.kind() != HExpr::Kind::Affine || part.has_affine_child()) {
      throw DimensionError("HSystem: designated linear part must be a plain affine summand");
    }
    if (part.matrix().rows() != part.matrix().cols()) {
      throw DimensionError("HSystem: linear part matrix must be square");
    }
  }
}

const RealMatrix& HSystem::linear_matrix() const {
  if (!linear_part_) throw DimensionError("HSystem: no linear part designated");
  return residual_.child(*linear_part_).matrix();
}

// ---- catalog builders ----------------------------------------------------------

HExpr catalog_coeff_product(const RealVector& c, const RealMatrix& ax) {
  if (c.size() != ax.rows()) {
    throw DimensionError("catalog_coeff_product: coefficient length " + std::to_string(c.size()) +
                         " vs " + std::to_string(ax.rows()) + " rows");
  }
  return HExpr::had_product(HExpr::constant(c), HExpr::affine(ax));
}

HExpr catalog_power(const RealMatrix& ax, double q) {
  if (q == 1.0) return HExpr::affine(ax);
  return HExpr::had_power(HExpr::affine(ax), q);
}

HExpr catalog_product_of_powers(const RealMatrix& ax, double m, const RealMatrix& ay, double n) {
  if (ax.rows() != ay.rows() || ax.cols() != ay.cols()) {
    throw DimensionError("catalog_product_of_powers: factor shapes differ");
  }
  std::size_t dim = ax.cols();
  auto factor = [&](const RealMatrix& a, double p) {
    if (p == 1.0) return HExpr::affine(a);
    return HExpr::affine(a, RealVector(a.rows()), HExpr::had_power(HExpr::arg(dim), p));
  };
  return HExpr::had_product(factor(ax, m), factor(ay, n));
}

HExpr catalog_sine(const RealMatrix& ax) { return HExpr::had_func("sin", HExpr::affine(ax)); }

HExpr catalog_exp(const RealMatrix& ax) { return HExpr::had_func("exp", HExpr::affine(ax)); }

HExpr build_catalog_form(CatalogForm kind, const CatalogInputs& in) {
  switch (kind) {
    case CatalogForm::CoeffTimesDerivative:
      return catalog_coeff_product(in.coeff, in.ax);
    case CatalogForm::Power:
      return catalog_power(in.ax, in.q);
    case CatalogForm::ProductOfPowers:
      return catalog_product_of_powers(in.ax, in.m, in.ay, in.n);
    case CatalogForm::Sine:
      return catalog_sine(in.ax);
    case CatalogForm::Exp:
      return catalog_exp(in.ax);
  }
  throw std::logic_error("build_catalog_form: unreachable");
}

}  // namespace wrm
