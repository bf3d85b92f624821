#include "wrm/matrix.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace wrm {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

void check_finite(const std::vector<double>& entries, std::size_t cols, const char* what) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i])) {
      std::ostringstream os;
      os << what << ": non-finite entry at ";
      if (cols > 0) {
        os << "(" << i / cols << "," << i % cols << ")";
      } else {
        os << "index " << i;
      }
      throw DomainError(os.str());
    }
  }
}

void require_same_shape(const RealMatrix& a, const RealMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch (" +
                         shape_str(a.rows(), a.cols()) + " vs " +
                         shape_str(b.rows(), b.cols()) + ")");
  }
}

void require_same_size(const RealVector& a, const RealVector& b, const char* op) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << op << ": length mismatch (" << a.size() << " vs " << b.size() << ")";
    throw DimensionError(os.str());
  }
}

bool is_nonnegative_integer(double q) {
  return std::isfinite(q) && q >= 0.0 && q == std::floor(q);
}

double checked_pow(double base, double q, std::size_t i, std::size_t j, bool matrix) {
  if (!is_nonnegative_integer(q) && base <= 0.0) {
    std::ostringstream os;
    os << "had_power: exponent " << q << " requires a positive entry, found " << base << " at ";
    if (matrix)
      os << "(" << i << "," << j << ")";
    else
      os << "index " << i;
    throw DomainError(os.str());
  }
  return std::pow(base, q);
}

}  // namespace

RealVector::RealVector(std::size_t n) : entries_(n, 0.0) {
  if (n == 0) throw DimensionError("RealVector: length must be positive");
}

RealVector::RealVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionError("RealVector: length must be positive");
  check_finite(entries_, 0, "RealVector");
}

RealVector::RealVector(std::initializer_list<double> entries)
    : RealVector(std::vector<double>(entries)) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DimensionError("RealMatrix: dimensions must be positive");
}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), entries_(std::move(row_major)) {
  if (rows == 0 || cols == 0) throw DimensionError("RealMatrix: dimensions must be positive");
  if (entries_.size() != rows * cols) {
    std::ostringstream os;
    os << "RealMatrix: " << entries_.size() << " entries for shape " << shape_str(rows, cols);
    throw DimensionError(os.str());
  }
  check_finite(entries_, cols_, "RealMatrix");
}

RealMatrix RealMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r > 0 ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("RealMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return RealMatrix(r, c, std::move(data));
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return RealMatrix(n, n, std::move(data));
}

RealMatrix RealMatrix::ones(std::size_t rows, std::size_t cols) {
  return RealMatrix(rows, cols, std::vector<double>(rows * cols, 1.0));
}

// ---- Hadamard algebra ------------------------------------------------------

RealMatrix had_product(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b, "had_product");
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealVector had_product(const RealVector& a, const RealVector& b) {
  require_same_size(a, b, "had_product");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return RealVector(std::move(out));
}

RealMatrix had_power(const RealMatrix& a, double q) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out[i * a.cols() + j] = checked_pow(a(i, j), q, i, j, true);
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealVector had_power(const RealVector& a, double q) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_pow(a[i], q, i, 0, false);
  return RealVector(std::move(out));
}

RealMatrix had_inverse(const RealMatrix& a) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) {
        std::ostringstream os;
        os << "had_inverse: zero entry at (" << i << "," << j << ")";
        throw DomainError(os.str());
      }
      out[i * a.cols() + j] = 1.0 / a(i, j);
    }
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealVector had_inverse(const RealVector& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      std::ostringstream os;
      os << "had_inverse: zero entry at index " << i;
      throw DomainError(os.str());
    }
    out[i] = 1.0 / a[i];
  }
  return RealVector(std::move(out));
}

// ---- scalar function registry ----------------------------------------------

namespace {

std::map<std::string, ScalarFunction>& registry() {
  static std::map<std::string, ScalarFunction> fns = {
      {"sin", {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }}},
      {"cos", {"cos", [](double x) { return std::cos(x); },
               [](double x) { return -std::sin(x); }}},
      {"exp", {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }}},
  };
  return fns;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

template <typename Apply>
void apply_checked(const ScalarFunction& fn, const std::vector<double>& in,
                   std::vector<double>& out, Apply index_str) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = fn.value(in[i]);
    if (!std::isfinite(out[i])) {
      throw DomainError("had_func: " + fn.name + "(" + std::to_string(in[i]) +
                        ") is not finite at " + index_str(i));
    }
  }
}

}  // namespace

const ScalarFunction& scalar_function(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(name);
  if (it == registry().end()) throw DomainError("scalar_function: unregistered name '" + name + "'");
  return it->second;
}

void register_scalar_function(ScalarFunction fn) {
  if (!fn.value || !fn.derivative) {
    throw DomainError("register_scalar_function: '" + fn.name + "' needs value and derivative");
  }
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[fn.name] = std::move(fn);
}

RealMatrix had_func(const std::string& fn, const RealMatrix& a) {
  return had_func(scalar_function(fn), a);
}

RealMatrix had_func(const ScalarFunction& fn, const RealMatrix& a) {
  std::vector<double> out(a.data().size());
  std::size_t cols = a.cols();
  apply_checked(fn, a.data(), out, [cols](std::size_t i) {
    return "(" + std::to_string(i / cols) + "," + std::to_string(i % cols) + ")";
  });
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealVector had_func(const ScalarFunction& fn, const RealVector& a) {
  std::vector<double> out(a.size());
  apply_checked(fn, a.data(), out, [](std::size_t i) { return "index " + std::to_string(i); });
  return RealVector(std::move(out));
}

// ---- Kronecker bridge ------------------------------------------------------

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  std::size_t rows = a.rows() * b.rows();
  std::size_t cols = a.cols() * b.cols();
  std::vector<double> out(rows * cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          out[(i * b.rows() + p) * cols + (j * b.cols() + q)] = a(i, j) * b(p, q);
  return RealMatrix(rows, cols, std::move(out));
}

RealVector kron(const RealVector& a, const RealVector& b) {
  std::vector<double> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return RealVector(std::move(out));
}

RealMatrix selection_matrix(std::size_t n) {
  if (n == 0) throw DimensionError("selection_matrix: n must be positive");
  std::vector<double> out(n * n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) out[(k * n + k) * n + k] = 1.0;
  return RealMatrix(n * n, n, std::move(out));
}

// ---- SJT products ----------------------------------------------------------

RealMatrix sjt_post(const RealMatrix& a, const RealVector& u) {
  if (u.size() != a.rows()) {
    std::ostringstream os;
    os << "sjt_post: vector length " << u.size() << " vs " << a.rows() << " rows";
    throw DimensionError(os.str());
  }
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i * a.cols() + j] = a(i, j) * u[i];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealMatrix sjt_pre(const RealVector& v, const RealMatrix& a) {
  if (v.size() != a.cols()) {
    std::ostringstream os;
    os << "sjt_pre: vector length " << v.size() << " vs " << a.cols() << " columns";
    throw DimensionError(os.str());
  }
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i * a.cols() + j] = a(i, j) * v[j];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

// ---- plain dense arithmetic --------------------------------------------------

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b, "operator+");
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealMatrix operator-(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b, "operator-");
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealMatrix operator*(double k, const RealMatrix& a) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k * a.data()[i];
  return RealMatrix(a.rows(), a.cols(), std::move(out));
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("operator*: inner dimensions differ (" + shape_str(a.rows(), a.cols()) +
                         " vs " + shape_str(b.rows(), b.cols()) + ")");
  }
  std::vector<double> out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out[i * b.cols() + j] += aik * b(k, j);
    }
  return RealMatrix(a.rows(), b.cols(), std::move(out));
}

RealVector operator*(const RealMatrix& a, const RealVector& x) {
  if (a.cols() != x.size()) {
    std::ostringstream os;
    os << "operator*: matrix " << shape_str(a.rows(), a.cols()) << " vs vector " << x.size();
    throw DimensionError(os.str());
  }
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return RealVector(std::move(out));
}

RealVector operator+(const RealVector& a, const RealVector& b) {
  require_same_size(a, b, "operator+");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return RealVector(std::move(out));
}

RealVector operator-(const RealVector& a, const RealVector& b) {
  require_same_size(a, b, "operator-");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return RealVector(std::move(out));
}

RealVector operator*(double k, const RealVector& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k * a[i];
  return RealVector(std::move(out));
}

RealMatrix transpose(const RealMatrix& a) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j * a.rows() + i] = a(i, j);
  return RealMatrix(a.cols(), a.rows(), std::move(out));
}

double max_norm(const RealVector& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

double max_norm(const RealMatrix& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

RealVector concat(const RealVector& a, const RealVector& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  return RealVector(std::move(out));
}

RealVector slice(const RealVector& v, std::size_t begin, std::size_t count) {
  if (begin + count > v.size()) throw DimensionError("slice: range out of bounds");
  return RealVector(std::vector<double>(v.data().begin() + begin, v.data().begin() + begin + count));
}

}  // namespace wrm
