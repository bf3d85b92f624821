#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrm {

/// Thrown when operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an entry leaves the mathematical domain of an operation
/// (nonpositive base under a fractional power, zero under inversion, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown by the dense solver when a pivot collapses to working precision.
class SingularError : public std::runtime_error {
 public:
  SingularError(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_index(pivot) {}
  std::size_t pivot_index;
};

/// Dense real vector. Entries are validated finite at construction; the value
/// is immutable afterwards and every operation allocates a fresh result, so
/// vectors can be shared freely across threads.
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t n);                  // zero vector
  explicit RealVector(std::vector<double> entries);
  RealVector(std::initializer_list<double> entries);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& data() const { return entries_; }

 private:
  std::vector<double> entries_;
};

/// Dense real matrix, row-major. Same immutability contract as RealVector.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols);      // zero matrix
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static RealMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static RealMatrix identity(std::size_t n);
  static RealMatrix ones(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  const std::vector<double>& data() const { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

// ---- Hadamard algebra ------------------------------------------------------

/// Entrywise product; operands must have identical shape.
RealMatrix had_product(const RealMatrix& a, const RealMatrix& b);
RealVector had_product(const RealVector& a, const RealVector& b);

/// Entrywise power. A non-integer or negative exponent requires strictly
/// positive entries; violations report the offending index.
RealMatrix had_power(const RealMatrix& a, double q);
RealVector had_power(const RealVector& a, double q);

/// Entrywise reciprocal; zero entries are a domain error.
RealMatrix had_inverse(const RealMatrix& a);
RealVector had_inverse(const RealVector& a);

/// A scalar function paired with its derivative, applied entrywise by name.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Look up a registered scalar function (sin, cos, exp are built in).
const ScalarFunction& scalar_function(const std::string& name);
/// Register or replace a scalar function under its name.
void register_scalar_function(ScalarFunction fn);

/// Entrywise application of a registered scalar function.
RealMatrix had_func(const std::string& fn, const RealMatrix& a);
RealMatrix had_func(const ScalarFunction& fn, const RealMatrix& a);
RealVector had_func(const ScalarFunction& fn, const RealVector& a);

// ---- Kronecker bridge ------------------------------------------------------

/// Kronecker product, shape (rA*rB) x (cA*cB).
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);
RealVector kron(const RealVector& a, const RealVector& b);

/// N^2 x N selection matrix whose k-th column is e_k (x) e_k; it links the
/// Hadamard and Kronecker products via E_N^T (A (x) B) E_M = A o B.
RealMatrix selection_matrix(std::size_t n);

// ---- SJT products ----------------------------------------------------------

/// Postmultiplying SJT product: row i of A scaled by u_i.
RealMatrix sjt_post(const RealMatrix& a, const RealVector& u);

/// Premultiplying SJT product: column j of A scaled by v_j.
RealMatrix sjt_pre(const RealVector& v, const RealMatrix& a);

// ---- Plain dense arithmetic -------------------------------------------------

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator-(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator*(double k, const RealMatrix& a);
RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);   // matrix product
RealVector operator*(const RealMatrix& a, const RealVector& x);   // matrix-vector
RealVector operator+(const RealVector& a, const RealVector& b);
RealVector operator-(const RealVector& a, const RealVector& b);
RealVector operator*(double k, const RealVector& a);

RealMatrix transpose(const RealMatrix& a);

double max_norm(const RealVector& v);
double max_norm(const RealMatrix& a);

RealVector concat(const RealVector& a, const RealVector& b);
RealVector slice(const RealVector& v, std::size_t begin, std::size_t count);

}  // namespace wrm
