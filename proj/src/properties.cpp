#include "wrm/properties.hpp"

#include <cmath>
#include <random>

#include "wrm/solvers.hpp"
#include "wrm/symmetric_eigen.hpp"

namespace wrm {

namespace {

RealMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> data(rows * cols);
  for (double& x : data) x = dist(rng);
  return RealMatrix(rows, cols, std::move(data));
}

RealMatrix random_spsd(std::mt19937_64& rng, std::size_t n) {
  RealMatrix r = random_matrix(rng, n, n);
  return transpose(r) * r;
}

double rel_diff(const RealMatrix& a, const RealMatrix& b) {
  double scale = std::max({max_norm(a), max_norm(b), 1e-30});
  return max_norm(a - b) / scale;
}

}  // namespace

bool PropertySuiteReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

PropertySuiteReport run_hadamard_property_suite(std::size_t cases, std::uint64_t seed) {
  if (cases < 1) throw DomainError("property suite: case count must be positive");
  constexpr std::size_t kSize = 6;
  PropertySuiteReport report;

  // Commutativity must hold bitwise for finite inputs.
  {
    std::mt19937_64 rng(seed);
    PropertyCheckResult r{"commutativity", true, 0.0, cases};
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_matrix(rng, kSize, kSize);
      RealMatrix b = random_matrix(rng, kSize, kSize);
      double d = max_norm(had_product(a, b) - had_product(b, a));
      r.worst = std::max(r.worst, d);
      if (d != 0.0) r.passed = false;
    }
    report.checks.push_back(r);
  }

  // Scalar association: k (A o B) = (k A) o B.
  {
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> kdist(-4.0, 4.0);
    PropertyCheckResult r{"scalar-association", true, 0.0, cases};
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_matrix(rng, kSize, kSize);
      RealMatrix b = random_matrix(rng, kSize, kSize);
      double k = kdist(rng);
      double d = rel_diff(k * had_product(a, b), had_product(k * a, b));
      r.worst = std::max(r.worst, d);
      if (d > 1e-12) r.passed = false;
    }
    report.checks.push_back(r);
  }

  // Distributivity: (A + B) o Q = A o Q + B o Q.
  {
    std::mt19937_64 rng(seed + 2);
    PropertyCheckResult r{"distributivity", true, 0.0, cases};
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_matrix(rng, kSize, kSize);
      RealMatrix b = random_matrix(rng, kSize, kSize);
      RealMatrix q = random_matrix(rng, kSize, kSize);
      double d = rel_diff(had_product(a + b, q), had_product(a, q) + had_product(b, q));
      r.worst = std::max(r.worst, d);
      if (d > 1e-12) r.passed = false;
    }
    report.checks.push_back(r);
  }

  // Kronecker bridge on the seeded square pairs.
  {
    std::mt19937_64 rng(seed + 3);
    PropertyCheckResult r{"kronecker-bridge", true, 0.0, cases};
    RealMatrix e6 = selection_matrix(kSize);
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_matrix(rng, kSize, kSize);
      RealMatrix b = random_matrix(rng, kSize, kSize);
      double d = rel_diff(transpose(e6) * kron(a, b) * e6, had_product(a, b));
      r.worst = std::max(r.worst, d);
      if (d > 1e-12) r.passed = false;
    }
    report.checks.push_back(r);
  }

  // Kronecker bridge swept over every rectangular shape 2..8 x 2..8.
  {
    std::mt19937_64 rng(seed + 4);
    PropertyCheckResult r{"kronecker-bridge-shapes", true, 0.0, 0};
    for (std::size_t n = 2; n <= 8; ++n) {
      for (std::size_t m = 2; m <= 8; ++m) {
        RealMatrix a = random_matrix(rng, n, m);
        RealMatrix b = random_matrix(rng, n, m);
        double d = rel_diff(transpose(selection_matrix(n)) * kron(a, b) * selection_matrix(m),
                            had_product(a, b));
        r.worst = std::max(r.worst, d);
        r.cases += 1;
        if (d > 1e-12) r.passed = false;
      }
    }
    report.checks.push_back(r);
  }

  // Spectral bounds of the entrywise product of positive-semidefinite pairs.
  {
    std::mt19937_64 rng(seed + 5);
    PropertyCheckResult r{"eigenvalue-bounds", true, 0.0, cases};
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_spsd(rng, kSize);
      RealMatrix b = random_spsd(rng, kSize);
      std::vector<double> eig_a = jacobi_eigenvalues(a);
      std::vector<double> eig_ab = jacobi_eigenvalues(had_product(a, b));
      double bmin = b(0, 0), bmax = b(0, 0);
      for (std::size_t i = 1; i < kSize; ++i) {
        bmin = std::min(bmin, b(i, i));
        bmax = std::max(bmax, b(i, i));
      }
      double radius = std::max(std::abs(eig_ab.front()), std::abs(eig_ab.back()));
      double eps = 1e-9 * radius + 1e-30;
      double lo = eig_a.front() * bmin - eps;
      double hi = eig_a.back() * bmax + eps;
      for (double lambda : eig_ab) {
        double violation = std::max(lo - lambda, lambda - hi);
        r.worst = std::max(r.worst, violation);
        if (violation > 0.0) r.passed = false;
      }
    }
    report.checks.push_back(r);
  }

  // Determinant bound det(A) det(B) <= det(A o B) on the same class.
  {
    std::mt19937_64 rng(seed + 6);
    PropertyCheckResult r{"determinant-bound", true, 0.0, cases};
    for (std::size_t c = 0; c < cases; ++c) {
      RealMatrix a = random_spsd(rng, kSize);
      RealMatrix b = random_spsd(rng, kSize);
      double lhs = determinant(a) * determinant(b);
      double rhs = determinant(had_product(a, b));
      double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      double violation = (lhs - rhs) / scale;
      r.worst = std::max(r.worst, violation);
      if (lhs > rhs + 1e-9 * scale) r.passed = false;
    }
    report.checks.push_back(r);
  }

  return report;
}

}  // namespace wrm
