#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sublevel_sense {

using Complex = std::complex<double>;

/// Thrown when an iterative kernel fails to converge or a computed result
/// violates a numerical contract (norm drift, ambiguous identification, ...).
/// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Small dense complex matrix, row-major.  Dimensions here are 2F+1, so
/// everything is O(dim^3)-friendly without any sparsity tricks.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> entries);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  ComplexMatrix adjoint() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  std::vector<Complex> operator*(std::span<const Complex> v) const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

  double max_abs() const;
  double frobenius_norm() const;

  /// Largest |A[i][j] - conj(A[j][i])| together with the offending index pair.
  double hermiticity_violation(std::size_t* worst_i = nullptr, std::size_t* worst_j = nullptr) const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_violation() < tol; }

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);

/// Real dense matrix, row-major.  Used for Wigner rotations, which are real
/// by convention; all complex phases enter through evolution only.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}

  static RealMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const double& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  RealMatrix operator*(const RealMatrix& rhs) const;
  std::vector<Complex> operator*(std::span<const Complex> v) const;
  /// Transpose-multiply without forming the transpose.
  std::vector<Complex> transpose_times(std::span<const Complex> v) const;

  ComplexMatrix to_complex() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, columns match eigenvalues
};

/// Hermitian eigendecomposition by cyclic Jacobi rotations.  Accuracy is
/// favored over asymptotic speed: convergence requires the off-diagonal
/// Frobenius norm to drop below 1e-13 * ||A||_F, with a hard cap of 100
/// sweeps.  Rejects non-square or non-Hermitian input with a diagnostic
/// naming the worst-violating entry.
EigenDecomposition eigh(const ComplexMatrix& a);

/// exp(-i 2*pi H t) * psi via eigendecomposition.  H entries are frequencies
/// in Hz, so an eigenvalue f accumulates phase 2*pi*f*t over t seconds.
std::vector<Complex> evolve(const ComplexMatrix& h_hz, double t_s, std::span<const Complex> psi);

enum class ExtremumKind { peak, valley };

struct ExtremaList {
  std::vector<double> positions;   // strictly increasing, scan-variable units
  std::vector<double> values;
  std::vector<ExtremumKind> kinds; // strictly alternating

  std::size_t size() const { return positions.size(); }
};

/// Interior local extrema of a sampled curve by three-point comparison.
/// Plateaus (neighbors equal within 1e-12) collapse to their midpoint
/// sample; endpoints are never reported.  No interpolation: grid density is
/// the caller's responsibility.
ExtremaList find_extrema(std::span<const double> xs, std::span<const double> ys);

}  // namespace sublevel_sense
