#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sublevel_sense/numerics.hpp"

namespace sublevel_sense::detail {

// Scalar helpers so the solver below instantiates for double and, where the
// compiler provides it, __float128.  The quad-precision sqrt refines a
// double seed with two Newton steps, which reaches full quad accuracy
// without pulling in libquadmath.
inline double scalar_sqrt(double x) { return std::sqrt(x); }
inline double scalar_abs(double x) { return std::fabs(x); }

#if defined(__SIZEOF_FLOAT128__)
using quad = __float128;

inline quad scalar_sqrt(quad x) {
  if (x <= 0) return 0;
  quad y = std::sqrt(static_cast<double>(x));
  y = (y + x / y) / 2;
  y = (y + x / y) / 2;
  return y;
}
inline quad scalar_abs(quad x) { return x < 0 ? -x : x; }

template <class Real>
inline constexpr Real jacobi_epsilon = Real(1.926e-34);
template <>
inline constexpr double jacobi_epsilon<double> = 2.221e-16;
#else
using quad = long double;

inline long double scalar_sqrt(long double x) { return std::sqrt(x); }
inline long double scalar_abs(long double x) { return std::fabs(x); }

template <class Real>
inline constexpr Real jacobi_epsilon = Real(1.085e-19L);
template <>
inline constexpr double jacobi_epsilon<double> = 2.221e-16;
#endif

template <class Real>
struct SymmetricEigenResult {
  std::vector<Real> eigenvalues;  // ascending
  std::vector<Real> vectors;      // row-major dim x dim, columns are eigenvectors
};

/// Cyclic Jacobi for a real symmetric matrix (row-major), templated on the
/// scalar so exponentially small eigenvalue splittings can be resolved in
/// extended precision.  Convergence: off-diagonal Frobenius norm below
/// 1000*eps*||A||_F, hard cap 100 sweeps.
template <class Real>
SymmetricEigenResult<Real> jacobi_symmetric(std::vector<Real> a, std::size_t n) {
  std::vector<Real> v(n * n, Real(0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = Real(1);

  Real norm_sq = Real(0);
  for (const Real& e : a) norm_sq += e * e;
  const Real threshold = Real(1000) * jacobi_epsilon<Real> * scalar_sqrt(norm_sq);

  auto offdiag = [&]() {
    Real s = Real(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return scalar_sqrt(Real(2) * s);
  };

  bool converged = n <= 1 || norm_sq == Real(0);
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    if (offdiag() < threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = a[p * n + q];
        if (apq == Real(0)) continue;
        const Real theta = (a[q * n + q] - a[p * n + p]) / (Real(2) * apq);
        const Real t = (theta >= Real(0) ? Real(1) : Real(-1)) /
                       (scalar_abs(theta) + scalar_sqrt(theta * theta + Real(1)));
        const Real c = Real(1) / scalar_sqrt(t * t + Real(1));
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Real akp = a[k * n + p];
          const Real akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real apk = a[p * n + k];
          const Real aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real vkp = v[k * n + p];
          const Real vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && offdiag() >= threshold) {
    throw NumericalError("jacobi_symmetric: sweep cap reached without convergence");
  }

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a[perm[j] * n + perm[j]] < a[perm[best] * n + perm[best]]) best = j;
    }
    std::swap(perm[i], perm[best]);
  }

  SymmetricEigenResult<Real> out;
  out.eigenvalues.resize(n);
  out.vectors.assign(n * n, Real(0));
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a[perm[j] * n + perm[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + perm[j]];
  }
  return out;
}

}  // namespace sublevel_sense::detail
