#include "sublevel_sense/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sublevel_sense {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, Complex{}) {
  if (dim == 0) throw std::invalid_argument("ComplexMatrix: dim must be >= 1");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (dim_ != rhs.dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in product");
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Complex aik = (*this)(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) += aik * rhs(k, j);
    }
  }
  return out;
}

std::vector<Complex> ComplexMatrix::operator*(std::span<const Complex> v) const {
  if (v.size() != dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in matvec");
  std::vector<Complex> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (dim_ != rhs.dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in sum");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (dim_ != rhs.dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in difference");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& e : entries_) e *= scale;
  return *this;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_violation(std::size_t* worst_i, std::size_t* worst_j) const {
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = std::abs((*this)(i, j) - std::conj((*this)(j, i)));
      if (v > worst) {
        worst = v;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst_i) *worst_i = wi;
  if (worst_j) *worst_j = wj;
  return worst;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }

RealMatrix RealMatrix::identity(std::size_t dim) {
  RealMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix RealMatrix::operator*(const RealMatrix& rhs) const {
  if (dim_ != rhs.dim_) throw std::invalid_argument("RealMatrix: dimension mismatch in product");
  RealMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

std::vector<Complex> RealMatrix::operator*(std::span<const Complex> v) const {
  if (v.size() != dim_) throw std::invalid_argument("RealMatrix: dimension mismatch in matvec");
  std::vector<Complex> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

std::vector<Complex> RealMatrix::transpose_times(std::span<const Complex> v) const {
  if (v.size() != dim_) throw std::invalid_argument("RealMatrix: dimension mismatch in matvec");
  std::vector<Complex> out(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    const Complex vj = v[j];
    if (vj == Complex{}) continue;
    for (std::size_t i = 0; i < dim_; ++i) out[i] += (*this)(j, i) * vj;
  }
  return out;
}

ComplexMatrix RealMatrix::to_complex() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(i, j);
  return out;
}

namespace {

double offdiag_frobenius(const ComplexMatrix& a) {
  double s = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
  return std::sqrt(2.0 * s);
}

}  // namespace

EigenDecomposition eigh(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  if (n == 0) throw std::invalid_argument("eigh: empty matrix");

  std::size_t wi = 0, wj = 0;
  const double violation = input.hermiticity_violation(&wi, &wj);
  if (violation >= 1e-12) {
    throw std::invalid_argument("eigh: matrix is not Hermitian; worst entry (" + std::to_string(wi) +
                                "," + std::to_string(wj) + ") violates symmetry by " +
                                std::to_string(violation));
  }

  ComplexMatrix a = input;
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double norm_f = a.frobenius_norm();
  const double threshold = 1e-13 * norm_f;

  constexpr int kMaxSweeps = 100;
  bool converged = norm_f == 0.0 || n == 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (offdiag_frobenius(a) < threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;

        const Complex phase = apq / r;  // e^{i alpha}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Unitary plane rotation U with U_pp = c, U_pq = s,
        // U_qp = -s e^{-i alpha}, U_qq = c e^{-i alpha}; apply A <- U^dag A U.
        const Complex upq = s;
        const Complex uqp = -s * std::conj(phase);
        const Complex uqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + uqp * akq;
          a(k, q) = upq * akp + uqq * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + uqp * vkq;
          v(k, q) = upq * vkp + uqq * vkq;
        }
      }
    }
  }
  if (!converged && offdiag_frobenius(a) >= threshold) {
    throw NumericalError("eigh: Jacobi sweep cap reached without convergence (dim " +
                         std::to_string(n) + ")");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(perm[j], perm[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, perm[j]);
  }
  return out;
}

std::vector<Complex> evolve(const ComplexMatrix& h_hz, double t_s, std::span<const Complex> psi) {
  if (psi.size() != h_hz.dim()) throw std::invalid_argument("evolve: dimension mismatch");
  const EigenDecomposition eig = eigh(h_hz);
  const std::size_t n = h_hz.dim();

  std::vector<Complex> coeffs(n);  // V^dag psi
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(eig.eigenvectors(i, k)) * psi[i];
    coeffs[k] = acc;
  }
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -kTwoPi * eig.eigenvalues[k] * t_s;
    coeffs[k] *= Complex{std::cos(angle), std::sin(angle)};
  }
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc{};
    for (std::size_t k = 0; k < n; ++k) acc += eig.eigenvectors(i, k) * coeffs[k];
    out[i] = acc;
  }

  double norm_in = 0.0, norm_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    norm_in += std::norm(psi[i]);
    norm_out += std::norm(out[i]);
  }
  if (std::abs(std::sqrt(norm_out) - std::sqrt(norm_in)) > 1e-10) {
    throw NumericalError("evolve: norm drifted beyond tolerance");
  }
  return out;
}

ExtremaList find_extrema(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("find_extrema: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("find_extrema: need at least 3 samples");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("find_extrema: xs must be strictly increasing");
  }

  constexpr double kPlateauTol = 1e-12;

  // Compress plateau runs so a flat top counts once, at its midpoint sample.
  struct Run {
    std::size_t first, last;
    double value;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!runs.empty() && std::abs(ys[i] - runs.back().value) <= kPlateauTol) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i, ys[i]});
    }
  }

  ExtremaList out;
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    const double prev = runs[r - 1].value;
    const double curr = runs[r].value;
    const double next = runs[r + 1].value;
    ExtremumKind kind;
    if (curr > prev && curr > next) {
      kind = ExtremumKind::peak;
    } else if (curr < prev && curr < next) {
      kind = ExtremumKind::valley;
    } else {
      continue;
    }
    const std::size_t mid = (runs[r].first + runs[r].last) / 2;
    out.positions.push_back(xs[mid]);
    out.values.push_back(ys[mid]);
    out.kinds.push_back(kind);
  }
  return out;
}

}  // namespace sublevel_sense
