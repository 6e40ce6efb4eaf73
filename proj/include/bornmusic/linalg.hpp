#pragma once

#include <bornmusic/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace bornmusic {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
  static ComplexMatrix square(int n) { return ComplexMatrix(n, n); }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  cdouble& operator()(int r, int c) { return data_[index(r, c)]; }
  const cdouble& operator()(int r, int c) const { return data_[index(r, c)]; }

  std::span<const cdouble> data() const noexcept { return data_; }
  std::span<cdouble> data() noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("ComplexMatrix: dimension mismatch in product");
    ComplexMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const cdouble aik = a(i, k);
        if (aik == cdouble{}) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend ComplexMatrix operator*(cdouble s, ComplexMatrix m) {
    for (auto& v : m.data_) v *= s;
    return m;
  }

  friend CVector operator*(const ComplexMatrix& a, std::span<const cdouble> x) {
    if (static_cast<int>(x.size()) != a.cols_) throw DomainError("ComplexMatrix: dimension mismatch in product");
    CVector y(static_cast<std::size_t>(a.rows_));
    for (int i = 0; i < a.rows_; ++i) {
      cdouble s{};
      for (int j = 0; j < a.cols_; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    return y;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<cdouble> data_;
};

/// <a, b> = a^* b.
inline cdouble inner(std::span<const cdouble> a, std::span<const cdouble> b) {
  cdouble s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double vector_norm(std::span<const cdouble> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

struct HermitianEigen {
  std::vector<double> values;  // descending
  std::vector<CVector> vectors;  // orthonormal, vectors[j] pairs with values[j]
  int sweeps = 0;
  double off_norm = 0.0;  // final off-diagonal Frobenius norm
};

/// Cyclic complex Jacobi eigensolver for a Hermitian matrix. Iterates until the
/// off-diagonal Frobenius norm is at most rel_tol * ||A||_F.
inline HermitianEigen hermitian_jacobi(ComplexMatrix a, int max_sweeps = 50, double rel_tol = 1e-14) {
  const int n = a.rows();
  if (a.cols() != n) throw DomainError("hermitian_jacobi: matrix must be square");

  ComplexMatrix v = ComplexMatrix::square(n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  const double scale = a.frobenius_norm();
  HermitianEigen out;
  double off = off_norm();
  int sweep = 0;
  while (off > rel_tol * scale) {
    if (sweep == max_sweeps)
      throw NumericalError("hermitian_jacobi: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps, off-diagonal residual " + std::to_string(off / scale));
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cdouble phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = std::abs(tau) > 1e150 ? 0.5 / tau
                                               : (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const cdouble gpp = c;
        const cdouble gpq = s;
        const cdouble gqp = -s * std::conj(phase);
        const cdouble gqq = c * std::conj(phase);

        for (int k = 0; k < n; ++k) {  // A <- A G
          const cdouble akp = a(k, p);
          const cdouble akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (int k = 0; k < n; ++k) {  // A <- G^* A
          const cdouble apk = a(p, k);
          const cdouble aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (int k = 0; k < n; ++k) {  // V <- V G
          const cdouble vkp = v(k, p);
          const cdouble vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
    off = off_norm();
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });
  for (int idx : order) {
    out.values.push_back(a(idx, idx).real());
    CVector col(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) col[static_cast<std::size_t>(k)] = v(k, idx);
    out.vectors.push_back(std::move(col));
  }
  out.sweeps = sweep;
  out.off_norm = off;
  return out;
}

}  // namespace bornmusic
