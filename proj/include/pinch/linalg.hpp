#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pinch::linalg {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows),
        cols_(cols),
        d_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative extent");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) {
    return d_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return d_[static_cast<std::size_t>(i) * cols_ + j];
  }

  const std::vector<double>& data() const { return d_; }
  std::vector<double>& data() { return d_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw std::invalid_argument("matrix-vector product: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

inline double symmetry_defect(const Matrix& a) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - a(j, i)));
  return d;
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

// Returns the lower factor with g = L*L^T, or nullopt when g is not
// positive definite (equivalently, some leading principal minor is <= 0).
inline std::optional<Matrix> cholesky_lower(const Matrix& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("cholesky: matrix not square");
  const int n = g.rows();
  Matrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double s = g(j, j);
    for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
    L(j, j) = std::sqrt(s);
    for (int i = j + 1; i < n; ++i) {
      double t = g(i, j);
      for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / L(j, j);
    }
  }
  return L;
}

inline Matrix lower_inverse(const Matrix& L) {
  const int n = L.rows();
  Matrix inv(n, n);
  for (int col = 0; col < n; ++col) {
    for (int i = col; i < n; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = col; k < i; ++k) s -= L(i, k) * inv(k, col);
      inv(i, col) = s / L(i, i);
    }
  }
  return inv;
}

struct LuFactors {
  Matrix lu;
  std::vector<int> perm;
  double parity = 1.0;
  bool singular = false;
};

// Partial-pivoting LU.  A pivot of magnitude <= pivot_floor_rel * max|a|
// marks the factorization singular (determinant 0).
inline LuFactors lu_factor(Matrix a, double pivot_floor_rel = 0.0) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  const int n = a.rows();
  const double floor_abs = pivot_floor_rel * std::max(1.0, max_abs(a));
  LuFactors f{std::move(a), std::vector<int>(n), 1.0, false};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(f.lu(i, col)) > std::abs(f.lu(piv, col))) piv = i;
    if (std::abs(f.lu(piv, col)) <= floor_abs) {
      f.singular = true;
      return f;
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(piv, j), f.lu(col, j));
      std::swap(f.perm[piv], f.perm[col]);
      f.parity = -f.parity;
    }
    for (int i = col + 1; i < n; ++i) {
      const double m = f.lu(i, col) / f.lu(col, col);
      f.lu(i, col) = m;
      for (int j = col + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(col, j);
    }
  }
  return f;
}

inline double lu_det(const LuFactors& f) {
  if (f.singular) return 0.0;
  double d = f.parity;
  for (int i = 0; i < f.lu.rows(); ++i) d *= f.lu(i, i);
  return d;
}

inline Vector lu_solve(const LuFactors& f, const Vector& b) {
  if (f.singular) throw std::invalid_argument("lu_solve: singular factorization");
  const int n = f.lu.rows();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: length mismatch");
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (int k = 0; k < i; ++k) s -= f.lu(i, k) * y[k];
    y[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= f.lu(i, k) * y[k];
    y[i] = s / f.lu(i, i);
  }
  return y;
}

}  // namespace pinch::linalg
