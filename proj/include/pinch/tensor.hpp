#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "tolerances.hpp"

namespace pinch::tensor {

// Symmetric bilinear form in coordinate components.  Storage is a full
// matrix kept exactly symmetric: set() writes both entries, constructors
// either validate or mirror.
class SymTensor2 {
 public:
  SymTensor2() = default;
  explicit SymTensor2(int n) : m_(n, n) {
    if (n < 1) throw std::invalid_argument("SymTensor2: dimension must be positive");
  }

  static SymTensor2 identity(int n) {
    SymTensor2 t(n);
    for (int i = 0; i < n; ++i) t.m_(i, i) = 1.0;
    return t;
  }

  static SymTensor2 diagonal(const std::vector<double>& d) {
    SymTensor2 t(static_cast<int>(d.size()));
    for (int i = 0; i < t.dim(); ++i) t.m_(i, i) = d[i];
    return t;
  }

  // Validates symmetry of the input, then mirrors the averaged entries.
  static SymTensor2 from_matrix(const linalg::Matrix& m, double tol_rel = tol.sym_rel) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SymTensor2: matrix not square");
    const double scale = std::max(1.0, linalg::max_abs(m));
    if (linalg::symmetry_defect(m) > tol_rel * scale)
      throw std::invalid_argument("SymTensor2: input matrix is not symmetric");
    return symmetrized(m);
  }

  // Mirrors without validation; for internal results that are symmetric
  // up to roundoff.
  static SymTensor2 symmetrized(const linalg::Matrix& m) {
    SymTensor2 t(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
      t.m_(i, i) = m(i, i);
      for (int j = i + 1; j < m.cols(); ++j) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        t.m_(i, j) = v;
        t.m_(j, i) = v;
      }
    }
    return t;
  }

  int dim() const { return m_.rows(); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const linalg::Matrix& matrix() const { return m_; }

  SymTensor2 scaled(double s) const {
    SymTensor2 t = *this;
    for (double& v : t.m_.data()) v *= s;
    return t;
  }

  SymTensor2& operator+=(const SymTensor2& o) {
    for (std::size_t i = 0; i < m_.data().size(); ++i) m_.data()[i] += o.m_.data()[i];
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    for (std::size_t i = 0; i < m_.data().size(); ++i) m_.data()[i] -= o.m_.data()[i];
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }

  double max_abs() const { return linalg::max_abs(m_); }

 private:
  linalg::Matrix m_;
};

// Rank-4 algebraic curvature tensor, component (i,k,j,l).  Stored dense;
// antisymmetry in (i,k) and in (j,l) and pair-exchange symmetry hold
// exactly because every write fills a full symmetry orbit from one value.
// The first Bianchi identity is validated on raw input, not enforced.
class AlgCurvature {
 public:
  AlgCurvature() = default;
  explicit AlgCurvature(int n)
      : n_(n), c_(static_cast<std::size_t>(n) * n * n * n, 0.0) {
    if (n < 1) throw std::invalid_argument("AlgCurvature: dimension must be positive");
  }

  int dim() const { return n_; }

  double operator()(int i, int k, int j, int l) const { return c_[idx(i, k, j, l)]; }

  const std::vector<double>& raw() const { return c_; }

  template <class F>
  static AlgCurvature generate(int n, F&& f) {
    AlgCurvature out(n);
    out.fill_canonical([&](int i, int k, int j, int l) { return f(i, k, j, l); });
    return out;
  }

  // Orbit-averages an arbitrary raw array into exact symmetry; no validation.
  static AlgCurvature canonicalized(int n, const std::vector<double>& v) {
    AlgCurvature out(n);
    out.fill_canonical([&](int i, int k, int j, int l) {
      const auto at = [&](int a, int b, int c, int d) {
        return v[out.idx(a, b, c, d)];
      };
      return 0.125 * (at(i, k, j, l) - at(k, i, j, l) - at(i, k, l, j) + at(k, i, l, j) +
                      at(j, l, i, k) - at(l, j, i, k) - at(j, l, k, i) + at(l, j, k, i));
    });
    return out;
  }

  // Validates the index symmetries and the first Bianchi identity of a raw
  // row-major component array, then canonicalizes it.
  static AlgCurvature from_components(int n, const std::vector<double>& v) {
    if (static_cast<std::size_t>(n) * n * n * n != v.size())
      throw std::invalid_argument("AlgCurvature: component array has wrong length");
    AlgCurvature probe(n);
    double scale = 1.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    double defect = 0.0, bianchi = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            const double c = v[probe.idx(i, k, j, l)];
            defect = std::max(defect, std::abs(c + v[probe.idx(k, i, j, l)]));
            defect = std::max(defect, std::abs(c + v[probe.idx(i, k, l, j)]));
            defect = std::max(defect, std::abs(c - v[probe.idx(j, l, i, k)]));
            bianchi = std::max(
                bianchi, std::abs(c + v[probe.idx(k, j, i, l)] + v[probe.idx(j, i, k, l)]));
          }
    if (defect > tol.sym_rel * scale)
      throw std::invalid_argument("AlgCurvature: index symmetries violated");
    if (bianchi > tol.bianchi * scale)
      throw std::invalid_argument("AlgCurvature: first Bianchi identity violated");
    return canonicalized(n, v);
  }

  AlgCurvature scaled(double s) const {
    AlgCurvature out = *this;
    for (double& x : out.c_) x *= s;
    return out;
  }

  AlgCurvature& operator+=(const AlgCurvature& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AlgCurvature& operator-=(const AlgCurvature& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend AlgCurvature operator+(AlgCurvature a, const AlgCurvature& b) { return a += b; }
  friend AlgCurvature operator-(AlgCurvature a, const AlgCurvature& b) { return a -= b; }

  double max_abs() const {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    return m;
  }

  double symmetry_defect() const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l) {
            const double c = (*this)(i, k, j, l);
            d = std::max(d, std::abs(c + (*this)(k, i, j, l)));
            d = std::max(d, std::abs(c + (*this)(i, k, l, j)));
            d = std::max(d, std::abs(c - (*this)(j, l, i, k)));
          }
    return d;
  }

  double bianchi_defect() const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l)
            d = std::max(d, std::abs((*this)(i, k, j, l) + (*this)(k, j, i, l) +
                                     (*this)(j, i, k, l)));
    return d;
  }

  std::size_t idx(int i, int k, int j, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + k) * n_ + j) * n_ + l;
  }

 private:
  template <class F>
  void fill_canonical(F&& value_at) {
    // canonical tuples: i<k, j<l, (i,k) <= (j,l) lexicographically
    for (int i = 0; i < n_; ++i)
      for (int k = i + 1; k < n_; ++k)
        for (int j = 0; j < n_; ++j) {
          if (j < i) continue;
          for (int l = j + 1; l < n_; ++l) {
            if (j == i && l < k) continue;
            const double v = value_at(i, k, j, l);
            c_[idx(i, k, j, l)] = v;
            c_[idx(k, i, j, l)] = -v;
            c_[idx(i, k, l, j)] = -v;
            c_[idx(k, i, l, j)] = v;
            c_[idx(j, l, i, k)] = v;
            c_[idx(l, j, i, k)] = -v;
            c_[idx(j, l, k, i)] = -v;
            c_[idx(l, j, k, i)] = v;
          }
        }
  }

  int n_ = 0;
  std::vector<double> c_;
};

// A metric at a point with its cached lower-triangular factor g = L*L^T.
// All derived computations run in the g-orthonormal frame reached through
// L^{-1}; public operations accept and return coordinate components.
class PointFrame {
 public:
  explicit PointFrame(SymTensor2 g) : g_(std::move(g)) {
    const int n = g_.dim();
    if (n < 3) throw std::invalid_argument("PointFrame: dimension must be at least 3");
    auto chol = linalg::cholesky_lower(g_.matrix());
    if (!chol) throw std::invalid_argument("PointFrame: metric is not positive definite");
    L_ = std::move(*chol);
    Linv_ = linalg::lower_inverse(L_);
    ginv_ = linalg::transpose(Linv_) * Linv_;
    const linalg::Matrix recon = L_ * linalg::transpose(L_);
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) defect = std::max(defect, std::abs(recon(i, j) - g_(i, j)));
    if (defect > tol.chol_rel * std::max(1.0, g_.max_abs()))
      throw std::invalid_argument("PointFrame: metric too ill-conditioned to factor");
  }

  static PointFrame euclidean(int n) { return PointFrame(SymTensor2::identity(n)); }

  int dim() const { return g_.dim(); }
  const SymTensor2& metric() const { return g_; }
  const linalg::Matrix& chol_lower() const { return L_; }
  const linalg::Matrix& inverse_metric() const { return ginv_; }

  SymTensor2 to_orthonormal(const SymTensor2& a) const {
    require_dim(a.dim());
    return SymTensor2::symmetrized(Linv_ * a.matrix() * linalg::transpose(Linv_));
  }

  SymTensor2 from_orthonormal(const SymTensor2& a) const {
    require_dim(a.dim());
    return SymTensor2::symmetrized(L_ * a.matrix() * linalg::transpose(L_));
  }

  AlgCurvature to_orthonormal(const AlgCurvature& c) const {
    require_dim(c.dim());
    return transform(c, Linv_);
  }

  AlgCurvature from_orthonormal(const AlgCurvature& c) const {
    require_dim(c.dim());
    return transform(c, L_);
  }

 private:
  void require_dim(int n) const {
    if (n != dim()) throw std::invalid_argument("PointFrame: dimension mismatch");
  }

  AlgCurvature transform(const AlgCurvature& c, const linalg::Matrix& M) const {
    const int n = dim();
    std::vector<double> cur = c.raw();
    std::vector<double> nxt(cur.size());
    AlgCurvature probe(n);
    for (int slot = 0; slot < 4; ++slot) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int cidx = 0; cidx < n; ++cidx)
            for (int d = 0; d < n; ++d) {
              int u[4] = {a, b, cidx, d};
              const int out_i = u[slot];
              double s = 0.0;
              for (int m = 0; m < n; ++m) {
                u[slot] = m;
                s += M(out_i, m) * cur[probe.idx(u[0], u[1], u[2], u[3])];
              }
              u[slot] = out_i;
              nxt[probe.idx(u[0], u[1], u[2], u[3])] = s;
            }
      std::swap(cur, nxt);
    }
    return AlgCurvature::canonicalized(n, cur);
  }

  SymTensor2 g_;
  linalg::Matrix L_;
  linalg::Matrix Linv_;
  linalg::Matrix ginv_;
};

// -------------------------------------------------------------------------
// operations

inline SymTensor2 orthonormalize(const PointFrame& f, const SymTensor2& h) {
  return f.to_orthonormal(h);
}

// H = g^{ij} h_ij
inline double trace(const PointFrame& f, const SymTensor2& h) {
  const linalg::Matrix& gi = f.inverse_metric();
  double s = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j) s += gi(i, j) * h(i, j);
  return s;
}

// g^{ik} g^{jl} a_ij b_kl
inline double inner(const PointFrame& f, const SymTensor2& a, const SymTensor2& b) {
  const SymTensor2 ap = f.to_orthonormal(a);
  const SymTensor2 bp = f.to_orthonormal(b);
  double s = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j) s += ap(i, j) * bp(i, j);
  return s;
}

inline double norm2(const PointFrame& f, const SymTensor2& a) { return inner(f, a, a); }

inline double riemann_norm(const PointFrame& f, const AlgCurvature& c) {
  const AlgCurvature cp = f.to_orthonormal(c);
  double s = 0.0;
  for (double v : cp.raw()) s += v * v;
  return std::sqrt(s);
}

// R_ikjl = kappa (g_ij g_kl - g_il g_jk)
inline AlgCurvature const_curvature(const PointFrame& f, double kappa) {
  const SymTensor2& g = f.metric();
  return AlgCurvature::generate(f.dim(), [&](int i, int k, int j, int l) {
    return kappa * (g(i, j) * g(k, l) - g(i, l) * g(j, k));
  });
}

// R_ij = g^{kl} R_ikjl  (contraction over the second and fourth slots)
inline SymTensor2 ricci_of(const PointFrame& f, const AlgCurvature& rm) {
  const int n = f.dim();
  if (rm.dim() != n) throw std::invalid_argument("ricci_of: dimension mismatch");
  const linalg::Matrix& gi = f.inverse_metric();
  linalg::Matrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += gi(k, l) * rm(i, k, j, l);
      r(i, j) = s;
    }
  return SymTensor2::symmetrized(r);
}

inline double scalar_of(const PointFrame& f, const SymTensor2& rc) { return trace(f, rc); }

// Curvature of a locally conformally flat metric, rebuilt from its Ricci
// tensor, so the trace-free rank-4 part of the result vanishes.
inline AlgCurvature lcf_curvature_from_ricci(const PointFrame& f, const SymTensor2& rc) {
  const int n = f.dim();
  const SymTensor2& g = f.metric();
  const double R = trace(f, rc);
  const double a = 1.0 / (n - 2);
  const double b = R / ((n - 1.0) * (n - 2.0));
  return AlgCurvature::generate(n, [&](int i, int k, int j, int l) {
    return a * (g(i, j) * rc(k, l) + g(k, l) * rc(i, j) - g(i, l) * rc(j, k) -
                g(j, k) * rc(i, l)) -
           b * (g(i, j) * g(k, l) - g(i, l) * g(j, k));
  });
}

struct WeylReport {
  AlgCurvature weyl;
  SymTensor2 ricci;
  double scalar = 0.0;
  double weyl_norm = 0.0;
};

inline WeylReport weyl_of(const PointFrame& f, const AlgCurvature& rm) {
  SymTensor2 rc = ricci_of(f, rm);
  const double scalar = trace(f, rc);
  const AlgCurvature ricci_part = lcf_curvature_from_ricci(f, rc);
  AlgCurvature w = rm - ricci_part;
  const double wn = riemann_norm(f, w);
  return WeylReport{std::move(w), std::move(rc), scalar, wn};
}

// Zeroth-order part of the Lichnerowicz Laplacian:
// 2 R_ikjl h^kl - R_i^k h_kj - R_j^k h_ki, returned in coordinates.
inline SymTensor2 lichnerowicz_reaction(const PointFrame& f, const AlgCurvature& rm,
                                        const SymTensor2& rc, const SymTensor2& h) {
  const int n = f.dim();
  if (rm.dim() != n || rc.dim() != n || h.dim() != n)
    throw std::invalid_argument("lichnerowicz_reaction: dimension mismatch");
  const linalg::Matrix& gi = f.inverse_metric();
  const linalg::Matrix raised = gi * h.matrix() * gi;           // h^{kl}
  const linalg::Matrix mixed = rc.matrix() * gi * h.matrix();   // R_i^k h_kj
  linalg::Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += rm(i, k, j, l) * raised(k, l);
      out(i, j) = 2.0 * s - mixed(i, j) - mixed(j, i);
    }
  return SymTensor2::symmetrized(out);
}

struct PinchValue {
  double value = 0.0;
  double scale = 0.0;  // |h|^2 |Rc|^2 + R^2 H^2 + R^2 |h|^2
};

// P = |h|^2 |Rc|^2 - (2R/(n-2)) (H <Rc,h> - <Rc,h.h>) + R^2 (H^2-|h|^2)/((n-1)(n-2))
inline PinchValue pinch_P_with_scale(const PointFrame& f, const SymTensor2& rc,
                                     const SymTensor2& h) {
  const int n = f.dim();
  const SymTensor2 a = f.to_orthonormal(rc);
  const SymTensor2 b = f.to_orthonormal(h);
  double H = 0.0, R = 0.0, h2 = 0.0, rc2 = 0.0, rch = 0.0, rchh = 0.0;
  for (int i = 0; i < n; ++i) {
    H += b(i, i);
    R += a(i, i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      h2 += b(i, j) * b(i, j);
      rc2 += a(i, j) * a(i, j);
      rch += a(i, j) * b(i, j);
      double bb = 0.0;
      for (int k = 0; k < n; ++k) bb += b(i, k) * b(k, j);
      rchh += a(i, j) * bb;
    }
  const double P = h2 * rc2 - (2.0 * R / (n - 2)) * (H * rch - rchh) +
                   R * R * (H * H - h2) / ((n - 1.0) * (n - 2.0));
  const double scale = h2 * rc2 + R * R * H * H + R * R * h2;
  return {P, scale};
}

inline double pinch_P(const PointFrame& f, const SymTensor2& rc, const SymTensor2& h) {
  return pinch_P_with_scale(f, rc, h).value;
}

inline double pinch_ratio(const PointFrame& f, const SymTensor2& h, double scalar) {
  if (!(scalar > 0.0))
    throw std::domain_error("pinch_ratio: positive scalar curvature required");
  return norm2(f, h) / (scalar * scalar);
}

}  // namespace pinch::tensor
