#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "tolerances.hpp"

namespace pinch::certify {

// Eigenvalues of the diagonalized 2-tensor; no ordering assumed.
struct SpectrumH {
  std::vector<double> h;
  int n() const { return static_cast<int>(h.size()); }
};

struct PowerSums {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
};

inline PowerSums power_sums(const SpectrumH& sp) {
  PowerSums ps;
  ps.s0 = static_cast<double>(sp.n());
  for (double x : sp.h) {
    const double x2 = x * x;
    ps.s1 += x;
    ps.s2 += x2;
    ps.s3 += x2 * x;
    ps.s4 += x2 * x2;
  }
  return ps;
}

// beta = (s1^2 - s2) a0 / (2(n-1)(n-2)) - s1 a1/(n-2) + a2/(n-2),
// where a0 is the all-ones vector and (a1)_i = h_i, (a2)_i = h_i^2.
struct BetaVector {
  std::vector<double> beta;
  double dot_alpha0 = 0.0;  // a0^T beta
  double norm2 = 0.0;       // beta^T beta
};

inline BetaVector beta_vector(const SpectrumH& sp) {
  const int n = sp.n();
  if (n < 3) throw std::invalid_argument("beta_vector: need n >= 3");
  const PowerSums ps = power_sums(sp);
  const double cA = (ps.s1 * ps.s1 - ps.s2) / (2.0 * (n - 1.0) * (n - 2.0));
  const double cB = -ps.s1 / (n - 2.0);
  const double cC = 1.0 / (n - 2.0);
  BetaVector out;
  out.beta.resize(n);
  for (int i = 0; i < n; ++i) {
    const double hi = sp.h[i];
    const double b = cA + cB * hi + cC * hi * hi;
    out.beta[i] = b;
    out.dot_alpha0 += b;
    out.norm2 += b * b;
  }
  return out;
}

// B = s2 I + a0 beta^T + beta a0^T
inline linalg::Matrix build_B(const SpectrumH& sp) {
  const int n = sp.n();
  const BetaVector bv = beta_vector(sp);
  const PowerSums ps = power_sums(sp);
  linalg::Matrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = bv.beta[i] + bv.beta[j];
  for (int i = 0; i < n; ++i) B(i, i) += ps.s2;
  return B;
}

struct QValue {
  double value = 0.0;
  double scale = 0.0;  // sum of term magnitudes, for roundoff-aware floors
};

// Literal evaluation of the quadratic form Q in r with coefficients in h;
// makes no reference to B.
inline QValue evaluate_Q_with_scale(const std::vector<double>& r, const SpectrumH& sp) {
  const int n = sp.n();
  if (static_cast<int>(r.size()) != n)
    throw std::invalid_argument("evaluate_Q: length mismatch");
  if (n < 3) throw std::invalid_argument("evaluate_Q: need n >= 3");
  double sr = 0.0, sr2 = 0.0, sh = 0.0, sh2 = 0.0, srh = 0.0, srh2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sr += r[i];
    sr2 += r[i] * r[i];
    sh += sp.h[i];
    sh2 += sp.h[i] * sp.h[i];
    srh += r[i] * sp.h[i];
    srh2 += r[i] * sp.h[i] * sp.h[i];
  }
  const double t1 = sr2 * sh2;
  const double t2 = (2.0 / (n - 2.0)) * sr * (-sh * srh + srh2);
  const double t3 = sr * sr * (sh * sh - sh2) / ((n - 1.0) * (n - 2.0));
  QValue q;
  q.value = t1 + t2 + t3;
  q.scale = std::abs(t1) +
            (2.0 / (n - 2.0)) * std::abs(sr) * (std::abs(sh * srh) + std::abs(srh2)) +
            sr * sr * (sh * sh + sh2) / ((n - 1.0) * (n - 2.0));
  return q;
}

inline double evaluate_Q(const std::vector<double>& r, const SpectrumH& sp) {
  return evaluate_Q_with_scale(r, sp).value;
}

// Closed-form spectrum of B: s2 with multiplicity n-2, plus
// dot -/+ sqrt(n beta^T beta) where dot = s2 + a0^T beta.
struct SpectralCertificate {
  double s2 = 0.0;
  double dot = 0.0;       // s2 + a0^T beta
  double disc = 0.0;      // n beta^T beta
  double p = 0.0;         // 2 dot
  double q = 0.0;         // dot^2 - disc
  double eig_bulk = 0.0;  // value s2, multiplicity n-2
  double eig_lo = 0.0;
  double eig_hi = 0.0;
  double min_eig = 0.0;
  bool verdict = false;
};

inline SpectralCertificate spectral_certificate(const SpectrumH& sp, double tolerance) {
  const PowerSums ps = power_sums(sp);
  const BetaVector bv = beta_vector(sp);
  SpectralCertificate c;
  c.s2 = ps.s2;
  c.dot = ps.s2 + bv.dot_alpha0;
  c.disc = sp.n() * bv.norm2;
  const double root = std::sqrt(std::max(c.disc, 0.0));
  c.p = 2.0 * c.dot;
  c.q = c.dot * c.dot - c.disc;
  c.eig_bulk = ps.s2;
  c.eig_lo = c.dot - root;
  c.eig_hi = c.dot + root;
  c.min_eig = std::min(c.s2, c.eig_lo);
  c.verdict = c.min_eig >= -tolerance;
  return c;
}

inline std::vector<double> certificate_spectrum(const SpectralCertificate& c, int n) {
  std::vector<double> eig(static_cast<std::size_t>(n) - 2, c.eig_bulk);
  eig.push_back(c.eig_lo);
  eig.push_back(c.eig_hi);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// The two scalar inequalities behind the certificate:
// s2 + a0^T beta >= 0 and (s2 + a0^T beta)^2 - n beta^T beta >= 0.
inline std::pair<double, double> lemma42_quantities(const SpectrumH& sp) {
  const PowerSums ps = power_sums(sp);
  const BetaVector bv = beta_vector(sp);
  const double dot = ps.s2 + bv.dot_alpha0;
  return {dot, dot * dot - sp.n() * bv.norm2};
}

// One half-degree slice: the restriction of f to spectra with k entries
// equal to t and n-k entries equal to 1, written as
// (prefactor_num/prefactor_den) (t-1)^2 (a1 t^2 + b1 t + c1)
// with exact integer coefficients.
struct TimofteSlice {
  int n = 0, k = 0;
  long long a1 = 0, b1 = 0, c1 = 0;
  long long prefactor_num = 1, prefactor_den = 1;
  long long discriminant = 0;  // b1^2 - 4 a1 c1, exact
  double min_on_interval = 0.0;
};

inline double slice_phi(const TimofteSlice& s, double t) {
  const double quad = (static_cast<double>(s.a1) * t + static_cast<double>(s.b1)) * t +
                      static_cast<double>(s.c1);
  const double w = t - 1.0;
  return (static_cast<double>(s.prefactor_num) / static_cast<double>(s.prefactor_den)) *
         w * w * quad;
}

inline TimofteSlice timofte_slice(int n, int k) {
  if (n < 3) throw std::invalid_argument("timofte_slice: need n >= 3");
  if (k < 1 || k > n - 1) throw std::invalid_argument("timofte_slice: k out of range");
  TimofteSlice s;
  s.n = n;
  s.k = k;
  const long long N = n, K = k;
  if (k == 1) {
    s.a1 = 1;  // (t-1)^2 t^2
  } else if (k == n - 1) {
    s.c1 = 1;  // (t-1)^2
  } else {
    s.a1 = ((N - 1) * K - 1) * (N - 1 - K);
    s.b1 = -2 * (K - 1) * (N - 1 - K) * (N - 1);
    s.c1 = (K - 1) * ((N - K) * (N - 1) - 1);
    s.prefactor_num = K * (N - K);
    s.prefactor_den = (N - 1) * (N - 2) * (N - 2);
  }
  s.discriminant = s.b1 * s.b1 - 4 * s.a1 * s.c1;
  const long long expected = -4 * (K - 1) * (N - 1 - K) * N * (N - 2) * (N - 2);
  if (s.discriminant != expected)
    throw std::logic_error("timofte_slice: discriminant identity failed");
  // The quartic vanishes at t = 1; it is nonnegative on [-1,1] exactly when
  // the quadratic factor is.  The quadratic minimum over [-1,1] is closed
  // form: vertex if interior (a1 > 0 makes it convex), else the nearer
  // endpoint.
  const auto quad_at = [&](double t) {
    return (static_cast<double>(s.a1) * t + static_cast<double>(s.b1)) * t +
           static_cast<double>(s.c1);
  };
  double quad_min;
  if (s.a1 > 0) {
    const double vertex = -static_cast<double>(s.b1) / (2.0 * static_cast<double>(s.a1));
    quad_min = quad_at(std::clamp(vertex, -1.0, 1.0));
  } else {
    // boundary forms only: a1 = b1 = 0, constant c1
    quad_min = static_cast<double>(s.c1);
  }
  if (quad_min >= 0.0) {
    s.min_on_interval = 0.0;  // attained where (t-1)^2 vanishes
  } else {
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) worst = std::min(worst, slice_phi(s, -1.0 + i * 0.005));
    const double vertex = -static_cast<double>(s.b1) / (2.0 * static_cast<double>(s.a1));
    worst = std::min(worst, slice_phi(s, std::clamp(vertex, -1.0, 1.0)));
    s.min_on_interval = worst;
  }
  return s;
}

// f(h) = (s2 + a0^T beta)^2 - n beta^T beta, evaluated two independent
// ways: through the beta vector, and as a polynomial in the power sums
// alone.  The paths must agree.
inline double evaluate_f(const SpectrumH& sp) {
  const int n = sp.n();
  if (n < 3) throw std::invalid_argument("evaluate_f: need n >= 3");
  const PowerSums ps = power_sums(sp);
  const BetaVector bv = beta_vector(sp);
  const double dot = ps.s2 + bv.dot_alpha0;
  const double f1 = dot * dot - n * bv.norm2;

  const double E = n - 1.0, D = n - 2.0;
  const double u = ps.s1 * ps.s1 - ps.s2;
  const double dot2 = ps.s2 + n * u / (2.0 * E * D) - ps.s1 * ps.s1 / D + ps.s2 / D;
  const double t1 = n * u * u / (4.0 * E * E * D * D);
  const double t2 = (ps.s1 * ps.s1 * ps.s2 + ps.s4 - 2.0 * ps.s1 * ps.s3) / (D * D);
  const double t3 = -u * u / (E * D * D);
  const double f2 = dot2 * dot2 - n * (t1 + t2 + t3);

  const double scale = std::max({1.0, dot * dot + n * bv.norm2,
                                 dot2 * dot2 + n * (std::abs(t1) + std::abs(t2) + std::abs(t3))});
  if (std::abs(f1 - f2) > tol.dual_path_rel * scale)
    throw std::logic_error("evaluate_f: evaluation paths disagree");
  return f1;
}

struct TimofteCertificate {
  int n = 0;
  std::vector<TimofteSlice> slices;
  bool verdict = false;
};

// f >= 0 on all of R^n reduces to the n-1 two-value slices being
// nonnegative on [-1,1].
inline TimofteCertificate timofte_certify(int n) {
  if (n < 3) throw std::invalid_argument("timofte_certify: need n >= 3");
  TimofteCertificate cert;
  cert.n = n;
  cert.verdict = true;
  for (int k = 1; k <= n - 1; ++k) {
    cert.slices.push_back(timofte_slice(n, k));
    if (!(cert.slices.back().min_on_interval >= 0.0)) cert.verdict = false;
  }
  return cert;
}

// det(Lambda + xi1 eta1^T + xi2 eta2^T) versus
// det(Lambda) det(I2 + (eta1,eta2)^T Lambda^{-1} (xi1,xi2)),
// the two sides computed independently.
inline std::pair<double, double> det_lemma_check(const linalg::Matrix& lambda,
                                                 const linalg::Vector& xi1,
                                                 const linalg::Vector& eta1,
                                                 const linalg::Vector& xi2,
                                                 const linalg::Vector& eta2) {
  const int n = lambda.rows();
  if (lambda.cols() != n) throw std::invalid_argument("det_lemma_check: matrix not square");
  if (static_cast<int>(xi1.size()) != n || static_cast<int>(eta1.size()) != n ||
      static_cast<int>(xi2.size()) != n || static_cast<int>(eta2.size()) != n)
    throw std::invalid_argument("det_lemma_check: vector length mismatch");
  const linalg::LuFactors f = linalg::lu_factor(lambda, tol.det_pivot);
  if (f.singular) throw std::invalid_argument("det_lemma_check: matrix is singular");

  linalg::Matrix updated = lambda;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) updated(i, j) += xi1[i] * eta1[j] + xi2[i] * eta2[j];
  const double lhs = linalg::lu_det(linalg::lu_factor(std::move(updated)));

  const linalg::Vector y1 = linalg::lu_solve(f, xi1);
  const linalg::Vector y2 = linalg::lu_solve(f, xi2);
  const double a11 = 1.0 + linalg::dot(eta1, y1);
  const double a12 = linalg::dot(eta1, y2);
  const double a21 = linalg::dot(eta2, y1);
  const double a22 = 1.0 + linalg::dot(eta2, y2);
  const double rhs = linalg::lu_det(f) * (a11 * a22 - a12 * a21);
  return {lhs, rhs};
}

// Cyclic Jacobi eigenvalues of a symmetric matrix; the generic oracle the
// closed-form spectrum is checked against.
inline std::vector<double> jacobi_eigen(linalg::Matrix m) {
  const int n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  if (linalg::symmetry_defect(m) > tol.sym_rel * std::max(1.0, linalg::max_abs(m)))
    throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  const double target = tol.jacobi_sweep * linalg::frobenius(m);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * m(p, q) * m(p, q);
    if (std::sqrt(off) <= target) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = m(p, p), aqq = m(q, q);
        m(p, p) = app - t * apq;
        m(q, q) = aqq + t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = m(r, p), arq = m(r, q);
          m(r, p) = c * arp - s * arq;
          m(p, r) = m(r, p);
          m(r, q) = s * arp + c * arq;
          m(q, r) = m(r, q);
        }
      }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = m(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// Minimum of Q over `trials` random unit directions; a falsification
// oracle, deterministic in (seed, trial index).
inline double oracle_min_Q(const SpectrumH& sp, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("oracle_min_Q: need trials >= 1");
  const int n = sp.n();
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    rng::Stream st(seed, static_cast<std::uint64_t>(trial));
    std::vector<double> dir(n);
    double nrm = 0.0;
    do {
      for (int i = 0; i < n; ++i) dir[i] = st.gaussian();
      nrm = linalg::norm(dir);
    } while (nrm < 1e-8);
    for (double& v : dir) v /= nrm;
    best = std::min(best, evaluate_Q(dir, sp));
  }
  return best;
}

}  // namespace pinch::certify
