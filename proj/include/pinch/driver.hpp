#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "certify.hpp"
#include "flow.hpp"
#include "rng.hpp"
#include "tensor.hpp"
#include "tolerances.hpp"

namespace pinch::driver {

// Sampling families for the oracles: plain gaussian spectra plus the
// adversarial ones (two-valued spectra are the slice extremals, rank-one
// and zero-sum stress the cancellation paths).
inline certify::SpectrumH sample_spectrum(int n, long long trial, rng::Stream& st) {
  certify::SpectrumH sp;
  sp.h.resize(n);
  switch (trial % 4) {
    case 0: {  // two-valued
      const int k = st.uniform_int(1, n - 1);
      const double a = 2.0 * st.gaussian();
      const double b = st.gaussian();
      for (int i = 0; i < n; ++i) sp.h[i] = i < k ? a : b;
      break;
    }
    case 1: {  // rank one
      sp.h.assign(n, 0.0);
      sp.h[st.uniform_int(0, n - 1)] = 2.0 * st.gaussian();
      break;
    }
    case 2: {  // zero sum
      double mean = 0.0;
      for (int i = 0; i < n; ++i) {
        sp.h[i] = st.gaussian();
        mean += sp.h[i];
      }
      mean /= n;
      for (int i = 0; i < n; ++i) sp.h[i] -= mean;
      break;
    }
    default:
      for (int i = 0; i < n; ++i) sp.h[i] = st.gaussian();
  }
  return sp;
}

inline tensor::SymTensor2 sample_sym(int n, rng::Stream& st) {
  tensor::SymTensor2 s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, st.gaussian());
  return s;
}

// Well-conditioned random metric: g = L L^T with a positive-diagonal
// random lower factor.
inline tensor::SymTensor2 sample_spd(int n, rng::Stream& st) {
  linalg::Matrix L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) L(i, j) = 0.3 * st.gaussian();
    L(i, i) = 0.6 + std::abs(st.gaussian());
  }
  return tensor::SymTensor2::symmetrized(L * linalg::transpose(L));
}

// Random symmetric tensor shifted to positive trace, so it can serve as
// the Ricci tensor of a positive-scalar-curvature background.
inline tensor::SymTensor2 sample_ricci_positive(int n, rng::Stream& st) {
  tensor::SymTensor2 rc = sample_sym(n, st);
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += rc(i, i);
  if (tr < 0.5 * n) {
    const double shift = (0.5 * n - tr) / n + 0.5;
    for (int i = 0; i < n; ++i) rc.set(i, i, rc(i, i) + shift);
  }
  return rc;
}

struct Counterexample {
  std::string kind;
  int n = 0;
  long long trial = -1;
  std::vector<double> h;  // spectrum, when applicable
  std::vector<double> r;  // direction, when applicable
  double value = 0.0;
  double threshold = 0.0;
};

struct DimensionReport {
  int n = 0;
  long long trials = 0;
  certify::TimofteCertificate timofte;
  double min_dot = std::numeric_limits<double>::infinity();
  double min_q = std::numeric_limits<double>::infinity();
  double min_eig = std::numeric_limits<double>::infinity();
  double max_spectrum_dev = 0.0;  // |closed form - Jacobi| / max(1, ||B||)
  double min_Q_scaled = std::numeric_limits<double>::infinity();
  double min_P_scaled = std::numeric_limits<double>::infinity();
  bool verdict = false;
  std::optional<Counterexample> counterexample;
};

// One certification pass at dimension n: the half-degree slices, then per
// trial the two scalar inequalities, the closed-form spectrum against the
// Jacobi oracle, a random Q sample, and a full-tensor P sample.
inline DimensionReport certify_dimension(int n, long long trials, std::uint64_t seed,
                                         double tolerance) {
  if (n < 3) throw std::invalid_argument("certify_dimension: n must be at least 3");
  if (trials < 1) throw std::invalid_argument("certify_dimension: trials must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("certify_dimension: tol must be positive");

  DimensionReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.timofte = certify::timofte_certify(n);

  const std::uint64_t dim_seed = rng::mix64(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(n));
  const auto fail = [&](Counterexample cx) {
    if (!rep.counterexample) rep.counterexample = std::move(cx);
  };

  for (long long trial = 0; trial < trials; ++trial) {
    rng::Stream st(dim_seed, static_cast<std::uint64_t>(trial));
    const certify::SpectrumH sp = sample_spectrum(n, trial, st);

    const auto [dot, q] = certify::lemma42_quantities(sp);
    const certify::PowerSums ps = certify::power_sums(sp);
    const certify::BetaVector bv = certify::beta_vector(sp);
    const double dot_scale =
        (1.0 + 0.5 / (n - 1.0)) * ps.s2 + ps.s1 * ps.s1 / (2.0 * (n - 1.0));
    const double q_scale = dot * dot + n * bv.norm2;
    rep.min_dot = std::min(rep.min_dot, dot);
    rep.min_q = std::min(rep.min_q, q);
    if (dot < -tol.lemma42_floor * std::max(1.0, dot_scale))
      fail({"lemma42_dot", n, trial, sp.h, {}, dot, -tol.lemma42_floor * dot_scale});
    if (q < -tol.lemma42_floor * std::max(1.0, q_scale))
      fail({"lemma42_q", n, trial, sp.h, {}, q, -tol.lemma42_floor * q_scale});

    const certify::SpectralCertificate cert =
        certify::spectral_certificate(sp, tolerance * std::max(ps.s2, 1.0));
    rep.min_eig = std::min(rep.min_eig, cert.min_eig);
    if (!cert.verdict)
      fail({"spectrum_nonneg", n, trial, sp.h, {}, cert.min_eig,
            -tolerance * std::max(ps.s2, 1.0)});

    const linalg::Matrix B = certify::build_B(sp);
    const std::vector<double> oracle = certify::jacobi_eigen(B);
    const std::vector<double> closed = certify::certificate_spectrum(cert, n);
    const double bnorm = linalg::frobenius(B);
    double dev = 0.0;
    for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(closed[i] - oracle[i]));
    rep.max_spectrum_dev = std::max(rep.max_spectrum_dev, dev / std::max(1.0, bnorm));
    if (dev > tol.spectrum_oracle * std::max(1.0, bnorm))
      fail({"spectrum_oracle", n, trial, sp.h, {}, dev, tol.spectrum_oracle * bnorm});

    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = st.gaussian();
    const certify::QValue qv = certify::evaluate_Q_with_scale(r, sp);
    const double q_floor_scale = std::max(1.0, qv.scale);
    rep.min_Q_scaled = std::min(rep.min_Q_scaled, qv.value / q_floor_scale);
    if (qv.value < -tol.q_floor * q_floor_scale)
      fail({"Q_sample", n, trial, sp.h, r, qv.value, -tol.q_floor * q_floor_scale});

    const tensor::SymTensor2 g = sample_spd(n, st);
    const tensor::SymTensor2 rc = sample_sym(n, st);
    const tensor::SymTensor2 hh = sample_sym(n, st);
    const tensor::PointFrame frame{g};
    const tensor::PinchValue pv = tensor::pinch_P_with_scale(frame, rc, hh);
    const double p_floor_scale = std::max(1.0, pv.scale);
    rep.min_P_scaled = std::min(rep.min_P_scaled, pv.value / p_floor_scale);
    if (pv.value < -tol.pinch_floor * p_floor_scale)
      fail({"pinch_P", n, trial, {}, {}, pv.value, -tol.pinch_floor * p_floor_scale});
  }

  rep.verdict = rep.timofte.verdict && !rep.counterexample;
  return rep;
}

struct SweepReport {
  std::vector<DimensionReport> dims;
  bool verdict = true;
};

inline SweepReport certify_sweep(const std::vector<int>& dims, long long trials,
                                 std::uint64_t seed, double tolerance) {
  SweepReport rep;
  for (int n : dims) {
    rep.dims.push_back(certify_dimension(n, trials, seed, tolerance));
    rep.verdict = rep.verdict && rep.dims.back().verdict;
  }
  return rep;
}

// Seeded conformally flat run on a random positive-scalar background; the
// monotonicity monitor is the claim under test.
inline flow::RunResult random_lcf_run(int n, std::uint64_t seed, std::uint64_t index) {
  rng::Stream st(seed, index);
  const tensor::SymTensor2 g0 = tensor::SymTensor2::identity(n);
  const tensor::SymTensor2 rc = sample_ricci_positive(n, st);
  tensor::SymTensor2 h = sample_sym(n, st);
  flow::FlowState s0 = flow::make_state(g0, flow::ConformallyFlat{rc}, h);
  flow::RunSpec spec;
  spec.t_end = 0.3 / (8.0 * s0.K0);
  spec.dt = spec.t_end / 64.0;
  spec.stride = 1;
  return flow::run(s0, spec);
}

// Seeded frozen-curvature run; the blow-up bound monitor is the claim
// under test.
inline flow::RunResult random_frozen_run(int n, std::uint64_t seed, std::uint64_t index) {
  rng::Stream st(seed, index);
  const tensor::SymTensor2 g0 = tensor::SymTensor2::identity(n);
  const tensor::PointFrame frame0{g0};
  const tensor::SymTensor2 rc = sample_ricci_positive(n, st);
  tensor::SymTensor2 h = sample_sym(n, st);
  flow::FlowState s0 = flow::make_state(
      g0, flow::make_frozen(frame0, tensor::lcf_curvature_from_ricci(frame0, rc)), h);
  flow::RunSpec spec;
  spec.t_end = 0.6 / (8.0 * s0.K0);
  spec.dt = spec.t_end / 128.0;
  spec.stride = 1;
  return flow::run(s0, spec);
}

}  // namespace pinch::driver
