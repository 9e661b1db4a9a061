#pragma once

#include "pinch/linalg.hpp"
#include "pinch/rng.hpp"
#include "pinch/tensor.hpp"

namespace testutil {

inline pinch::tensor::SymTensor2 random_sym(int n, pinch::rng::Stream& st) {
  pinch::tensor::SymTensor2 s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, st.gaussian());
  return s;
}

inline pinch::tensor::SymTensor2 random_spd(int n, pinch::rng::Stream& st) {
  pinch::linalg::Matrix L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) L(i, j) = 0.3 * st.gaussian();
    L(i, i) = 0.6 + std::abs(st.gaussian());
  }
  return pinch::tensor::SymTensor2::symmetrized(L * pinch::linalg::transpose(L));
}

// Gram-Schmidt on gaussian columns.
inline pinch::linalg::Matrix random_orthogonal(int n, pinch::rng::Stream& st) {
  pinch::linalg::Matrix q(n, n);
  for (int col = 0; col < n; ++col) {
    pinch::linalg::Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = st.gaussian();
    for (int prev = 0; prev < col; ++prev) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += q(i, prev) * v[i];
      for (int i = 0; i < n; ++i) v[i] -= d * q(i, prev);
    }
    const double nrm = pinch::linalg::norm(v);
    for (int i = 0; i < n; ++i) q(i, col) = v[i] / nrm;
  }
  return q;
}

// Product of two symmetric tensors with all algebraic curvature
// symmetries, including the first Bianchi identity; spans of these give
// generic valid curvature tensors.
inline pinch::tensor::AlgCurvature kulkarni(const pinch::tensor::SymTensor2& s,
                                            const pinch::tensor::SymTensor2& t) {
  return pinch::tensor::AlgCurvature::generate(s.dim(), [&](int i, int k, int j, int l) {
    return s(i, j) * t(k, l) + s(k, l) * t(i, j) - s(i, l) * t(k, j) - s(k, j) * t(i, l);
  });
}

inline pinch::tensor::AlgCurvature random_curvature(int n, pinch::rng::Stream& st) {
  const auto s1 = random_sym(n, st);
  const auto t1 = random_sym(n, st);
  const auto s2 = random_sym(n, st);
  const auto t2 = random_sym(n, st);
  return kulkarni(s1, t1) + kulkarni(s2, t2).scaled(0.5);
}

}  // namespace testutil
