#pragma once

namespace pinch {

// Every tolerance the library uses, in one record.  Structural tensor
// symmetries are exact by construction and have no entry here.
struct Tolerances {
  double chol_rel = 1e-12;         // L*L^T must reproduce the metric
  double sym_rel = 1e-12;          // symmetry validation of raw input
  double bianchi = 1e-10;          // first Bianchi identity, scaled by max |entry|
  double derived_rel = 1e-10;      // derived identities: round trips, trace-free checks
  double kernel_abs = 1e-12;       // reaction operator applied to the metric
  double jacobi_sweep = 1e-13;     // off-diagonal target, relative to ||M||_F
  double spectrum_oracle = 1e-8;   // closed-form spectrum vs Jacobi, scaled by ||B||_F
  double q_floor = 1e-9;           // Q >= -q_floor * scale
  double lemma42_floor = 1e-10;    // the two scalar nonnegativity checks
  double pinch_floor = 1e-9;       // P >= -pinch_floor * scale
  double det_pivot = 1e-12;        // LU pivot floor, relative to max |entry|
  double dual_path_rel = 1e-10;    // independent evaluation paths must agree
  double ratio_slack = 1e-8;       // monotonicity monitor, per recorded step
  double blowup_slack = 1e-6;      // blow-up bound monitor
  double scalar_identity = 1e-6;   // dR/dt vs 2|Rc|^2 monitor
};

inline constexpr Tolerances tol{};

}  // namespace pinch
