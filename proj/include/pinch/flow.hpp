#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tensor.hpp"
#include "tolerances.hpp"

namespace pinch::flow {

using tensor::AlgCurvature;
using tensor::PointFrame;
using tensor::SymTensor2;

struct ConstantCurvature {
  double kappa = 0.0;
};

// Curvature is rebuilt from the Ricci tensor at every query, so its
// trace-free rank-4 part stays identically zero along the run.
struct ConformallyFlat {
  SymTensor2 ricci;
};

// Fixed coordinate curvature; not a flow solution, a comparison harness.
struct Frozen {
  AlgCurvature rm;
  SymTensor2 rc;
};

using CurvatureModel = std::variant<ConstantCurvature, ConformallyFlat, Frozen>;

inline Frozen make_frozen(const PointFrame& frame, AlgCurvature rm) {
  SymTensor2 rc = tensor::ricci_of(frame, rm);
  return Frozen{std::move(rm), std::move(rc)};
}

inline Frozen make_frozen(const PointFrame& frame, AlgCurvature rm, SymTensor2 rc) {
  const SymTensor2 contracted = tensor::ricci_of(frame, rm);
  double defect = 0.0, scale = std::max(1.0, contracted.max_abs());
  for (int i = 0; i < rc.dim(); ++i)
    for (int j = 0; j < rc.dim(); ++j)
      defect = std::max(defect, std::abs(rc(i, j) - contracted(i, j)));
  if (defect > tol.derived_rel * scale)
    throw std::invalid_argument("make_frozen: rc does not match the Ricci contraction of rm");
  return Frozen{std::move(rm), std::move(rc)};
}

struct FlowState {
  double t = 0.0;
  PointFrame frame;
  CurvatureModel model;
  SymTensor2 h;
  double K0 = 0.0;  // |Rm| at t = 0
};

struct Materialized {
  AlgCurvature rm;
  SymTensor2 rc;
  double scalar = 0.0;
};

inline Materialized materialize(const PointFrame& frame, const CurvatureModel& model) {
  const int n = frame.dim();
  if (const auto* cc = std::get_if<ConstantCurvature>(&model)) {
    AlgCurvature rm = tensor::const_curvature(frame, cc->kappa);
    SymTensor2 rc = frame.metric().scaled(cc->kappa * (n - 1));
    return {std::move(rm), std::move(rc), cc->kappa * n * (n - 1.0)};
  }
  if (const auto* cf = std::get_if<ConformallyFlat>(&model)) {
    AlgCurvature rm = tensor::lcf_curvature_from_ricci(frame, cf->ricci);
    return {std::move(rm), cf->ricci, tensor::trace(frame, cf->ricci)};
  }
  const auto& fz = std::get<Frozen>(model);
  return {fz.rm, fz.rc, tensor::trace(frame, fz.rc)};
}

inline double riem_norm(const FlowState& s) {
  return tensor::riemann_norm(s.frame, materialize(s.frame, s.model).rm);
}

inline FlowState make_state(const SymTensor2& g0, CurvatureModel model, SymTensor2 h0) {
  PointFrame frame(g0);
  if (h0.dim() != frame.dim())
    throw std::invalid_argument("make_state: dimension mismatch between g and h");
  FlowState s{0.0, std::move(frame), std::move(model), std::move(h0), 0.0};
  s.K0 = riem_norm(s);
  return s;
}

struct Derivative {
  SymTensor2 dg;
  SymTensor2 dh;
  double dkappa = 0.0;
  std::optional<SymTensor2> dricci;
};

// dg = -2 Rc; dh is the reaction part of the Lichnerowicz Laplacian; the
// model parameter follows its own reaction (the Ricci tensor evolves the
// way h does, with h = Rc).
inline Derivative reaction_rhs(const FlowState& s) {
  const Materialized m = materialize(s.frame, s.model);
  Derivative d{m.rc.scaled(-2.0),
               tensor::lichnerowicz_reaction(s.frame, m.rm, m.rc, s.h), 0.0, std::nullopt};
  if (const auto* cc = std::get_if<ConstantCurvature>(&s.model)) {
    d.dkappa = 2.0 * (s.frame.dim() - 1.0) * cc->kappa * cc->kappa;
  } else if (std::get_if<ConformallyFlat>(&s.model)) {
    d.dricci = tensor::lichnerowicz_reaction(s.frame, m.rm, m.rc, m.rc);
  }
  return d;
}

class IntegrationFault : public std::runtime_error {
 public:
  IntegrationFault(FlowState last_good, const std::string& why)
      : std::runtime_error("integration fault: " + why), last_good_(std::move(last_good)) {}
  const FlowState& last_good() const { return last_good_; }

 private:
  FlowState last_good_;
};

namespace detail {

inline void push_sym(const SymTensor2& s, std::vector<double>& y) {
  for (int i = 0; i < s.dim(); ++i)
    for (int j = i; j < s.dim(); ++j) y.push_back(s(i, j));
}

inline SymTensor2 pop_sym(int n, const std::vector<double>& y, std::size_t& pos) {
  SymTensor2 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) t.set(i, j, y[pos++]);
  return t;
}

inline std::vector<double> pack_state(const FlowState& s) {
  std::vector<double> y;
  push_sym(s.frame.metric(), y);
  push_sym(s.h, y);
  if (const auto* cc = std::get_if<ConstantCurvature>(&s.model))
    y.push_back(cc->kappa);
  else if (const auto* cf = std::get_if<ConformallyFlat>(&s.model))
    push_sym(cf->ricci, y);
  return y;
}

inline std::vector<double> pack_derivative(const FlowState& at) {
  const Derivative d = reaction_rhs(at);
  std::vector<double> y;
  push_sym(d.dg, y);
  push_sym(d.dh, y);
  if (std::get_if<ConstantCurvature>(&at.model))
    y.push_back(d.dkappa);
  else if (std::get_if<ConformallyFlat>(&at.model))
    push_sym(*d.dricci, y);
  return y;
}

inline FlowState unpack_state(const FlowState& proto, const std::vector<double>& y, double t) {
  const int n = proto.frame.dim();
  std::size_t pos = 0;
  SymTensor2 g = pop_sym(n, y, pos);
  SymTensor2 h = pop_sym(n, y, pos);
  CurvatureModel model = proto.model;
  if (std::get_if<ConstantCurvature>(&proto.model))
    model = ConstantCurvature{y[pos++]};
  else if (std::get_if<ConformallyFlat>(&proto.model))
    model = ConformallyFlat{pop_sym(n, y, pos)};
  return FlowState{t, PointFrame(std::move(g)), std::move(model), std::move(h), proto.K0};
}

}  // namespace detail

// One classical fourth-order step of the coupled (g, h, model) system.
// Any numeric failure inside the stages surfaces as an IntegrationFault
// carrying the last good state.
inline FlowState step_rk4(const FlowState& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  try {
    const std::vector<double> y0 = detail::pack_state(s);
    const std::vector<double> k1 = detail::pack_derivative(s);
    const auto advance = [&](const std::vector<double>& k, double a) {
      std::vector<double> y = y0;
      for (std::size_t m = 0; m < y.size(); ++m) y[m] += a * k[m];
      return y;
    };
    const FlowState s2 = detail::unpack_state(s, advance(k1, 0.5 * dt), s.t + 0.5 * dt);
    const std::vector<double> k2 = detail::pack_derivative(s2);
    const FlowState s3 = detail::unpack_state(s, advance(k2, 0.5 * dt), s.t + 0.5 * dt);
    const std::vector<double> k3 = detail::pack_derivative(s3);
    const FlowState s4 = detail::unpack_state(s, advance(k3, dt), s.t + dt);
    const std::vector<double> k4 = detail::pack_derivative(s4);
    std::vector<double> y1 = y0;
    for (std::size_t m = 0; m < y1.size(); ++m)
      y1[m] += dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
    for (double v : y1)
      if (!std::isfinite(v)) throw std::runtime_error("non-finite state component");
    return detail::unpack_state(s, y1, s.t + dt);
  } catch (const IntegrationFault&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrationFault(s, e.what());
  }
}

// Shrinking round sphere in closed form: g(t) = (1 - 2(n-1) kappa0 t) g0,
// kappa(t) = kappa0 / (1 - 2(n-1) kappa0 t).  Integrator oracle.
inline FlowState sphere_exact(int n, double kappa0, double t) {
  if (!(kappa0 > 0.0)) throw std::invalid_argument("sphere_exact: kappa0 must be positive");
  const double shrink = 1.0 - 2.0 * (n - 1.0) * kappa0 * t;
  if (!(shrink > 0.0)) throw std::domain_error("sphere_exact: time beyond extinction");
  const SymTensor2 g = SymTensor2::identity(n).scaled(shrink);
  FlowState s{t, PointFrame(g), ConstantCurvature{kappa0 / shrink}, g, 0.0};
  s.K0 = std::sqrt(2.0 * n * (n - 1.0)) * kappa0;
  return s;
}

inline double lemma31_bound(double K0, double t) {
  const double denom = 1.0 - 8.0 * K0 * t;
  if (!(denom > 0.0)) throw std::domain_error("lemma31_bound: beyond tracked horizon");
  return K0 / denom;
}

// d(|h|^2/R^2)/dt at a spatially homogeneous state with vanishing
// trace-free curvature: -4 P / R^3.
inline double pinch_reaction_derivative(const FlowState& s) {
  if (std::get_if<Frozen>(&s.model))
    throw std::invalid_argument(
        "pinch_reaction_derivative: requires a constant-curvature or conformally flat model");
  const Materialized m = materialize(s.frame, s.model);
  if (!(m.scalar > 0.0))
    throw std::domain_error("pinch_reaction_derivative: positive scalar curvature required");
  return -4.0 * tensor::pinch_P(s.frame, m.rc, s.h) / (m.scalar * m.scalar * m.scalar);
}

// Instantaneous dR/dt of the materialized scalar curvature, through the
// chain rule on (g, model).  Equals 2|Rc|^2 up to roundoff; the monitor
// checks exactly that.
inline double scalar_rate(const FlowState& s) {
  const Materialized m = materialize(s.frame, s.model);
  const Derivative d = reaction_rhs(s);
  const int n = s.frame.dim();
  SymTensor2 drc(n);
  if (const auto* cc = std::get_if<ConstantCurvature>(&s.model)) {
    drc = s.frame.metric().scaled((n - 1.0) * d.dkappa) + d.dg.scaled((n - 1.0) * cc->kappa);
  } else if (std::get_if<ConformallyFlat>(&s.model)) {
    drc = *d.dricci;
  }
  return 2.0 * tensor::norm2(s.frame, m.rc) + tensor::trace(s.frame, drc);
}

struct TelemetryRow {
  double t = 0.0;
  double R = 0.0;
  double ric2 = 0.0;   // |Rc|^2
  double rm = 0.0;     // |Rm|
  double h2 = 0.0;     // |h|^2
  double ratio = 0.0;  // |h|^2 / R^2
  double bound15 = 0.0;  // ratio(0) (1-8 K0 t)^{-c}; 0 once the horizon is passed
  double bound31 = 0.0;  // K0 / (1-8 K0 t); 0 once the horizon is passed
  double P = 0.0;
};

struct Telemetry {
  std::vector<TelemetryRow> rows;
};

struct RunSpec {
  double dt = 0.0;
  double t_end = 0.0;
  int stride = 1;
  double c_exponent = 0.5;
  double tol = 1e-6;  // scalar-identity monitor
};

struct MonitorReport {
  bool checked = false;
  bool ok = true;
  int first_bad_row = -1;
  double worst_margin = 0.0;  // most negative slack observed
};

struct RunResult {
  Telemetry telemetry;
  MonitorReport ratio_monotone;   // ratio series non-increasing
  MonitorReport blowup_bound;     // ratio <= ratio(0) (1-8 K0 t)^{-c}
  MonitorReport scalar_identity;  // dR/dt = 2|Rc|^2
  bool faulted = false;
  std::string fault_reason;

  bool passed() const {
    return (!ratio_monotone.checked || ratio_monotone.ok) &&
           (!blowup_bound.checked || blowup_bound.ok) &&
           (!scalar_identity.checked || scalar_identity.ok);
  }
};

// Fixed-step integration with telemetry every `stride` steps and three
// monitors evaluated on the recorded rows.
inline RunResult run(const FlowState& initial, const RunSpec& spec) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (!(spec.t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");
  if (spec.stride < 1) throw std::invalid_argument("run: stride must be at least 1");
  if (!(spec.tol > 0.0)) throw std::invalid_argument("run: tol must be positive");
  {
    const Materialized m0 = materialize(initial.frame, initial.model);
    if (!(m0.scalar > 0.0))
      throw std::invalid_argument("run: positive scalar curvature required at t = 0");
  }

  RunResult res;
  std::vector<double> rates;          // scalar_rate per recorded row
  std::vector<bool> tracked;          // row is inside the 1/(8 K0) horizon
  const double K0 = initial.K0;

  const auto record = [&](const FlowState& st) -> bool {
    const Materialized m = materialize(st.frame, st.model);
    if (!(m.scalar > 0.0)) return false;
    TelemetryRow row;
    row.t = st.t;
    row.R = m.scalar;
    row.ric2 = tensor::norm2(st.frame, m.rc);
    row.rm = tensor::riemann_norm(st.frame, m.rm);
    row.h2 = tensor::norm2(st.frame, st.h);
    row.ratio = row.h2 / (row.R * row.R);
    row.P = tensor::pinch_P(st.frame, m.rc, st.h);
    const double u = 8.0 * K0 * st.t;
    const bool in_horizon = u < 1.0;
    if (in_horizon) {
      row.bound31 = K0 / (1.0 - u);
      const double ratio0 = res.telemetry.rows.empty() ? row.ratio
                                                       : res.telemetry.rows.front().ratio;
      row.bound15 = ratio0 * std::pow(1.0 - u, -spec.c_exponent);
    }
    for (double v : {row.R, row.ric2, row.rm, row.h2, row.ratio, row.P, row.bound15,
                     row.bound31})
      if (!std::isfinite(v)) return false;
    rates.push_back(scalar_rate(st));
    tracked.push_back(in_horizon);
    res.telemetry.rows.push_back(row);
    return true;
  };

  if (!record(initial)) throw std::invalid_argument("run: initial state not recordable");

  FlowState state = initial;
  const long long nsteps = std::max(1ll, std::llround(spec.t_end / spec.dt));
  for (long long i = 1; i <= nsteps; ++i) {
    try {
      state = step_rk4(state, spec.dt);
    } catch (const IntegrationFault& e) {
      res.faulted = true;
      res.fault_reason = e.what();
      break;
    }
    const bool at_record = (i % spec.stride == 0) || i == nsteps;
    if (at_record && !record(state)) {
      res.faulted = true;
      res.fault_reason = "horizon fault: scalar curvature left the positive cone";
      break;
    }
  }

  const auto& rows = res.telemetry.rows;
  const double ratio0 = rows.front().ratio;
  const bool conformally_flat = !std::holds_alternative<Frozen>(initial.model);

  res.ratio_monotone.checked = conformally_flat;
  if (res.ratio_monotone.checked) {
    const double slack = tol.ratio_slack * std::max(1.0, ratio0);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double margin = rows[i].ratio + slack - rows[i + 1].ratio;
      res.ratio_monotone.worst_margin = std::min(res.ratio_monotone.worst_margin, margin);
      if (margin < 0.0 && res.ratio_monotone.ok) {
        res.ratio_monotone.ok = false;
        res.ratio_monotone.first_bad_row = static_cast<int>(i + 1);
      }
    }
  }

  res.blowup_bound.checked = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!tracked[i]) continue;
    const double margin = rows[i].bound15 * (1.0 + tol.blowup_slack) - rows[i].ratio;
    res.blowup_bound.worst_margin = std::min(res.blowup_bound.worst_margin, margin);
    if (margin < 0.0 && res.blowup_bound.ok) {
      res.blowup_bound.ok = false;
      res.blowup_bound.first_bad_row = static_cast<int>(i);
    }
  }

  res.scalar_identity.checked = conformally_flat;
  if (res.scalar_identity.checked) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double margin = spec.tol * rows[i].ric2 - std::abs(rates[i] - 2.0 * rows[i].ric2);
      res.scalar_identity.worst_margin = std::min(res.scalar_identity.worst_margin, margin);
      if (margin < 0.0 && res.scalar_identity.ok) {
        res.scalar_identity.ok = false;
        res.scalar_identity.first_bad_row = static_cast<int>(i);
      }
    }
  }

  return res;
}

}  // namespace pinch::flow
