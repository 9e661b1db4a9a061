#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "certify.hpp"
#include "flow.hpp"
#include "tensor.hpp"

namespace pinch::io {

using json = nlohmann::ordered_json;

struct DocumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// round-trip safe: 17 significant digits
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::vector<double> number_array(const json& j, std::size_t expected,
                                        const std::string& field) {
  if (!j.is_array() || j.size() != expected)
    throw DocumentError(field + ": expected an array of " + std::to_string(expected) +
                        " numbers");
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw DocumentError(field + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

inline tensor::SymTensor2 sym_from_array(const json& j, int n, const std::string& field) {
  const std::vector<double> v =
      number_array(j, static_cast<std::size_t>(n) * n, field);
  linalg::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = v[static_cast<std::size_t>(i) * n + k];
  try {
    return tensor::SymTensor2::from_matrix(m);
  } catch (const std::invalid_argument& e) {
    throw DocumentError(field + ": " + e.what());
  }
}

// Tensor document: n, optional g (default identity), h, and exactly one of
// kappa / ricci / riemann.
struct TensorProblem {
  tensor::PointFrame frame;
  tensor::AlgCurvature rm;
  tensor::SymTensor2 rc;
  double scalar = 0.0;
  tensor::SymTensor2 h;
};

inline TensorProblem load_tensor_document(const json& doc) {
  if (!doc.is_object()) throw DocumentError("tensor document: expected a JSON object");
  if (!doc.contains("n") || !doc.at("n").is_number_integer())
    throw DocumentError("tensor document: integer field 'n' required");
  const int n = doc.at("n").get<int>();
  if (n < 3) throw DocumentError("tensor document: n must be at least 3");

  tensor::SymTensor2 g = doc.contains("g") ? sym_from_array(doc.at("g"), n, "g")
                                           : tensor::SymTensor2::identity(n);
  if (!doc.contains("h")) throw DocumentError("tensor document: field 'h' required");
  tensor::SymTensor2 h = sym_from_array(doc.at("h"), n, "h");

  const int sources = static_cast<int>(doc.contains("kappa")) +
                      static_cast<int>(doc.contains("ricci")) +
                      static_cast<int>(doc.contains("riemann"));
  if (sources != 1)
    throw DocumentError("tensor document: exactly one of kappa, ricci, riemann required");

  try {
    tensor::PointFrame frame{std::move(g)};
    tensor::AlgCurvature rm;
    tensor::SymTensor2 rc;
    if (doc.contains("kappa")) {
      if (!doc.at("kappa").is_number()) throw DocumentError("kappa: expected a number");
      rm = tensor::const_curvature(frame, doc.at("kappa").get<double>());
      rc = tensor::ricci_of(frame, rm);
    } else if (doc.contains("ricci")) {
      rc = sym_from_array(doc.at("ricci"), n, "ricci");
      rm = tensor::lcf_curvature_from_ricci(frame, rc);
    } else {
      const std::vector<double> raw = number_array(
          doc.at("riemann"), static_cast<std::size_t>(n) * n * n * n, "riemann");
      rm = tensor::AlgCurvature::from_components(n, raw);
      rc = tensor::ricci_of(frame, rm);
    }
    const double scalar = tensor::trace(frame, rc);
    return TensorProblem{std::move(frame), std::move(rm), std::move(rc), scalar,
                         std::move(h)};
  } catch (const DocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw DocumentError(std::string("tensor document: ") + e.what());
  }
}

// Run config: model sphere|lcf|frozen, n, kappa0/ricci/riemann, h0, dt,
// t_end, stride, c_exponent, tol.  The metric starts at the identity.
struct FlowRun {
  flow::FlowState state;
  flow::RunSpec spec;
  std::string model_name;
};

inline FlowRun load_flow_config(const json& cfg) {
  if (!cfg.is_object()) throw DocumentError("run config: expected a JSON object");
  for (const char* req : {"model", "n", "h0", "dt", "t_end"})
    if (!cfg.contains(req))
      throw DocumentError(std::string("run config: field '") + req + "' required");
  if (!cfg.at("model").is_string())
    throw DocumentError("run config: string field 'model' required");
  const std::string model_name = cfg.at("model").get<std::string>();
  if (!cfg.at("n").is_number_integer())
    throw DocumentError("run config: integer field 'n' required");
  const int n = cfg.at("n").get<int>();
  if (n < 3) throw DocumentError("run config: n must be at least 3");

  try {
    flow::RunSpec spec;
    spec.dt = cfg.at("dt").get<double>();
    spec.t_end = cfg.at("t_end").get<double>();
    spec.stride = cfg.value("stride", 1);
    spec.c_exponent = cfg.value("c_exponent", 0.5);
    spec.tol = cfg.value("tol", 1e-6);
    if (!(spec.dt > 0.0) || !(spec.t_end > 0.0))
      throw DocumentError("run config: dt and t_end must be positive");
    if (spec.stride < 1) throw DocumentError("run config: stride must be at least 1");
    if (!(spec.tol > 0.0)) throw DocumentError("run config: tol must be positive");
    tensor::SymTensor2 h0 = sym_from_array(cfg.at("h0"), n, "h0");
    const tensor::SymTensor2 g0 = tensor::SymTensor2::identity(n);
    flow::CurvatureModel model;
    if (model_name == "sphere") {
      if (!cfg.contains("kappa0")) throw DocumentError("run config: sphere needs kappa0");
      model = flow::ConstantCurvature{cfg.at("kappa0").get<double>()};
    } else if (model_name == "lcf") {
      if (!cfg.contains("ricci")) throw DocumentError("run config: lcf needs ricci");
      model = flow::ConformallyFlat{sym_from_array(cfg.at("ricci"), n, "ricci")};
    } else if (model_name == "frozen") {
      const tensor::PointFrame frame0{g0};
      if (cfg.contains("riemann")) {
        const std::vector<double> raw = number_array(
            cfg.at("riemann"), static_cast<std::size_t>(n) * n * n * n, "riemann");
        model = flow::make_frozen(frame0, tensor::AlgCurvature::from_components(n, raw));
      } else if (cfg.contains("ricci")) {
        model = flow::make_frozen(
            frame0,
            tensor::lcf_curvature_from_ricci(frame0, sym_from_array(cfg.at("ricci"), n,
                                                                    "ricci")));
      } else {
        throw DocumentError("run config: frozen needs riemann or ricci");
      }
    } else {
      throw DocumentError("run config: unknown model '" + model_name + "'");
    }
    return FlowRun{flow::make_state(g0, std::move(model), std::move(h0)), spec, model_name};
  } catch (const DocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw DocumentError(std::string("run config: ") + e.what());
  }
}

inline void write_telemetry_csv(std::ostream& os, const flow::Telemetry& t) {
  os << "t,R,ric2,rm,h2,ratio,bound15,bound31,P\n";
  for (const auto& r : t.rows) {
    os << fmt17(r.t) << ',' << fmt17(r.R) << ',' << fmt17(r.ric2) << ',' << fmt17(r.rm)
       << ',' << fmt17(r.h2) << ',' << fmt17(r.ratio) << ',' << fmt17(r.bound15) << ','
       << fmt17(r.bound31) << ',' << fmt17(r.P) << '\n';
  }
}

inline json slice_json(const certify::TimofteSlice& s) {
  return json{{"k", s.k},
              {"a1", s.a1},
              {"b1", s.b1},
              {"c1", s.c1},
              {"discriminant", s.discriminant},
              {"min_on_interval", s.min_on_interval}};
}

inline json monitor_json(const flow::MonitorReport& m) {
  return json{{"checked", m.checked},
              {"ok", m.ok},
              {"first_bad_row", m.first_bad_row},
              {"worst_margin", m.worst_margin}};
}

inline json run_summary_json(const FlowRun& fr, const flow::RunResult& res) {
  json j;
  j["command"] = "evolve";
  j["model"] = fr.model_name;
  j["n"] = fr.state.frame.dim();
  j["dt"] = fr.spec.dt;
  j["t_end"] = fr.spec.t_end;
  j["stride"] = fr.spec.stride;
  j["c_exponent"] = fr.spec.c_exponent;
  j["rows"] = res.telemetry.rows.size();
  j["K0"] = fr.state.K0;
  j["monitors"] = json{{"ratio_monotone", monitor_json(res.ratio_monotone)},
                       {"blowup_bound", monitor_json(res.blowup_bound)},
                       {"scalar_identity", monitor_json(res.scalar_identity)}};
  j["faulted"] = res.faulted;
  if (res.faulted) j["fault_reason"] = res.fault_reason;
  if (!res.telemetry.rows.empty()) {
    const auto& last = res.telemetry.rows.back();
    j["final"] = json{{"t", last.t}, {"R", last.R}, {"ratio", last.ratio}};
  }
  j["passed"] = res.passed();
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DocumentError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace pinch::io
