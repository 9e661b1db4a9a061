// Command-line front end: certificate sweeps, slice tables, reaction-ODE
// runs, and tensor-document decomposition reports.
//
// Exit codes: 0 success, 1 mathematical-claim violation, 2 usage or input
// error.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinch/driver.hpp"
#include "pinch/io.hpp"

namespace {

using pinch::io::json;

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  const auto pos = text.find("..");
  if (pos != std::string::npos) {
    const int lo = std::stoi(text.substr(0, pos));
    const int hi = std::stoi(text.substr(pos + 2));
    if (hi < lo) throw pinch::io::DocumentError("dims: empty range '" + text + "'");
    for (int n = lo; n <= hi; ++n) dims.push_back(n);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
  }
  if (dims.empty()) throw pinch::io::DocumentError("dims: nothing to do");
  for (int n : dims)
    if (n < 3) throw pinch::io::DocumentError("dims: every dimension must be at least 3");
  return dims;
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw pinch::io::DocumentError("cannot write " + out_path);
    f << doc.dump(2) << "\n";
  }
}

json counterexample_json(const pinch::driver::Counterexample& cx) {
  json j;
  j["kind"] = cx.kind;
  j["n"] = cx.n;
  j["trial"] = cx.trial;
  j["value"] = cx.value;
  j["threshold"] = cx.threshold;
  if (!cx.h.empty()) j["h"] = cx.h;
  if (!cx.r.empty()) j["r"] = cx.r;
  return j;
}

int run_certify(const std::string& dims_text, long long trials, std::uint64_t seed,
                double tolerance, const std::string& out_path) {
  const std::vector<int> dims = parse_dims(dims_text);
  if (trials < 1) throw pinch::io::DocumentError("trials must be at least 1");
  if (!(tolerance > 0.0)) throw pinch::io::DocumentError("tol must be positive");

  const pinch::driver::SweepReport sweep =
      pinch::driver::certify_sweep(dims, trials, seed, tolerance);

  json doc;
  doc["command"] = "certify";
  doc["seed"] = seed;
  doc["trials"] = trials;
  doc["tol"] = tolerance;
  doc["dims"] = dims;
  doc["certificates"] = json::array();
  for (const auto& rep : sweep.dims) {
    json c;
    c["n"] = rep.n;
    c["tol"] = tolerance;
    c["trials"] = rep.trials;
    c["lemma42"] = json::array({rep.min_dot, rep.min_q});
    c["spectrum"] = json{{"min_eig", rep.min_eig},
                         {"max_oracle_dev", rep.max_spectrum_dev}};
    c["Q"] = json{{"min_scaled", rep.min_Q_scaled}};
    c["pinch"] = json{{"min_scaled", rep.min_P_scaled}};
    c["slices"] = json::array();
    for (const auto& s : rep.timofte.slices) c["slices"].push_back(pinch::io::slice_json(s));
    c["verdict"] = rep.verdict;
    if (rep.counterexample) c["counterexample"] = counterexample_json(*rep.counterexample);
    doc["certificates"].push_back(std::move(c));
    std::fprintf(stderr, "n=%d verdict=%s min_eig=%.3e max_dev=%.3e\n", rep.n,
                 rep.verdict ? "certified" : "FAILED", rep.min_eig, rep.max_spectrum_dev);
  }
  doc["verdict"] = sweep.verdict;
  emit(doc, out_path);
  return sweep.verdict ? 0 : 1;
}

int run_phi(const std::string& dims_text, bool as_json, const std::string& out_path) {
  const std::vector<int> dims = parse_dims(dims_text);
  if (as_json) {
    json doc;
    doc["command"] = "phi";
    doc["tables"] = json::array();
    for (int n : dims) {
      const auto cert = pinch::certify::timofte_certify(n);
      json t;
      t["n"] = n;
      t["slices"] = json::array();
      for (const auto& s : cert.slices) t["slices"].push_back(pinch::io::slice_json(s));
      t["verdict"] = cert.verdict;
      if (n == 3) t["note"] = "no interior slices: the range k = 2..n-2 is empty";
      doc["tables"].push_back(std::move(t));
    }
    emit(doc, out_path);
    return 0;
  }
  std::ostringstream os;
  for (int n : dims) {
    const auto cert = pinch::certify::timofte_certify(n);
    os << "n=" << n << "\n";
    os << "  k            a1            b1            c1  discriminant  min_on_interval\n";
    for (const auto& s : cert.slices) {
      char line[160];
      std::snprintf(line, sizeof(line), "%3d  %12lld  %12lld  %12lld  %12lld  %s\n", s.k,
                    s.a1, s.b1, s.c1, s.discriminant,
                    pinch::io::fmt17(s.min_on_interval).c_str());
      os << line;
    }
    if (n == 3) os << "  note: no interior slices (the range k = 2..n-2 is empty)\n";
    os << "  verdict: " << (cert.verdict ? "nonnegative" : "FAILED") << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw pinch::io::DocumentError("cannot write " + out_path);
    f << os.str();
  }
  return 0;
}

int run_evolve(const std::string& config_path, const json& overrides,
               const std::string& out_path, const std::string& h0_spec) {
  json cfg = config_path.empty() ? json::object() : pinch::io::read_json_file(config_path);
  for (const auto& [key, value] : overrides.items()) cfg[key] = value;

  // --h0 identity|ricci|v1,v2,... fills the h0 field of the config
  if (!h0_spec.empty()) {
    if (!cfg.contains("n") || !cfg.at("n").is_number_integer())
      throw pinch::io::DocumentError("--h0 needs an integer n to be known");
    const int n = cfg.at("n").get<int>();
    if (h0_spec == "identity") {
      std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
      cfg["h0"] = v;
    } else if (h0_spec == "ricci") {
      json probe = cfg;
      std::vector<double> id(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i) * n + i] = 1.0;
      probe["h0"] = id;
      const auto fr = pinch::io::load_flow_config(probe);
      const auto m = pinch::flow::materialize(fr.state.frame, fr.state.model);
      std::vector<double> v(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = m.rc(i, j);
      cfg["h0"] = v;
    } else {
      std::stringstream ss(h0_spec);
      std::string item;
      std::vector<double> v;
      while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
      cfg["h0"] = v;
    }
  }

  const pinch::io::FlowRun fr = pinch::io::load_flow_config(cfg);
  const pinch::flow::RunResult res = pinch::flow::run(fr.state, fr.spec);
  const json summary = pinch::io::run_summary_json(fr, res);
  if (out_path.empty()) {
    pinch::io::write_telemetry_csv(std::cout, res.telemetry);
    std::cerr << summary.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw pinch::io::DocumentError("cannot write " + out_path);
    pinch::io::write_telemetry_csv(f, res.telemetry);
    std::cout << summary.dump(2) << "\n";
  }
  return res.passed() ? 0 : 1;
}

int run_decompose(const std::string& in_path, const std::string& out_path) {
  const json doc = pinch::io::read_json_file(in_path);
  const pinch::io::TensorProblem prob = pinch::io::load_tensor_document(doc);
  const pinch::tensor::WeylReport report =
      pinch::tensor::weyl_of(prob.frame, prob.rm);
  const double P = pinch::tensor::pinch_P(prob.frame, prob.rc, prob.h);
  const int n = prob.frame.dim();

  json out;
  out["command"] = "decompose";
  out["n"] = n;
  out["scalar"] = report.scalar;
  std::vector<double> ricci_flat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ricci_flat[static_cast<std::size_t>(i) * n + j] = report.ricci(i, j);
  out["ricci"] = ricci_flat;
  out["weyl_norm"] = report.weyl_norm;
  out["riemann_norm"] = pinch::tensor::riemann_norm(prob.frame, prob.rm);
  out["trace_h"] = pinch::tensor::trace(prob.frame, prob.h);
  out["h_norm2"] = pinch::tensor::norm2(prob.frame, prob.h);
  out["P"] = P;
  emit(out, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical certification toolkit for curvature pinching under the "
               "linearized Ricci flow"};
  app.require_subcommand(1);

  std::string dims_text = "4..8";
  long long trials = 10000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::string out_path;
  bool as_json = false;

  auto* certify = app.add_subcommand("certify", "certify Q >= 0, the spectrum of B, and P >= 0");
  certify->add_option("--dims", dims_text, "dimensions, e.g. 4..8 or 4,6,10");
  certify->add_option("--trials", trials, "random trials per dimension");
  certify->add_option("--seed", seed, "base seed for the trial streams");
  certify->add_option("--tol", tolerance, "relative nonnegativity floor");
  certify->add_option("--out", out_path, "write the certificate JSON here");

  auto* phi = app.add_subcommand("phi", "tabulate the half-degree slice polynomials");
  phi->add_option("--dims", dims_text, "dimensions, e.g. 4..8 or 4,6,10");
  phi->add_flag("--json", as_json, "emit JSON instead of a text table");
  phi->add_option("--out", out_path, "write the table here");

  std::string config_path, h0_spec, model_name;
  int n_flag = 0;
  double kappa0 = 0.0, dt = 0.0, t_end = 0.0, c_exponent = 0.0, run_tol = 0.0;
  int stride = 0;
  auto* evolve = app.add_subcommand("evolve", "integrate the reaction system and monitor it");
  evolve->add_option("--config", config_path, "run-config JSON file");
  evolve->add_option("--model", model_name, "sphere|lcf|frozen (overrides config)");
  evolve->add_option("--n", n_flag, "dimension (overrides config)");
  evolve->add_option("--kappa0", kappa0, "sphere curvature (overrides config)");
  evolve->add_option("--dt", dt, "step size (overrides config)");
  evolve->add_option("--t-end", t_end, "integration horizon (overrides config)");
  evolve->add_option("--stride", stride, "record every this many steps (overrides config)");
  evolve->add_option("--c-exponent", c_exponent, "blow-up bound exponent (overrides config)");
  evolve->add_option("--tol", run_tol, "scalar-identity monitor tolerance (overrides config)");
  evolve->add_option("--h0", h0_spec, "identity | ricci | comma list of n*n entries");
  evolve->add_option("--out", out_path, "write telemetry CSV here (summary JSON to stdout)");

  std::string in_path;
  auto* decompose = app.add_subcommand("decompose", "Weyl decomposition and P for a tensor document");
  decompose->add_option("input", in_path, "tensor document (JSON)")->required();
  decompose->add_option("--out", out_path, "write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(certify)) return run_certify(dims_text, trials, seed, tolerance, out_path);
    if (app.got_subcommand(phi)) return run_phi(dims_text, as_json, out_path);
    if (app.got_subcommand(evolve)) {
      json overrides = json::object();
      if (!model_name.empty()) overrides["model"] = model_name;
      if (n_flag > 0) overrides["n"] = n_flag;
      if (evolve->count("--kappa0")) overrides["kappa0"] = kappa0;
      if (evolve->count("--dt")) overrides["dt"] = dt;
      if (evolve->count("--t-end")) overrides["t_end"] = t_end;
      if (evolve->count("--stride")) overrides["stride"] = stride;
      if (evolve->count("--c-exponent")) overrides["c_exponent"] = c_exponent;
      if (evolve->count("--tol")) overrides["tol"] = run_tol;
      return run_evolve(config_path, overrides, out_path, h0_spec);
    }
    if (app.got_subcommand(decompose)) return run_decompose(in_path, out_path);
  } catch (const pinch::io::DocumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
