#include <catch2/catch.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "helpers.hpp"
#include "pinch/io.hpp"

using namespace pinch;
using io::json;

namespace {

json identity_array(int n) {
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  return json(v);
}

}  // namespace

TEST_CASE("tensor document parsing") {
  SECTION("constant-curvature document reproduces the golden values") {
    json doc;
    doc["n"] = 4;
    doc["kappa"] = 1.0;
    doc["h"] = identity_array(4);
    const auto prob = io::load_tensor_document(doc);
    REQUIRE(prob.scalar == Approx(12.0).margin(1e-12));
    REQUIRE(tensor::weyl_of(prob.frame, prob.rm).weyl_norm < 1e-12);
    REQUIRE(tensor::pinch_P(prob.frame, prob.rc, prob.h) == Approx(0.0).margin(1e-12));
  }
  SECTION("ricci document with a rank-one h") {
    json doc;
    doc["n"] = 4;
    json ricci = identity_array(4);
    for (auto& v : ricci) v = v.get<double>() * 3.0;
    doc["ricci"] = ricci;
    std::vector<double> h(16, 0.0);
    h[0] = 1.0;
    doc["h"] = json(h);
    const auto prob = io::load_tensor_document(doc);
    REQUIRE(tensor::pinch_P(prob.frame, prob.rc, prob.h) == Approx(36.0).margin(1e-10));
  }
  SECTION("riemann document round trips through the validator") {
    const tensor::PointFrame f = tensor::PointFrame::euclidean(4);
    const auto rm = tensor::const_curvature(f, 0.5);
    json doc;
    doc["n"] = 4;
    doc["riemann"] = json(rm.raw());
    doc["h"] = identity_array(4);
    const auto prob = io::load_tensor_document(doc);
    REQUIRE(prob.scalar == Approx(6.0).margin(1e-12));
  }
  SECTION("g defaults to the identity and is honored when given") {
    json doc;
    doc["n"] = 4;
    doc["kappa"] = 1.0;
    doc["h"] = identity_array(4);
    json g = identity_array(4);
    for (auto& v : g) v = v.get<double>() * 4.0;
    doc["g"] = g;
    const auto prob = io::load_tensor_document(doc);
    // R = kappa n(n-1) regardless of the overall metric scale
    REQUIRE(prob.scalar == Approx(12.0).margin(1e-10));
  }
  SECTION("schema violations exit through DocumentError") {
    json base;
    base["n"] = 4;
    base["h"] = identity_array(4);

    json both = base;
    both["kappa"] = 1.0;
    both["riemann"] = json::array();
    REQUIRE_THROWS_AS(io::load_tensor_document(both), io::DocumentError);

    json neither = base;
    REQUIRE_THROWS_AS(io::load_tensor_document(neither), io::DocumentError);

    json small = base;
    small["n"] = 2;
    small["kappa"] = 1.0;
    REQUIRE_THROWS_AS(io::load_tensor_document(small), io::DocumentError);

    json bad_h = base;
    bad_h["kappa"] = 1.0;
    bad_h["h"] = json::array({1.0, 2.0});
    REQUIRE_THROWS_AS(io::load_tensor_document(bad_h), io::DocumentError);

    json asym = base;
    asym["kappa"] = 1.0;
    std::vector<double> hv(16, 0.0);
    hv[1] = 1.0;  // h(0,1) != h(1,0)
    asym["h"] = json(hv);
    REQUIRE_THROWS_AS(io::load_tensor_document(asym), io::DocumentError);

    json indefinite = base;
    indefinite["kappa"] = 1.0;
    std::vector<double> gv(16, 0.0);
    for (int i = 0; i < 4; ++i) gv[static_cast<std::size_t>(i) * 4 + i] = (i == 0 ? -1.0 : 1.0);
    indefinite["g"] = json(gv);
    REQUIRE_THROWS_AS(io::load_tensor_document(indefinite), io::DocumentError);
  }
}

TEST_CASE("flow config parsing") {
  json cfg;
  cfg["model"] = "sphere";
  cfg["n"] = 4;
  cfg["kappa0"] = 1.0;
  cfg["h0"] = identity_array(4);
  cfg["dt"] = 1e-3;
  cfg["t_end"] = 0.05;
  SECTION("sphere model loads and runs") {
    const auto fr = io::load_flow_config(cfg);
    REQUIRE(fr.state.K0 == Approx(std::sqrt(24.0)).margin(1e-12));
    const auto res = flow::run(fr.state, fr.spec);
    REQUIRE(res.passed());
  }
  SECTION("defaults are applied") {
    const auto fr = io::load_flow_config(cfg);
    REQUIRE(fr.spec.stride == 1);
    REQUIRE(fr.spec.c_exponent == 0.5);
    REQUIRE(fr.spec.tol == 1e-6);
  }
  SECTION("missing pieces are rejected") {
    json missing = cfg;
    missing.erase("kappa0");
    REQUIRE_THROWS_AS(io::load_flow_config(missing), io::DocumentError);
    json nodt = cfg;
    nodt.erase("dt");
    REQUIRE_THROWS_AS(io::load_flow_config(nodt), io::DocumentError);
    json badmodel = cfg;
    badmodel["model"] = "torus";
    REQUIRE_THROWS_AS(io::load_flow_config(badmodel), io::DocumentError);
    json badstride = cfg;
    badstride["stride"] = 0;
    REQUIRE_THROWS_AS(io::load_flow_config(badstride), io::DocumentError);
    json badtol = cfg;
    badtol["tol"] = 0.0;
    REQUIRE_THROWS_AS(io::load_flow_config(badtol), io::DocumentError);
    json baddt = cfg;
    baddt["dt"] = "fast";  // wrong type must still surface as a document error
    REQUIRE_THROWS_AS(io::load_flow_config(baddt), io::DocumentError);
    json badn = cfg;
    badn["model"] = 7;
    REQUIRE_THROWS_AS(io::load_flow_config(badn), io::DocumentError);
  }
  SECTION("lcf and frozen models load") {
    json lcf;
    lcf["model"] = "lcf";
    lcf["n"] = 4;
    json ricci = identity_array(4);
    for (auto& v : ricci) v = v.get<double>() * 3.0;
    lcf["ricci"] = ricci;
    lcf["h0"] = identity_array(4);
    lcf["dt"] = 1e-3;
    lcf["t_end"] = 0.01;
    REQUIRE(io::load_flow_config(lcf).model_name == "lcf");

    json frozen = lcf;
    frozen["model"] = "frozen";
    const auto fr = io::load_flow_config(frozen);
    REQUIRE(std::holds_alternative<flow::Frozen>(fr.state.model));
  }
  SECTION("negative initial scalar curvature is caught by run") {
    json neg = cfg;
    neg["kappa0"] = -1.0;
    const auto fr = io::load_flow_config(neg);
    REQUIRE_THROWS_AS(flow::run(fr.state, fr.spec), std::invalid_argument);
  }
}

TEST_CASE("telemetry CSV") {
  json cfg;
  cfg["model"] = "sphere";
  cfg["n"] = 4;
  cfg["kappa0"] = 1.0;
  cfg["h0"] = identity_array(4);
  cfg["dt"] = 1e-3;
  cfg["t_end"] = 0.02;
  cfg["stride"] = 5;
  const auto fr = io::load_flow_config(cfg);
  const auto res = flow::run(fr.state, fr.spec);
  std::ostringstream os;
  io::write_telemetry_csv(os, res.telemetry);
  std::istringstream in(os.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "t,R,ric2,rm,h2,ratio,bound15,bound31,P");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::size_t commas = 0;
    for (char c : line) commas += c == ',';
    REQUIRE(commas == 8);
  }
  REQUIRE(rows == res.telemetry.rows.size());
}

TEST_CASE("fmt17 round trips doubles") {
  rng::Stream st(521, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = st.gaussian() * std::pow(10.0, st.uniform_int(-12, 12));
    const double back = std::strtod(io::fmt17(x).c_str(), nullptr);
    REQUIRE(back == x);
  }
  REQUIRE(io::fmt17(0.0) == "0");
  REQUIRE(io::fmt17(0.25) == "0.25");
}

TEST_CASE("run summary carries the monitor verdicts") {
  json cfg;
  cfg["model"] = "sphere";
  cfg["n"] = 4;
  cfg["kappa0"] = 1.0;
  cfg["h0"] = identity_array(4);
  cfg["dt"] = 1e-3;
  cfg["t_end"] = 0.02;
  const auto fr = io::load_flow_config(cfg);
  const auto res = flow::run(fr.state, fr.spec);
  const json summary = io::run_summary_json(fr, res);
  REQUIRE(summary.at("passed").get<bool>());
  REQUIRE(summary.at("monitors").contains("ratio_monotone"));
  REQUIRE(summary.at("monitors").contains("blowup_bound"));
  REQUIRE(summary.at("monitors").contains("scalar_identity"));
  REQUIRE(summary.at("faulted").get<bool>() == false);
}
