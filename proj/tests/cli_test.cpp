// Exercises the command-line contract through the real binary:
// exit 0 success, 1 claim violation, 2 usage/input error.
// argv[1] is the path to the tool.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pinch/driver.hpp"
#include "pinch/io.hpp"

namespace {

int g_failures = 0;
std::string g_cli;

int run(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

void expect(const char* what, bool cond) {
  if (cond) {
    std::printf("[PASS] %s\n", what);
  } else {
    std::printf("[FAIL] %s\n", what);
    ++g_failures;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// A run config whose ratio genuinely grows (Weyl-dominated frozen
// curvature, h on top of the curvature action) so a constant comparison
// bound is violated and the tool must exit 1.
void write_growing_frozen_config(const std::string& path) {
  using namespace pinch;
  const int n = 4;
  const tensor::PointFrame f0 = tensor::PointFrame::euclidean(n);
  rng::Stream st(4242, 0);
  const tensor::SymTensor2 S = driver::sample_sym(n, st);
  const tensor::SymTensor2 T = driver::sample_sym(n, st);
  const tensor::AlgCurvature product =
      tensor::AlgCurvature::generate(n, [&](int i, int k, int j, int l) {
        return S(i, j) * T(k, l) + S(k, l) * T(i, j) - S(i, l) * T(k, j) -
               S(k, j) * T(i, l);
      });
  const tensor::AlgCurvature W = tensor::weyl_of(f0, product).weyl;
  const double wn = tensor::riemann_norm(f0, W);
  const tensor::AlgCurvature rm = W + tensor::const_curvature(f0, 0.05);
  const auto apply_curv = [&](const tensor::SymTensor2& h) {
    linalg::Matrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += rm(i, k, j, l) * h(k, l);
        out(i, j) = s;
      }
    return tensor::SymTensor2::symmetrized(out);
  };
  tensor::SymTensor2 h = driver::sample_sym(n, st);
  for (int it = 0; it < 60; ++it) {
    const tensor::SymTensor2 next = apply_curv(h) + h.scaled(wn);
    h = next.scaled(1.0 / std::sqrt(tensor::norm2(f0, next)));
  }
  const double K0 = tensor::riemann_norm(f0, rm);
  const double t_end = 0.3 / (8.0 * K0);

  io::json cfg;
  cfg["model"] = "frozen";
  cfg["n"] = n;
  cfg["riemann"] = rm.raw();
  std::vector<double> h_flat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h_flat[static_cast<std::size_t>(i) * n + j] = h(i, j);
  cfg["h0"] = h_flat;
  cfg["dt"] = t_end / 256.0;
  cfg["t_end"] = t_end;
  cfg["stride"] = 16;
  cfg["c_exponent"] = 0.0;
  write_file(path, cfg.dump());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: cli_test <path-to-cli>\n");
    return 1;
  }
  g_cli = argv[1];

  expect("certify on a small sweep exits 0",
         run("certify --dims 3..4 --trials 200 --seed 5") == 0);
  expect("certify rejects a dimension below 3 with exit 2",
         run("certify --dims 2 --trials 10") == 2);
  expect("certify rejects zero trials with exit 2",
         run("certify --dims 4 --trials 0") == 2);
  expect("certify rejects a nonpositive tolerance with exit 2",
         run("certify --dims 4 --trials 10 --tol 0") == 2);
  expect("unknown subcommands exit 2", run("frobnicate") == 2);
  expect("phi emits a table and exits 0", run("phi --dims 3..5") == 0);
  expect("phi rejects bad dims with exit 2", run("phi --dims 1") == 2);
  expect("phi --json exits 0", run("phi --dims 4 --json --out cli_phi.json") == 0);
  {
    const std::string phi = slurp("cli_phi.json");
    expect("phi --json carries the exact integer slice row",
           phi.find("\"a1\": 5") != std::string::npos &&
               phi.find("\"b1\": -6") != std::string::npos &&
               phi.find("\"discriminant\": -64") != std::string::npos);
  }

  write_file("cli_doc_good.json",
             R"({"n":4,"ricci":[3,0,0,0, 0,3,0,0, 0,0,3,0, 0,0,0,3],)"
             R"("h":[1,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0]})");
  expect("decompose on a valid document exits 0",
         run("decompose cli_doc_good.json --out cli_doc_good_out.json") == 0);
  expect("decompose reports P = 36 for the rank-one document",
         slurp("cli_doc_good_out.json").find("\"P\": 36.0") != std::string::npos);

  write_file("cli_doc_both.json",
             R"({"n":4,"kappa":1.0,"ricci":[3,0,0,0, 0,3,0,0, 0,0,3,0, 0,0,0,3],)"
             R"("h":[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]})");
  expect("decompose rejects a document with two curvature sources (exit 2)",
         run("decompose cli_doc_both.json") == 2);

  write_file("cli_doc_neither.json",
             R"({"n":4,"h":[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]})");
  expect("decompose rejects a document with no curvature source (exit 2)",
         run("decompose cli_doc_neither.json") == 2);
  expect("decompose rejects a missing file with exit 2",
         run("decompose cli_no_such_file.json") == 2);

  expect("evolve exits 0 on a healthy sphere run",
         run("evolve --model sphere --n 4 --kappa0 1 --h0 ricci --dt 1e-3 "
             "--t-end 0.02 --out cli_tel.csv") == 0);
  expect("evolve rejects negative initial scalar curvature with exit 2",
         run("evolve --model sphere --n 4 --kappa0 -1 --h0 identity --dt 1e-3 "
             "--t-end 0.02 --out cli_tel.csv") == 2);
  expect("evolve rejects an unknown model with exit 2",
         run("evolve --model torus --n 4 --kappa0 1 --h0 identity --dt 1e-3 "
             "--t-end 0.02") == 2);
  expect("evolve rejects a missing h0 with exit 2",
         run("evolve --model sphere --n 4 --kappa0 1 --dt 1e-3 --t-end 0.02") == 2);

  write_file("cli_bad_types.json",
             R"({"model":"sphere","n":4,"kappa0":1.0,"dt":"fast","t_end":0.02,)"
             R"("h0":[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]})");
  expect("evolve rejects a wrongly typed config field with exit 2",
         run("evolve --config cli_bad_types.json --out cli_tel.csv") == 2);

  write_growing_frozen_config("cli_growing.json");
  expect("evolve reports a monitor violation with exit 1",
         run("evolve --config cli_growing.json --out cli_growing.csv") == 1);
  expect("the same run passes under the tracked exponent",
         run("evolve --config cli_growing.json --c-exponent 0.5 --out cli_growing.csv") ==
             0);

  if (g_failures > 0) {
    std::printf("%d CLI check(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}
