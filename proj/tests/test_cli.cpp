#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Result {
  int rc = 0;
  std::string out, err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"spikelab"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  Result r;
  r.rc = spikelab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST_CASE("theory anchor") {
  const Result r = run({"theory", "--c", "2", "--scaling", "operator", "--gamma", "2", "--tau2", "1", "--tau-eps2",
                        "1", "--alpha", "1", "--align2", "1"});
  CHECK(r.rc == 0);
  CHECK(r.out == "excess 1.375\nbias 0.125\nvariance 1.75\ndata_noise 1\ntarget_alignment -1.5\n");
}

TEST_CASE("decompose json") {
  const Result r = run({"decompose", "--c", "2", "--gamma", "2", "--json"});
  CHECK(r.rc == 0);
  CHECK(r.out.find("\"excess\": 0.5") != std::string::npos);
  CHECK(r.out.find("\"branch\": \"over\"") != std::string::npos);
}

TEST_CASE("phase and classify") {
  const Result p = run({"phase", "--c", "10", "--setting", "misspec", "--scaling", "frobenius"});
  CHECK(p.rc == 0);
  CHECK(p.out.find("interval (0.1, 1.9)") != std::string::npos);
  const Result c = run({"classify", "--scaling", "frobenius", "--setting", "well-specified", "--alignment", "parallel"});
  CHECK(c.rc == 0);
  CHECK(c.out.find("Benign, limit 0") != std::string::npos);
  const Result u = run({"classify", "--scaling", "operator", "--growth", "vanishing", "--setting", "well-specified",
                        "--alignment", "parallel"});
  CHECK(u.rc == 1);
  CHECK(u.err.find("UnsupportedCombination") != std::string::npos);
}

TEST_CASE("input errors exit with 1") {
  CHECK(run({"theory", "--c", "1.0005"}).rc == 1);
  CHECK(run({"theory", "--c", "2", "--bogus", "1"}).rc == 1);
  CHECK(run({"theory", "--c", "two"}).rc == 1);
  CHECK(run({"theory", "--c", "2", "--finite-d"}).rc == 1);
  CHECK(run({"simulate", "--c", "2", "--trials", "10"}).rc == 1);
  CHECK(run({"nosuch"}).rc == 1);
  const Result g = run({"theory", "--c", "1.0005"});
  CHECK(g.err.find("GuardBand") != std::string::npos);
}

TEST_CASE("help lists field names") {
  const Result r = run({"theory", "--help"});
  CHECK(r.rc == 0);
  for (const char* f : {"d:", "n:", "c:", "tau2:", "tau_eps2:", "alpha_z:", "alpha_a:", "beta_norm2:", "align2:",
                        "theta2_test:"})
    CHECK(r.out.find(f) != std::string::npos);
  CHECK(run({"--help"}).out.find("rmt-check") != std::string::npos);
}

TEST_CASE("config file with flag precedence") {
  const std::string cfg = temp_file("spikelab_cli_test.toml",
                                    "c = 4\nscaling = \"operator\"\ngamma = 2\ntau_eps2 = 1\nalign2 = 1\n");
  const Result a = run({"theory", "--config", cfg.c_str()});
  const Result b = run({"theory", "--c", "4", "--gamma", "2", "--tau-eps2", "1", "--align2", "1"});
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);
  const Result o = run({"theory", "--config", cfg.c_str(), "--c", "2"});
  const Result ob = run({"theory", "--c", "2", "--gamma", "2", "--tau-eps2", "1", "--align2", "1"});
  CHECK(o.out == ob.out);
  CHECK(o.out != a.out);
  const std::string bad = temp_file("spikelab_cli_bad.toml", "c = 4\nwidth = 3\n");
  CHECK(run({"theory", "--config", bad.c_str()}).rc == 1);
  CHECK(run({"theory", "--config", "/nonexistent/spikelab.toml"}).rc == 1);
  std::remove(cfg.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("simulation output is reproducible") {
  const Result a = run({"simulate", "--d", "80", "--c", "2", "--gamma", "2", "--trials", "16", "--seed", "5",
                        "--threads", "1"});
  const Result b = run({"simulate", "--d", "80", "--c", "2", "--gamma", "2", "--trials", "16", "--seed", "5",
                        "--threads", "3"});
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("empirical_excess") != std::string::npos);
}

TEST_CASE("sweep csv") {
  const Result r = run({"sweep", "--c", "1", "--scaling", "frobenius", "--axis", "c-fixed-d", "--grid", "0.5,2,4",
                        "--align2", "1"});
  CHECK(r.rc == 0);
  CHECK(r.out.rfind("axis_value,c,d,n,", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  const Result guard = run({"sweep", "--c", "1", "--axis", "c-fixed-d", "--grid", "0.5,1,2"});
  CHECK(guard.rc == 1);
  CHECK(guard.err.find("InvalidPlan") != std::string::npos);
}

TEST_CASE("rmt check") {
  const Result r = run({"rmt-check", "--instances", "3", "--seed", "3"});
  CAPTURE(r.out);
  CAPTURE(r.err);
  CHECK(r.rc == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
