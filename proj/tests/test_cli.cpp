#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliRun run_cli(const std::string& args) {
  CliRun res;
  std::string cmd = std::string(CERTIQP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
    res.output.append(buf, got);
  int raw = pclose(pipe);
  res.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  return res;
}

std::string write_file(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kFeasible =
    "n_z 1\n"
    "n_b 1\n"
    "Q\n0\n"
    "c\n1\n"
    "A\n1\n"
    "b\n1\n";

const char* kContradictory =
    "n_z 1\n"
    "n_b 2\n"
    "Q\n0\n"
    "c\n0\n"
    "A\n1\n-1\n"
    "b\n1 0\n";

}  // namespace

TEST_CASE("cli cert prints the certificate row") {
  CliRun r = run_cli("cert 2 3 --epsilon 1e-6");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find(
            "n_z,n_b,n,epsilon,iterations,flops_per_iteration,flops_setup,"
            "total_flops") != std::string::npos);
  CHECK(r.output.find("2,3,5,1e-06,85,") != std::string::npos);
}

TEST_CASE("cli solve: feasible file exits 0") {
  std::string path = write_file("cli_feasible.txt", kFeasible);
  CliRun r = run_cli("solve " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("status: optimal") != std::string::npos);
  CHECK(r.output.find("objective:") != std::string::npos);
  CHECK(r.output.find("iterations: 55") != std::string::npos);  // n = 2
  std::remove(path.c_str());
}

TEST_CASE("cli solve: infeasible file exits 2") {
  std::string path = write_file("cli_contra.txt", kContradictory);
  CliRun r = run_cli("solve " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("status: infeasible") != std::string::npos);
  CHECK(r.output.find("certificate_point:") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("cli solve: trace file has the iterate schema") {
  std::string path = write_file("cli_trace_in.txt", kFeasible);
  CliRun r = run_cli("solve " + path + " --trace --out cli_trace.csv");
  CHECK(r.exit_code == 0);
  std::string csv = slurp("cli_trace.csv");
  CHECK(csv.rfind("k,mu_bar,residual_norm,tau,kappa\n", 0) == 0);
  // k = 0 .. N inclusive
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 55 + 1);
  std::remove(path.c_str());
  std::remove("cli_trace.csv");
}

TEST_CASE("cli solve: malformed file exits 1 with a line number") {
  std::string path = write_file("cli_bad.txt", "n_z 1\nn_b 1\nQ\nnope\n");
  CliRun r = run_cli("solve " + path);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("line 4") != std::string::npos);
  std::remove(path.c_str());

  CliRun missing = run_cli("solve does_not_exist.txt");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("error:") != std::string::npos);
}

TEST_CASE("cli bench-infeasible: tiny run detects everything") {
  CliRun r = run_cli(
      "bench-infeasible --per-decade 2 --nz 4 --nb 4 --out cli_bench.csv");
  CHECK(r.exit_code == 0);
  std::string csv = slurp("cli_bench.csv");
  CHECK(csv.rfind("cond_decade,instances,detected,rate\n", 0) == 0);
  CHECK(csv.find("1e+01,2,2,1.00") != std::string::npos);
  CHECK(csv.find("1e+06,2,2,1.00") != std::string::npos);

  CliRun again = run_cli(
      "bench-infeasible --per-decade 2 --nz 4 --nb 4 --out cli_bench2.csv");
  CHECK(again.exit_code == 0);
  CHECK(slurp("cli_bench2.csv") == csv);
  std::remove("cli_bench.csv");
  std::remove("cli_bench2.csv");
}

TEST_CASE("cli rejects unknown flags and bad epsilon") {
  CliRun r = run_cli("solve --definitely-not-a-flag input.txt");
  CHECK(r.exit_code != 0);

  std::string path = write_file("cli_eps.txt", kFeasible);
  CliRun bad = run_cli("solve " + path + " --epsilon 0");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("error:") != std::string::npos);
  std::remove(path.c_str());
}
