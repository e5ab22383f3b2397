#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string scratch(const std::string& name) {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "relaynet_cli_tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& cli_args) {
  const std::string out_path = scratch("stdout.tmp");
  const std::string cmd = std::string(RELAYNET_CLI_PATH) + " " + cli_args + " > " + out_path +
                          " 2> " + scratch("stderr.tmp");
  const int status = std::system(cmd.c_str());
  std::ifstream f(out_path);
  std::stringstream ss;
  ss << f.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

const char* kLineConfig =
    "n_relays = 2\n"
    "theta = 4\n"
    "snr_db = 10\n"
    "coherent = true\n";

}  // namespace

TEST_CASE("eval defaults to the direct link") {
  write_file(scratch("topo.cfg"), std::string(kLineConfig) + "positions = 0, 0.25, 0.75, 1\n");
  const auto res = run("--command eval --config " + scratch("topo.cfg"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("total_rate_bits = 3.4594") != std::string::npos);
  CHECK(res.output.find("feasible = true") != std::string::npos);
}

TEST_CASE("eval honors an explicit allocation file") {
  write_file(scratch("topo.cfg"), std::string(kLineConfig) + "positions = 0, 0.25, 0.75, 1\n");
  write_file(scratch("alloc.cfg"),
             "levels = 1 2\n"
             "refine_1 = 2 3\n"
             "refine_2 = 3\n"
             "alpha_own 1 = 1.0\n");
  const auto res =
      run("--command eval --config " + scratch("topo.cfg") + " --alloc " + scratch("alloc.cfg"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("layer_rate_1") != std::string::npos);
  CHECK(res.output.find("total_rate_bits") != std::string::npos);
}

TEST_CASE("config errors exit with code one") {
  write_file(scratch("bad.cfg"), "n_relays = 2\nbogus_key = 3\n");
  CHECK(run("--command eval --config " + scratch("bad.cfg")).exit_code == 1);
  CHECK(run("--command eval --config " + scratch("does_not_exist.cfg")).exit_code == 1);
  write_file(scratch("topo.cfg"), std::string(kLineConfig) + "positions = 0, 0.25, 0.75, 1\n");
  CHECK(run("--command bogus --config " + scratch("topo.cfg")).exit_code == 1);
  CHECK(run("--command eval --config " + scratch("topo.cfg") + " --coherent --noncoherent")
            .exit_code == 1);
  // sweeps need the two-relay line geometry
  write_file(scratch("topo1.cfg"), "n_relays = 1\ntheta = 4\nsnr_db = 10\npositions = 0, 0.5, 1\n");
  CHECK(run("--command sweep --config " + scratch("topo1.cfg") + " --preset df").exit_code == 1);
}

TEST_CASE("optimize reports a machine readable block") {
  write_file(scratch("topo.cfg"), kLineConfig);
  const auto res = run("--command optimize --config " + scratch("topo.cfg") +
                       " --preset df --r -0.49 --budget 80000 --seed 3");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("preset = df") != std::string::npos);
  // the optimized value sits near the published curve endpoint
  const auto pos = res.output.find("rate_bits = ");
  REQUIRE(pos != std::string::npos);
  const double v = std::stod(res.output.substr(pos + 12));
  CHECK(v == doctest::Approx(2.5715).epsilon(0.02));
}

TEST_CASE("sweep emits a stable csv schema and is deterministic") {
  write_file(scratch("topo.cfg"), kLineConfig);
  const std::string common = "--command sweep --config " + scratch("topo.cfg") +
                             " --preset one_hop --preset df "
                             "--r-grid -0.27222:0.16333:2 --seed 11 --budget 15000 --out ";
  CHECK(run(common + scratch("sweep_a.csv")).exit_code == 0);
  const std::string a = read_file(scratch("sweep_a.csv"));
  CHECK(a.rfind("r,protocol,coherent,rate_bits,feasible,seed,status\n", 0) == 0);
  // one row per (r, preset) plus the header
  int lines = 0;
  for (char c : a)
    if (c == '\n') ++lines;
  CHECK(lines == 5);
  CHECK(a.find(",one_hop,1,3.4594") != std::string::npos);

  CHECK(run(common + scratch("sweep_b.csv")).exit_code == 0);
  CHECK(read_file(scratch("sweep_b.csv")) == a);  // byte identical

  // empty preset list gives a header-only file
  CHECK(run("--command sweep --config " + scratch("topo.cfg") + " --r-grid -0.2:0.2:2 --out " +
            scratch("sweep_c.csv"))
            .exit_code == 0);
  CHECK(read_file(scratch("sweep_c.csv")) ==
        "r,protocol,coherent,rate_bits,feasible,seed,status\n");
}

TEST_CASE("gnuplot dumps are two-column") {
  write_file(scratch("topo.cfg"), kLineConfig);
  const auto res = run("--command sweep --config " + scratch("topo.cfg") +
                       " --preset one_hop --r-grid -0.2:0.2:2 --budget 4000 --out " +
                       scratch("sweep_d.csv") + " --gnuplot-dir " + scratch(""));
  CHECK(res.exit_code == 0);
  const std::string dump = read_file(scratch("one_hop_coherent.dat"));
  std::istringstream ss(dump);
  double r, v;
  int rows = 0;
  while (ss >> r >> v) {
    CHECK(v == doctest::Approx(3.4594).epsilon(1e-3));
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("discrete command evaluates a pmf file") {
  // binary symmetric point-to-point table: the single bound is 1 - H2(0.11)
  write_file(scratch("pmf.txt"),
             "var U1 2\nvar Y1 2\n"
             "p U1=0 Y1=0 0.445\np U1=0 Y1=1 0.055\n"
             "p U1=1 Y1=0 0.055\np U1=1 Y1=1 0.445\n");
  const auto res = run("--command discrete --pmf " + scratch("pmf.txt"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("n_relays = 0") != std::string::npos);
  // 1 - H2(0.11) = 0.500084 by the entropy-table oracle
  CHECK(res.output.find("Rs1 = 0.500084") != std::string::npos);
}

TEST_CASE("verify runs the identity suite") {
  const auto res = run("--command verify --seed 4");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("verification passed") != std::string::npos);
  CHECK(res.output.find("FAIL") == std::string::npos);
  CHECK(res.output.find("pass scalar_link_mc") != std::string::npos);
  CHECK(res.output.find("pass negative_control") != std::string::npos);
}
