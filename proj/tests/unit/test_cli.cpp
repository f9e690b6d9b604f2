#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eisbfd/cli.hpp"
#include "eisbfd/error.hpp"

using namespace eisbfd;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("parse_c accepts decimals, fractions and the optimal keyword") {
  CHECK(cli::parse_c("optimal") == -4.0 / 13);
  CHECK(cli::parse_c("-4/13") == -4.0 / 13);
  CHECK(cli::parse_c("0.25") == 0.25);
  CHECK(cli::parse_c("-1") == -1.0);
  CHECK_THROWS_AS(cli::parse_c("abc"), Error);
  CHECK_THROWS_AS(cli::parse_c("1/0"), Error);
  CHECK_THROWS_AS(cli::parse_c("0.5x"), Error);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"solve1d", "--n", "2"}).code == cli::kExitUsage);
  CHECK(invoke({"solve1d", "--c", "2"}).code == cli::kExitUsage);
  CHECK(invoke({"solve1d", "--case", "nonexistent"}).code == cli::kExitUsage);
  CHECK(invoke({"solve2d", "--case", "dirichlet1d"}).code == cli::kExitUsage);
  CHECK(invoke({"solve1d", "--filter", "median"}).code == cli::kExitUsage);
  CHECK(invoke({"filter", "--kind", "interp1", "--in", "/nonexistent.csv"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitSuccess);
}

TEST_CASE("a step above the stability bound exits with code 1 and a suggestion") {
  const Outcome o = invoke({"solve1d", "--n", "24", "--dt", "0.01"});
  CHECK(o.code == cli::kExitFailure);
  CHECK(o.err.find("try --dt") != std::string::npos);
}

TEST_CASE("solve1d prints a summary and writes the solution file") {
  const auto dir = scratch_dir("eisbfd_cli_solve");
  const Outcome o = invoke({"solve1d", "--n", "12", "--t-final", "0.05", "--filter", "interp2", "--out", dir.string()});
  REQUIRE(o.code == cli::kExitSuccess);
  CHECK(o.out.rfind("case,N,h,c,filter,dt,steps,err_l2,err_linf,raw_err_l2,raw_err_linf\n", 0) == 0);
  CHECK(o.out.find("dirichlet1d,12,") != std::string::npos);
  std::ifstream file(dir / "solution.csv");
  std::string header;
  std::getline(file, header);
  CHECK(header == "x,value,raw,exact,error");
  std::filesystem::remove_all(dir);
}

TEST_CASE("symbols, dg-check and stability-check succeed") {
  const Outcome sym = invoke({"symbols", "--n", "8"});
  CHECK(sym.code == cli::kExitSuccess);
  CHECK(line_count(sym.out) == 9);
  CHECK(invoke({"symbols", "--n", "7"}).code == cli::kExitUsage);
  const Outcome dg = invoke({"dg-check"});
  CHECK(dg.code == cli::kExitSuccess);
  CHECK(dg.out.find("FAIL") == std::string::npos);
  const Outcome st = invoke({"stability-check", "--c-samples", "21"});
  CHECK(st.code == cli::kExitSuccess);
  CHECK(st.out.find("FAIL") == std::string::npos);
  CHECK(invoke({"stability-check", "--c-samples", "1"}).code == cli::kExitUsage);
}

TEST_CASE("config files supply defaults that flags override") {
  const auto dir = scratch_dir("eisbfd_cli_config");
  const auto config = dir / "run.ini";
  std::ofstream(config) << "case = periodic1d\nn = 10\nt-final = 0.01\n";
  const Outcome a = invoke({"solve1d", "--config", config.string()});
  REQUIRE(a.code == cli::kExitSuccess);
  CHECK(a.out.find("periodic1d,10,") != std::string::npos);
  const Outcome b = invoke({"solve1d", "--config", config.string(), "--n", "12"});
  REQUIRE(b.code == cli::kExitSuccess);
  CHECK(b.out.find("periodic1d,12,") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence writes the table and the plot data") {
  const auto dir = scratch_dir("eisbfd_cli_conv");
  const Outcome o = invoke({"convergence", "--case", "periodic1d", "--n", "10,14,20", "--t-final", "0.01",
                            "--dt-control-tol", "0", "--out", dir.string()});
  REQUIRE(o.code == cli::kExitSuccess);
  CHECK(o.out.find("# slope_fit=") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "convergence.csv"));
  CHECK(std::filesystem::exists(dir / "convergence_plot.csv"));
  CHECK(invoke({"convergence", "--n", "10,14"}).code == cli::kExitUsage);
  std::filesystem::remove_all(dir);
}

TEST_CASE("filter round-trips a solution file") {
  const auto dir = scratch_dir("eisbfd_cli_filter");
  REQUIRE(invoke({"solve", "--case", "periodic1d", "--n", "10", "--t-final", "0.01", "--out", dir.string()}).code ==
          cli::kExitSuccess);
  const auto filtered = dir / "filtered.csv";
  const Outcome o = invoke({"filter", "--kind", "spectral", "--in", (dir / "solution.csv").string(), "--out",
                            filtered.string()});
  CHECK(o.code == cli::kExitSuccess);
  std::ifstream file(filtered);
  std::string header;
  std::getline(file, header);
  CHECK(header == "x,value");
  std::size_t rows = 0;
  for (std::string line; std::getline(file, line);) ++rows;
  CHECK(rows == 20);
  std::filesystem::remove_all(dir);
}
