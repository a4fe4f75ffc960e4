#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fputw_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" FPUTW_CLI "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(std::stod(f));
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("mono-scan writes one row per kappa") {
    const auto dir = scratch("scan");
    REQUIRE(run_cli("--out " + dir.string() + " --mesh 128 mono-scan --from 0.5 --to 2.5 --step 0.25") == 0);
    const auto rows = lines(dir / "mono_scan.csv");
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].rfind("kappa,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(fields(rows[i])[0] == doctest::Approx(0.5 + 0.25 * (i - 1)));

    std::ifstream mf(dir / "manifest.json");
    REQUIRE(mf.good());
    const auto manifest = nlohmann::json::parse(mf);
    CHECK(manifest.contains("status"));
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-command") == 2);
    const auto dir = scratch("usage");
    CHECK(run_cli("--out " + dir.string() + " jost") == 2);
    CHECK(run_cli("--out " + dir.string() + " simulate --kappa 1 --dt 0.01") == 2);
  }

  TEST_CASE("FPUTW_OUT overrides --out") {
    const auto ignored = scratch("ignored");
    const auto chosen = scratch("env");
    REQUIRE(run_cli("--out " + ignored.string() + " --mesh 64 jost --kappa 1", "FPUTW_OUT=" + chosen.string()) == 0);
    CHECK(fs::exists(chosen / "jost.csv"));
    CHECK(fs::exists(chosen / "manifest.json"));
    CHECK_FALSE(fs::exists(ignored / "jost.csv"));
  }

  TEST_CASE("simulate reports a zero loss at the baseline time") {
    const auto dir = scratch("sim");
    REQUIRE(run_cli("--out " + dir.string() + " --mesh 128 simulate --kappa 1 --T 100") == 0);
    const auto rows = lines(dir / "diagnostics.csv");
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == "t,E_full,E_core,Gamma_core,A_out,shift_total,alarm");
    const auto last = fields(rows.back());
    CHECK(last[0] == doctest::Approx(100.0));
    CHECK(last[3] == 0.0);
    CHECK(last[6] == 0.0);
  }

  TEST_CASE("identical inputs give identical outputs") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    REQUIRE(run_cli("--out " + a.string() + " --mesh 64 jost --kappa 0.5") == 0);
    REQUIRE(run_cli("--out " + b.string() + " --mesh 64 jost --kappa 0.5") == 0);
    CHECK(lines(a / "jost.csv") == lines(b / "jost.csv"));
  }
}
