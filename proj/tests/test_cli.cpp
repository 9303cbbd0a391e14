// End-to-end tests of the CLI binary: dispatch, exit codes, determinism,
// report envelope. The binary path is injected by the build.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"

namespace {

using nlohmann::json;

const char* cli_path() { return ABPCAP_CLI_PATH; }

struct RunResult {
  int status = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/abpcap_cli_test_out.txt";
  const std::string cmd =
      std::string(cli_path()) + " " + args + " > " + out_path + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.status = WEXITSTATUS(rc);
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  res.stdout_text = ss.str();
  return res;
}

std::string write_scene(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/abpcap_scene_" + name + ".json";
  std::ofstream out(path);
  out << content;
  return path;
}

const char* kTwoPointScene = R"({
  "contacts": [
    {"point": [0.0, 1.0], "normal": [0.0, 1.0], "value": 0.0},
    {"point": [1.0, 0.0], "normal": [1.0, 0.0], "value": 0.0}
  ]
})";

}  // namespace

TEST_CASE("check-abp reproduces the two-point measure with status 0") {
  const std::string scene = write_scene("two_point", kTwoPointScene);
  const RunResult res =
      run_cli("check-abp --scene " + scene + " --lambda 0 --samples 0 --seed 1");
  REQUIRE(res.status == 0);
  const json report = json::parse(res.stdout_text);
  CHECK(report["measure"]["value"].get<double>() ==
        doctest::Approx(3 * 3.14159265358979323846 / 4).epsilon(1e-12));
  CHECK(report["margin"].get<double>() > 0.0);
  CHECK(report["status"] == 0);
  // Envelope fields.
  CHECK(report.contains("seed"));
  CHECK(report.contains("version"));
  CHECK(report.contains("input_hash"));
  CHECK(report.contains("tolerances"));
}

TEST_CASE("fuzz runs are byte-identical for a fixed seed") {
  const RunResult a = run_cli("fuzz --trials 120 --seed 7 --phi-grid 17");
  const RunResult b = run_cli("fuzz --trials 120 --seed 7 --phi-grid 17");
  REQUIRE(a.status == 0);
  CHECK(a.stdout_text == b.stdout_text);
  CHECK(!a.stdout_text.empty());
}

TEST_CASE("thread count does not change the fuzz report") {
  const RunResult serial = run_cli("fuzz --trials 60 --seed 13");
  const std::string out_path = "/tmp/abpcap_cli_test_out.txt";
  const std::string cmd = std::string("ABPCAP_THREADS=4 ") + cli_path() +
                          " fuzz --trials 60 --seed 13 > " + out_path +
                          " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(serial.stdout_text == ss.str());
}

TEST_CASE("malformed scenes exit with status 1") {
  const std::string bad1 = write_scene("bad_field", R"({
    "contacts": [{"point": [0, 1], "normal": [0, 1], "value": 0, "oops": 1}]
  })");
  CHECK(run_cli("check-abp --scene " + bad1 + " --lambda 0").status == 1);

  const std::string bad2 = write_scene("bad_json", "{nope");
  CHECK(run_cli("check-abp --scene " + bad2 + " --lambda 0").status == 1);

  CHECK(run_cli("check-abp --scene /tmp/definitely_missing_file.json").status == 1);
  CHECK(run_cli("frobnicate --scene " + bad2).status == 1);

  const std::string scene = write_scene("two_point", kTwoPointScene);
  CHECK(run_cli("check-abp --scene " + scene + " --tol-override nope=1").status == 1);
}

TEST_CASE("phi-scan writes the CSV with the documented columns") {
  const std::string scene = write_scene("two_point", kTwoPointScene);
  const std::string csv_path = "/tmp/abpcap_cli_scan.csv";
  const RunResult res = run_cli("phi-scan --scene " + scene +
                                " --lambda-grid 65 --out-csv " + csv_path);
  REQUIRE(res.status == 0);
  std::ifstream in(csv_path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,phi_K,phi_H,margin,crossing_count");
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 65);
}

TEST_CASE("partition command emits cells and an SVG") {
  const std::string scene = write_scene("two_point", kTwoPointScene);
  const std::string svg_path = "/tmp/abpcap_cli_cells.svg";
  const RunResult res =
      run_cli("partition --scene " + scene + " --out-svg " + svg_path);
  REQUIRE(res.status == 0);
  const json report = json::parse(res.stdout_text);
  CHECK(report["partition"]["cells"].size() == 2);
  std::ifstream in(svg_path);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("<svg", 0) == 0);
}

TEST_CASE("capillary command on a square droplet") {
  const std::string scene = write_scene("square_drop", R"({
    "obstacle": {"type": "polygon", "vertices": [[-50,-20],[50,-20],[50,0],[-50,0]]},
    "droplet": [[0,0],[1,0],[1,1],[0,1]],
    "lambda": 0.5
  })");
  const RunResult res = run_cli("capillary --scene " + scene);
  REQUIRE(res.status == 0);
  const json report = json::parse(res.stdout_text);
  CHECK(report["energy"]["energy"].get<double>() == doctest::Approx(2.5));
  CHECK(report["energy"]["margin"].get<double>() > 0.0);
}

TEST_CASE("neumann-chain command produces the chain block") {
  const std::string scene = write_scene("square_drop2", R"({
    "obstacle": {"type": "polygon", "vertices": [[-50,-20],[50,-20],[50,0],[-50,0]]},
    "droplet": [[-1,0],[1,0],[1,2],[-1,2]],
    "lambda": 0.0,
    "h": 0.15
  })");
  const RunResult res =
      run_cli("neumann-chain --scene " + scene + " --samples 20000 --seed 5");
  REQUIRE(res.status == 0);
  const json report = json::parse(res.stdout_text);
  CHECK(report["c"].get<double>() == doctest::Approx(1.5));  // 6 / 4
  CHECK(report["chain"]["lower_ok"].get<bool>());
  CHECK(report["chain"]["upper_ok"].get<bool>());
}
