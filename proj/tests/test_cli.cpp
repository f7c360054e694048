#include <catch_amalgamated.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  std::string out_file = std::string(std::tmpnam(nullptr)) + ".out";
  std::string cmd = std::string(CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  std::remove(out_file.c_str());
  return r;
}

std::string write_temp(const std::string& content) {
  std::string path = std::string(std::tmpnam(nullptr)) + ".json";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("range reports intervals and rejects bad input") {
  RunResult r = run("range --d 5 --s 3");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["lower"].get<double>() == Catch::Approx(std::log(2.0)));
  REQUIRE(j["upper"].get<double>() == Catch::Approx(std::log(3.0)));

  REQUIRE(run("range --d 1 --s 1").exit_code == 2);
  REQUIRE(run("range --d 6 --s 2").exit_code == 2);
}

TEST_CASE("construct output is deterministic and passes verify") {
  RunResult a = run("construct bernoulli --d 3 --s 2 --beta 'log(3/2)'");
  RunResult b = run("construct bernoulli --d 3 --s 2 --beta 'log(3/2)'");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.stdout_text == b.stdout_text);

  auto j = nlohmann::json::parse(a.stdout_text);
  REQUIRE(j["pExact"] == "1/2");
  std::string measure = write_temp(a.stdout_text);
  std::string params = write_temp(j["params"].dump());
  RunResult v = run("verify --measure " + measure + " --params " + params +
                    " --depth 6");
  REQUIRE(v.exit_code == 0);
  auto vj = nlohmann::json::parse(v.stdout_text);
  REQUIRE(vj["pf1Residual"].get<double>() == 0.0);
  REQUIRE(vj["pf4Residual"].get<double>() < 1e-12);
  std::remove(measure.c_str());
  std::remove(params.c_str());
}

TEST_CASE("periodic construction reports the forced temperature") {
  RunResult r = run("construct periodic --word 01 --d 3 --s 2");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["forcedBetaValue"].get<double>() ==
          Catch::Approx(0.5 * std::log(2.0)));
  REQUIRE(j["q"] == "1/2");
}

TEST_CASE("toeplitz construction reports a small tv defect") {
  RunResult r = run("construct toeplitz --k 3,3,3 --n 2");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["n"] == 9);
  REQUIRE(j["tvDefect"].get<double>() <= 1.0);
}

TEST_CASE("toeplitz identities subcommand") {
  RunResult r = run("toeplitz --k 3,3,3,3,3,3 --n 4");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["identitiesHold"] == true);
  REQUIRE(j["l"] == 81);
  REQUIRE(j["cAtL"] == "1/2");
}

TEST_CASE("classify consumes a datum file") {
  std::string datum = write_temp(R"({
    "params": {"d": 4, "s": 3, "beta": {"kind": "logOf", "value": "2"}},
    "family": {"kind": "gicar"}
  })");
  RunResult r = run("classify --datum " + datum);
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["type"] == "III_lambda");
  REQUIRE(j["lambdaExact"] == "1/2");
  std::remove(datum.c_str());
}

TEST_CASE("tail consumes a matrix file and honors exact entries") {
  std::string matrix = write_temp(R"({
    "rows": [["0", "1", "0"], ["0", "0", "1"], ["1", "0", "0"]]
  })");
  RunResult r = run("tail --matrix " + matrix);
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["tailDim"] == 3);
  REQUIRE(j["poissonDim"] == 1);
  REQUIRE(j["arithmeticMode"] == "exact");
  std::remove(matrix.c_str());

  std::string bad = write_temp(R"({"rows": [[0.5, 0.6], [0.5, 0.5]]})");
  REQUIRE(run("tail --matrix " + bad).exit_code == 2);
  std::remove(bad.c_str());
}

TEST_CASE("cocycle subcommand evaluates, scans, and solves") {
  std::string seq = write_temp(R"({"kind": "thueMorse"})");
  RunResult r = run("cocycle --seq " + seq + " --q 1/2 --n 8");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.stdout_text);
  REQUIRE(j["value"] == "0");

  RunResult s = run("cocycle --seq " + seq + " --q 1/2 --scan 1024");
  auto js = nlohmann::json::parse(s.stdout_text);
  // Even prefixes of thue-morse are exactly balanced, so c only reaches +-1/2.
  REQUIRE(js["min"] == "-1/2");
  REQUIRE(js["max"] == "1/2");

  RunResult t = run("cocycle --seq " + seq + " --q 1/2 --transfer 4 --seed 3");
  auto jt = nlohmann::json::parse(t.stdout_text);
  REQUIRE(jt["transferExact"] == true);
  REQUIRE(jt["transferResidual"].get<double>() == 0.0);
  std::remove(seq.c_str());
}
