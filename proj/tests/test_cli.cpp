#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(ALGCLOSURE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scenario(const char* name) { return std::string(SCENARIO_DIR) + "/" + name; }

fs::path scratch() {
  auto dir = fs::temp_directory_path() / ("algclosure-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("reports are deterministic without timing") {
  const auto args = "construct --scenario " + scenario("z_positives.toml") + " --stages 2 --no-timing";
  auto a = cli(args), b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["tool"] == "algclosure");
  CHECK(j["command"] == "construct");
  CHECK(!j.contains("timing"));
  CHECK(nlohmann::json::parse(cli("construct --scenario " + scenario("z_positives.toml") + " --stages 1").out)
            .contains("timing"));
}

TEST_CASE("resume continues a saved construction") {
  auto dir = scratch();
  const auto snap = (dir / "stage2.json").string();
  auto first = cli("construct --scenario " + scenario("z_positives.toml") + " --stages 2 --no-timing --snapshot-out " + snap);
  REQUIRE(first.code == 0);
  REQUIRE(fs::exists(snap));
  auto resumed = nlohmann::json::parse(
      cli("construct --scenario " + scenario("z_positives.toml") + " --stages 3 --no-timing --resume " + snap).out);
  auto straight = nlohmann::json::parse(
      cli("construct --scenario " + scenario("z_positives.toml") + " --stages 3 --no-timing").out);
  CHECK(resumed["result"]["resumed_from_stage"] == 2);
  resumed["result"].erase("resumed_from_stage");
  CHECK(resumed["result"] == straight["result"]);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(cli("refute --scenario " + scenario("z_two_four.toml") + " --recheck").code == 0);
  CHECK(cli("closure --scenario " + scenario("c6_closure.toml") + " --recheck").code == 0);
  CHECK(cli("supernormal --scenario " + scenario("s3_supernormal.toml")).code == 0);
  CHECK(cli("construct --scenario " + scenario("z_positives.toml") + " --budget 10").code == 2);
  CHECK(cli("construct --scenario /nonexistent/file.toml").code == 4);
  CHECK(cli("bogus").code == 4);

  auto dir = scratch();
  const auto bad = (dir / "bad.toml").string();
  std::ofstream(bad) << "version = \n";
  auto r = cli("closure --scenario " + bad);
  CHECK(r.code == 4);
  CHECK(nlohmann::json::parse(r.out)["outcome"] == "input-error");
  const auto closed = (dir / "closed.toml").string();
  std::ofstream(closed) << "version = 1\n[sets.A]\ngroup = \"Z\"\nelements = [0]\n[construct]\nset = \"A\"\n";
  CHECK(cli("construct --scenario " + closed).code == 4);
  fs::remove_all(dir);
}

TEST_CASE("report file output") {
  auto dir = scratch();
  const auto out = (dir / "report.json").string();
  auto r = cli("closure --scenario " + scenario("c6_closure.toml") + " --no-timing --out " + out);
  CHECK(r.code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(nlohmann::json::parse(ss.str())["result"]["closure"].size() == 2);
  fs::remove_all(dir);
}
