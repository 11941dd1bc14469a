#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(FAIRLOT_CLI_PATH) + " " + args +
                    " > /dev/null 2> /dev/null";
  int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("fairlot_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("solve writes passing artifacts and exits zero") {
  TempDir dir("solve");
  int code = run_cli("solve " + testsup::fixture("two_linear.json") +
                     " --epsilon 0.25 --out " + dir.str());
  CHECK(code == 0);
  CHECK(fs::exists(dir.path / "flow.json"));
  CHECK(fs::exists(dir.path / "lottery.json"));
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"pass\": true") != std::string::npos);
  CHECK(report.find("ex-ante-envy-free") != std::string::npos);
}

TEST_CASE("solve artifacts are byte-identical across reruns") {
  TempDir a("rerun_a"), b("rerun_b");
  std::string args = "solve " + testsup::fixture("mixed_fig_pair.json") +
                     " --epsilon 0.125 --objective leximin --out ";
  REQUIRE(run_cli(args + a.str()) == 0);
  REQUIRE(run_cli(args + b.str()) == 0);
  for (const char* name : {"flow.json", "lottery.json", "report.json"})
    CHECK(slurp(a.path / name) == slurp(b.path / name));
}

TEST_CASE("solve can dump the assembled LP") {
  TempDir dir("dump");
  int code = run_cli("solve " + testsup::fixture("two_linear.json") +
                     " --epsilon 0.5 --dump-lp --out " + dir.str());
  CHECK(code == 0);
  std::string mps = slurp(dir.path / "lp.mps");
  CHECK(mps.find("ROWS") != std::string::npos);
  CHECK(mps.find("ENDATA") != std::string::npos);
}

TEST_CASE("naive-solve flags the underdelivering relaxation") {
  TempDir dir("naive");
  int code = run_cli("naive-solve " + testsup::fixture("half_full.json") +
                     " --epsilon 0.5 --out " + dir.str());
  CHECK(code == 2);
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"pass\": false") != std::string::npos);
  CHECK(report.find("derandomizable") != std::string::npos);
  CHECK(fs::exists(dir.path / "naive.json"));
}

TEST_CASE("naive-solve passes when the relaxation is honest") {
  TempDir dir("naive_ok");
  int code = run_cli("naive-solve " + testsup::fixture("two_linear.json") +
                     " --epsilon 0.5 --out " + dir.str());
  CHECK(code == 0);
}

TEST_CASE("exact rsd reports the envy it cannot avoid") {
  TempDir dir("rsd");
  int code = run_cli("rsd " + testsup::fixture("linear_capped.json") +
                     " --exact --out " + dir.str());
  CHECK(code == 2);
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"pass\": false") != std::string::npos);
  CHECK(fs::exists(dir.path / "lottery.json"));
}

TEST_CASE("sampled rsd is reproducible for a fixed seed") {
  TempDir a("rsd_a"), b("rsd_b");
  std::string args = "rsd " + testsup::fixture("concave_pair.json") +
                     " --samples 64 --seed 7 --out ";
  run_cli(args + a.str());
  run_cli(args + b.str());
  CHECK(slurp(a.path / "lottery.json") == slurp(b.path / "lottery.json"));
}

TEST_CASE("verify accepts what solve produced") {
  TempDir dir("verify");
  REQUIRE(run_cli("solve " + testsup::fixture("concave_pair.json") +
                  " --epsilon 0.25 --out " + dir.str()) == 0);
  int code = run_cli("verify " + testsup::fixture("concave_pair.json") + " " +
                     (dir.path / "lottery.json").string() +
                     " --epsilon 0.25 --out " + dir.str());
  CHECK(code == 0);
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"command\": \"verify\"") != std::string::npos);
}

TEST_CASE("verify rejects a lottery that breaks the fairness gate") {
  TempDir dir("verify_bad");
  std::ofstream out(dir.path / "skewed.json");
  out << "{\"support\": [{\"probability\": 1.0, \"allocation\": "
         "[[1.0],[0.0]]}]}\n";
  out.close();
  int code = run_cli("verify " + testsup::fixture("two_linear.json") + " " +
                     (dir.path / "skewed.json").string() + " --out " +
                     dir.str());
  CHECK(code == 2);
}

TEST_CASE("frontier writes the tables plus one lottery per direction") {
  TempDir dir("frontier");
  int code = run_cli("frontier " + testsup::fixture("power_pair.json") +
                     " --epsilon 0.25 --directions 3 --fairness none --out " +
                     dir.str());
  CHECK(code == 0);
  CHECK(fs::exists(dir.path / "frontier.csv"));
  CHECK(fs::exists(dir.path / "outcomes.csv"));
  CHECK(fs::exists(dir.path / "frontier_000.json"));
  CHECK(fs::exists(dir.path / "frontier_002.json"));
  std::string csv = slurp(dir.path / "frontier.csv");
  CHECK(csv.rfind("w1,w2,u1,u2,welfare,lottery\n", 0) == 0);
}

TEST_CASE("adversary-audit defeats its own solver run end to end") {
  TempDir dir("audit");
  int code = run_cli("adversary-audit --out " + dir.str());
  CHECK(code == 2);  // the audited lottery must lose somewhere
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"defeated\": true") != std::string::npos);
  for (const char* name : {"instance_i1.json", "instance_i2.json",
                           "instance_i3.json", "lottery.json"})
    CHECK(fs::exists(dir.path / name));
  // The forged instance files are exactly what serialize_instance emits,
  // so a parse + re-serialize is a fixed point.
  std::string i2 = slurp(dir.path / "instance_i2.json");
  fairlot::Instance parsed = fairlot::parse_instance_text(i2, "i2");
  CHECK(fairlot::serialize_instance(parsed) == i2);
}

TEST_CASE("usage errors exit one, help exits zero") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("solve --help") == 0);
  CHECK(run_cli("definitely-not-a-command") == 1);
  CHECK(run_cli("solve") == 1);  // missing instance
  CHECK(run_cli("solve /nonexistent/instance.json") == 1);
  CHECK(run_cli("solve " + testsup::fixture("two_linear.json") +
                " --epsilon 0.3") == 1);  // 1/epsilon not integral
  CHECK(run_cli("rsd " + testsup::fixture("two_linear.json") +
                " --exact --samples 5") == 1);
}
