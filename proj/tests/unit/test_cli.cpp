#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include "semground/json_io.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using semground::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string q(const std::string& s) {
  std::string r = "'";
  for (char c : s) r += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return r + "'";
}

Result cli(const std::string& args, const std::string& stdin_text = "") {
  const std::string cmd = (stdin_text.empty() ? std::string() : "printf " + q(stdin_text) + " | ") +
                          q(SEMGROUND_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string d(const std::string& rel) { return q(oracle::data(rel)); }

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("semground_cli_" + std::to_string(getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator()(const std::string& name) const { return (path / name).string(); }
};

const std::string kFix = " --fixtures " + d("fixtures");
const char* kCredit = "'The credit decision should not change for applicants younger than 50.'";

}  // namespace

TEST_CASE("stage commands compose to the same result as run") {
  TempDir t;
  const std::string in = " --input " + d("inputs/applicant_001.json");
  const std::string net = " --net " + d("nets/credit_net.json");

  REQUIRE(cli(std::string("run ") + kCredit + in + net + kFix + " --yes --report-out " + q(t("report.json"))).code ==
          1);
  REQUIRE(cli(std::string("parse ") + kCredit + " --domain tabular" + kFix + " --out " + q(t("parse.json"))).code ==
          0);
  REQUIRE(cli("ground --parse " + q(t("parse.json")) + in + kFix + " --out " + q(t("ground.json"))).code == 0);
  REQUIRE(cli("genspec --parse " + q(t("parse.json")) + " --grounding " + q(t("ground.json")) + in + net + " --out " +
              q(t("spec.json")))
              .code == 0);
  const auto v = cli("verify --spec " + q(t("spec.json")) + net + " --out " + q(t("verdict.json")));
  CHECK(v.code == 1);
  CHECK(v.out.find("UNSAFE") != std::string::npos);

  const auto report = oracle::load(t("report.json"));
  auto parsed = oracle::load(t("parse.json"));
  parsed.erase("latency");
  auto rparse = report["parse"];
  rparse.erase("latency");
  CHECK(parsed == rparse);
  CHECK(oracle::load(t("ground.json")) == report["grounding"]);
  CHECK(oracle::load(t("spec.json")) == report["grounded_spec"]);
  auto verdict = oracle::load(t("verdict.json"));
  auto rverdict = report["verdict"];
  for (auto* j : {&verdict, &rverdict}) j->erase("wall_time");
  CHECK(verdict == rverdict);

  // verify also takes the run report itself
  CHECK(cli("verify --spec " + q(t("report.json")) + net).code == 1);
}

TEST_CASE("exit codes follow the verdict or the failure") {
  const std::string net = " --net " + d("nets/credit_net.json");
  CHECK(cli("run 'Could I get the loan if I had fewer dependents?' --input " + d("inputs/applicant_001.json") + net +
            kFix + " --yes")
            .code == 0);
  CHECK(cli("run 'Is the bird recognized if the wings are blurry?' --input " + d("inputs/bird_0001.json") +
            " --net " + d("nets/bird_net.json") + kFix + " --yes")
            .code == 3);
  CHECK(cli("run").code == 4);
  CHECK(cli("frobnicate").code == 4);
  CHECK(cli(std::string("run ") + kCredit + " --input /nonexistent.json" + net + kFix + " --yes").code == 4);
  CHECK(cli(std::string("run ") + kCredit + " --input " + d("inputs/applicant_001.json") + net + kFix +
            " --yes --tightness sloppy")
            .code == 4);
}

TEST_CASE("a stage failure still writes a report") {
  TempDir t;
  CHECK(cli("run 'Is the bird recognized if the wings are blurry?' --input " + d("inputs/bird_0001.json") +
            " --net " + d("nets/bird_net.json") + kFix + " --yes --report-out " + q(t("r.json")))
            .code == 3);
  const auto r = oracle::load(t("r.json"));
  CHECK(r["error"]["stage"] == "grounding");
  CHECK(r["error"]["code"] == "NoDetections");
}

TEST_CASE("terminal approval from stdin") {
  const std::string args = std::string("run ") + kCredit + " --input " + d("inputs/applicant_001.json") +
                           " --net " + d("nets/credit_net.json") + kFix;
  CHECK(cli(args, "n\n").code == 2);
  CHECK(cli(args, "y\n").code == 1);
}

TEST_CASE("vnnlib export matches the golden files") {
  TempDir t;
  for (const auto& [name, net] : std::vector<std::pair<std::string, std::string>>{
           {"toy_degenerate", "toy_net"}, {"credit_age", "credit_net"}, {"siren_amplify", "audio_net"}}) {
    CAPTURE(name);
    const auto out = t(name + ".vnnlib");
    CHECK(cli("verify --spec " + d("golden/" + name + ".spec.json") + " --net " + d("nets/" + net + ".json") +
              " --export-vnnlib " + q(out))
              .code == 0);
    CHECK(oracle::slurp(out) == oracle::slurp(oracle::data("golden/" + name + ".vnnlib")));
  }
}

TEST_CASE("eval commands print tables and write reports") {
  TempDir t;
  auto r = cli("eval-parse " + d("fixtures/parse_eval.json") + " --parser rules" + kFix + " --report-out " +
               q(t("p.json")));
  CHECK(r.code == 0);
  CHECK(r.out.find("Acc. (object)") != std::string::npos);
  const auto p = oracle::load(t("p.json"));
  CHECK(p["eval"] == "parse");
  CHECK(p["runs"].size() == 2);

  r = cli("eval-detect " + d("fixtures/detect_eval.json") + kFix + " --report-out " + q(t("d.json")));
  CHECK(r.code == 0);
  CHECK(r.out.find("loose") != std::string::npos);
  CHECK(oracle::load(t("d.json"))["metrics"]["any_successes"] == 17);
}
