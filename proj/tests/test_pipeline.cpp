#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "autostruct/pipeline.hpp"

using namespace autostruct;
namespace fs = std::filesystem;

namespace {
  fs::path scratch(std::string const& name) {
    auto p = fs::temp_directory_path() / ("autostruct-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }

  std::string read(fs::path const& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  RunConfig config(std::string input, fs::path const& out) {
    RunConfig cfg;
    cfg.input        = std::move(input);
    cfg.out_dir      = out.string();
    cfg.command_line = {"autostruct", "auto", cfg.input};
    return cfg;
  }

  int cli(std::string const& args) {
    auto rc = std::system((std::string(AUTOSTRUCT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  }
}  // namespace

TEST_CASE("artifact names", "[pipeline]") {
  CHECK(artifact_name("fib 5") == "fib5");
  CHECK(artifact_name("groups/z2.pres") == "z2");
}

TEST_CASE("fib 5 end to end", "[pipeline]") {
  auto out = scratch("fib5");
  REQUIRE(run_pipeline(config("fib 5", out)) == kExitOk);
  for (auto ext : {".pres", ".rules", ".wdiff", ".wa", ".mult", ".diff", ".minrules", ".log",
                   ".ckpt"}) {
    CHECK(fs::exists(out / (std::string("fib5") + ext)));
  }
  auto log = read(out / "fib5.log");
  CHECK(log.rfind("# autostruct autostruct auto fib 5", 0) == 0);
  CHECK(log.find("\npass=1 rules=") != std::string::npos);
  CHECK(log.find("\npass=1 wdiffs=") != std::string::npos);
  CHECK(log.substr(log.size() - 14) == "verified=true\n");

  auto q = load_structure(out.string());
  CHECK(q.verified);
  CHECK(group_order(q) == Count{big_int(11)});
  CHECK(cli("size " + out.string()) == kExitOk);

  // resuming a finished run does nothing
  auto before = read(out / "fib5.log");
  CHECK(resume(out.string(), config("", out)) == kExitOk);
  CHECK(read(out / "fib5.log") == before);
}

TEST_CASE("malformed input", "[pipeline]") {
  auto out = scratch("bad");
  auto in  = out / "broken.pres";
  std::ofstream(in) << "generators: a A\nrelation: a q = a\n";
  auto dir = out / "artifacts";
  CHECK(run_pipeline(config(in.string(), dir)) == kExitParse);
  CHECK_FALSE(fs::exists(dir));
  CHECK(cli("auto " + in.string() + " --out " + dir.string()) == kExitParse);
  CHECK(cli("auto fib 1 --out " + dir.string()) == kExitParse);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("resume from the pass checkpoint", "[pipeline]") {
  auto out = scratch("resume");
  REQUIRE(run_pipeline(config("fib 4", out)) == kExitOk);
  auto ck = nlohmann::json::parse(read(out / "fib4.ckpt"));
  CHECK(ck["stage"] == "done");

  // rewind to the state written before the first pass: drop the final
  // artifacts from the checkpoint and mark the stage
  ck["stage"]  = "pass";
  ck["passes"] = nlohmann::json::array();
  for (auto f : {"fib4.wa", "fib4.mult", "fib4.diff", "fib4.minrules"}) {
    ck["files"].erase(f);
  }
  std::ofstream(out / "fib4.ckpt") << ck.dump(2) << '\n';
  CHECK(resume(out.string(), config("fib 4", out)) == kExitOk);
  auto log = read(out / "fib4.log");
  CHECK(log.find("# resumed at pass") != std::string::npos);
  // completion is not rerun: one kb line from the first run only
  std::size_t kb_lines = 0;
  for (std::size_t p = 0; (p = log.find(" eqns=", p)) != std::string::npos; ++p) {
    ++kb_lines;
  }
  CHECK(kb_lines == 1);
  CHECK(nlohmann::json::parse(read(out / "fib4.ckpt"))["stage"] == "done");
}

TEST_CASE("checkpoint validation", "[pipeline]") {
  auto out = scratch("corrupt");
  REQUIRE(run_pipeline(config("fib 3", out)) == kExitOk);
  CHECK(resume(out.string(), config("fib 4", out)) == kExitCorrupt);
  CHECK(cli("resume " + out.string() + " --input 'fib 4'") == kExitCorrupt);

  std::ofstream(out / "fib3.rules", std::ios::app) << "a1 a1 a1 -> a1\n";
  CHECK(resume(out.string(), config("", out)) == kExitCorrupt);
  CHECK(cli("size " + out.string()) == kExitCorrupt);

  std::ofstream(out / "fib3.ckpt") << "{ not json";
  CHECK(resume(out.string(), config("", out)) == kExitCorrupt);

  auto empty = scratch("empty");
  CHECK(resume(empty.string(), config("", empty)) == kExitCorrupt);
}

TEST_CASE("stage commands", "[pipeline]") {
  auto out = scratch("stages");
  REQUIRE(cli("kb fib 5 --out " + out.string()) == kExitOk);
  auto prefix = (out / "fib5").string();
  CHECK(read(out / "fib5.log").rfind("pass=1 rules=", 0) == 0);
  CHECK(cli("wa " + prefix) == kExitOk);
  CHECK(cli("mult " + prefix) == kExitOk);
  CHECK(cli("check " + prefix) == kExitOk);
  CHECK(cli("axioms " + prefix) == kExitOk);
  // no checkpoint, so queries refuse
  CHECK(cli("size " + prefix) == kExitCorrupt);
}

TEST_CASE("temporary directory comes from the environment", "[pipeline]") {
  auto out = scratch("tmpenv");
  auto tmp = out / "tmp";
  ::setenv("AUTOSTRUCT_TMPDIR", tmp.string().c_str(), 1);
  CHECK(run_pipeline(config("fib 3", out / "run")) == kExitOk);
  ::unsetenv("AUTOSTRUCT_TMPDIR");
  REQUIRE(fs::exists(tmp));
  CHECK(fs::is_empty(tmp));
}
