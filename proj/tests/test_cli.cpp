#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mvlsim::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(MVL_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("sim prints output values") {
  const auto r = cli({"sim", "-n", data("and3.nl"), "-v", "a=2,b=-1,c=inf"});
  CHECK(r.code == mvlsim::kExitOk);
  CHECK(r.out == "f = -1\n");
}

TEST_CASE("ternary-sim accepts positional and named vectors") {
  CHECK(cli({"ternary-sim", "-n", data("and3.nl"), "-v", "T,X,T"}).out == "f = X\n");
  CHECK(cli({"ternary-sim", "-n", data("and3.nl"), "-v", "a=T,c=F,b=X"}).out == "f = F\n");
}

TEST_CASE("abstract output is maximal and reproducible") {
  const auto a = cli({"abstract", "-n", data("and3.nl"), "--seed", "9"});
  const auto b = cli({"abstract", "-n", data("and3.nl"), "--seed", "9"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["config"]["seed"] == 9);
  const std::string av = j["valuation"];
  CHECK(cli({"check-maximal", "-n", data("and3.nl"), "-a", av}).code == mvlsim::kExitOk);
}

TEST_CASE("check-maximal reports violations with exit 1") {
  const auto r = cli({"check-maximal", "-n", data("and3.nl"), "-a", "T,X,T"});
  CHECK(r.code == mvlsim::kExitFinding);
  CHECK(nlohmann::json::parse(r.out)["status"] == "not-abstraction-consistent");
}

TEST_CASE("equiv finds the bug and agrees with the oracle") {
  const auto bug = cli({"equiv", data("or_xor_a.nl"), data("or_xor_bug.nl"), "--seed", "1"});
  CHECK(bug.code == mvlsim::kExitFinding);
  CHECK(nlohmann::json::parse(bug.out)["outcome"] == "counterexample");
  CHECK(cli({"oracle-equiv", data("or_xor_a.nl"), data("or_xor_bug.nl")}).code == mvlsim::kExitFinding);

  const auto same = cli({"equiv", data("or_xor_a.nl"), data("or_xor_b.nl"), "--seed", "1", "--budget", "200"});
  CHECK(same.code == mvlsim::kExitOk);
  CHECK(cli({"oracle-equiv", data("or_xor_a.nl"), data("or_xor_b.nl")}).code == mvlsim::kExitOk);
}

TEST_CASE("equiv output does not depend on worker count") {
  const auto one = cli({"equiv", data("or_xor_a.nl"), data("or_xor_b.nl"), "--seed", "4", "--budget", "300", "-j", "1"});
  const auto four = cli({"equiv", data("or_xor_a.nl"), data("or_xor_b.nl"), "--seed", "4", "--budget", "300", "-j", "4"});
  CHECK(one.out == four.out);
}

TEST_CASE("MVLSIM_SEED is the seed fallback") {
  setenv("MVLSIM_SEED", "9", 1);
  const auto env = cli({"abstract", "-n", data("and3.nl")});
  unsetenv("MVLSIM_SEED");
  CHECK(env.out == cli({"abstract", "-n", data("and3.nl"), "--seed", "9"}).out);
}

TEST_CASE("dnf forms") {
  CHECK(cli({"dnf", "-n", data("or_xor_a.nl"), "--form", "bcf"}).out == "a~b + ~ab\n");
  CHECK(cli({"dnf", "-n", data("or_xor_a.nl"), "--form", "bcf", "--negate"}).out == "ab + ~a~b\n");
  const auto d = cli({"dnf", "-n", data("or_xor_a.nl")});
  CHECK(d.code == 0);
  CHECK(d.out.find("a~a") != std::string::npos);
}

TEST_CASE("complexity json") {
  const auto j = nlohmann::json::parse(cli({"complexity", "-n", data("or_xor_a.nl")}).out);
  CHECK(j["c_f"] == 4);
  CHECK(j["c_s"] == 4);
  CHECK(j["contradictions"].size() == 2);
}

TEST_CASE("gen-vectors with a control input") {
  const auto r = cli({"gen-vectors", "-n", data("and3.nl"), "--control", "a"});
  CHECK(r.code == 0);
  CHECK(r.out.find("T,T,T -> T   m: inf,1,1") != std::string::npos);
}

TEST_CASE("seq-run and seq-init") {
  const auto run = cli({"seq-run", "-n", data("shift2.nl"), "--cycles", "4", "--stimulus", data("shift2.csv")});
  REQUIRE(run.code == 0);
  const auto j = nlohmann::json::parse(run.out);
  CHECK(j["rows"].size() == 4);
  CHECK(j["initialization"]["length"] == 2);

  const auto init = nlohmann::json::parse(cli({"seq-init", "-n", data("shift2.nl"), "--seed", "3"}).out);
  CHECK(init["length"] == 2);
  CHECK(init["agree"] == true);
}

TEST_CASE("stimulus underrun is an error") {
  const auto r = cli({"seq-run", "-n", data("shift2.nl"), "--cycles", "9", "--stimulus", data("shift2.csv")});
  CHECK(r.code == mvlsim::kExitUsage);
  CHECK(!r.err.empty());
}

TEST_CASE("mutate writes a parsable netlist") {
  const auto r = cli({"mutate", "-n", data("and3.nl"), "--kind", "redundant_tautology", "--var", "b"});
  CHECK(r.code == 0);
  CHECK(r.out.find("b | ~b") != std::string::npos);
  CHECK(cli({"mutate", "-n", data("and3.nl"), "--kind", "conjunctive_bug"}).code == mvlsim::kExitUsage);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(cli({}).code == mvlsim::kExitUsage);
  CHECK(cli({"sim", "-n", data("and3.nl")}).code == mvlsim::kExitUsage);
  const auto missing = cli({"sim", "-n", "no-such.nl", "-v", "a=1"});
  CHECK(missing.code == mvlsim::kExitUsage);
  CHECK(missing.err.find("no-such.nl") != std::string::npos);
  CHECK(cli({"sim", "-n", data("and3.nl"), "-v", "a=1,b=2"}).code == mvlsim::kExitUsage);
  CHECK(cli({"--help"}).code == mvlsim::kExitOk);
}
