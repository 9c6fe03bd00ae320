// End-to-end checks of the command-line driver: every subcommand is run
// against the bundled examples (and small generated inputs), and exit
// codes, text output and JSON output are verified.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "probgkat/rat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using probgkat::Rat;
using probgkat::rat_from_string;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(PROBGKAT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  int status = ::pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string ex(const std::string& name) {
  return (fs::path(PROBGKAT_EXAMPLES_DIR) / name).string();
}

// Scratch directory for inputs generated by the tests themselves.
const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "probgkat_cli_scratch";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  CHECK(run_cli("--help").code == 0);
  CHECK(contains(run_cli("--help").out, "equiv"));
  CHECK(run_cli("").code == 2);               // a subcommand is required
  CHECK(run_cli("frobnicate").code == 2);     // unknown subcommand
  CHECK(run_cli("equiv onlyone.pk").code == 2);
  CHECK(run_cli("equiv a.pk b.pk c.pk").code == 2);
}

TEST_CASE("cli: missing and malformed files exit with code 2") {
  CliResult missing = run_cli("automaton /nonexistent/nope.pk");
  CHECK(missing.code == 2);
  CHECK(contains(missing.out, "error:"));
  std::string bad = write_scratch("garbage.pk", "actions p;\np +{1/2");
  CliResult parse = run_cli("automaton " + bad);
  CHECK(parse.code == 2);
  CHECK(contains(parse.out, "error:"));
}

TEST_CASE("cli: atoms enumerates truth assignments") {
  std::string prog =
      write_scratch("two_tests.pk", "tests a, b;\nactions p;\np\n");
  CliResult r = run_cli("atoms " + prog);
  CHECK(r.code == 0);
  CHECK(r.out == "-\nb\na\na,b\n");
  CliResult j = run_cli("atoms --json " + prog);
  CHECK(j.code == 0);
  json parsed = json::parse(j.out);
  CHECK(parsed.is_array());
  CHECK(parsed.size() == 4);
}

TEST_CASE("cli: equiv accepts the two die implementations") {
  CliResult r =
      run_cli("equiv " + ex("die_direct.pk") + " " + ex("die_knuthyao.pk"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "bisimilar"));
  CHECK_FALSE(contains(r.out, "not bisimilar"));

  CliResult j = run_cli("equiv --json " + ex("die_direct.pk") + " " +
                        ex("die_knuthyao.pk"));
  CHECK(j.code == 0);
  json parsed = json::parse(j.out);
  CHECK(parsed["bisimilar"] == true);
  CHECK(parsed["roots"].size() == 2);
  CHECK(parsed["partition"].contains("blocks"));
}

TEST_CASE("cli: equiv distinguishes different coin biases") {
  std::string a = write_scratch("coin13.pk", "actions p, q;\np +{1/3} q\n");
  std::string b = write_scratch("coin12.pk", "actions p, q;\np +{1/2} q\n");
  CliResult r = run_cli("equiv " + a + " " + b);
  CHECK(r.code == 1);
  CHECK(contains(r.out, "not bisimilar"));
  CHECK(run_cli("metric " + a + " " + b).out == "1\n");
  json d = json::parse(run_cli("metric --json " + a + " " + b).out);
  CHECK(d["distance"] == "1");
}

TEST_CASE("cli: metric is zero on equivalent programs and halves per step") {
  CliResult zero =
      run_cli("metric " + ex("die_direct.pk") + " " + ex("die_knuthyao.pk"));
  CHECK(zero.code == 0);
  CHECK(zero.out == "0\n");
  std::string pp = write_scratch("pp.pk", "actions p, q;\np ; p\n");
  std::string pq = write_scratch("pq.pk", "actions p, q;\np ; q\n");
  CHECK(run_cli("metric " + pp + " " + pq).out == "1/2\n");
}

TEST_CASE("cli: automaton reports the reachable states") {
  CliResult r = run_cli("automaton " + ex("die_knuthyao.pk"));
  CHECK(r.code == 0);
  // The coin-flip die loops back on itself: one state, atomless alphabet.
  CHECK(contains(r.out, "1 states, 1 atoms"));
  CHECK(contains(r.out, "return d1"));
  json j = json::parse(run_cli("automaton --json " + ex("die_knuthyao.pk")).out);
  CHECK(j["states"].size() == 1);
  CHECK(j["trans"].size() == 1);
  CliResult dot = run_cli("automaton --dot " + ex("die_knuthyao.pk"));
  CHECK(dot.code == 0);
  CHECK(contains(dot.out, "digraph"));
  CHECK(run_cli("automaton --dot --json " + ex("die_knuthyao.pk")).code == 2);
}

TEST_CASE("cli: derive prints one-step behaviour per atom") {
  CliResult r = run_cli("derive " + ex("die_direct.pk"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "1/3"));
  CHECK(contains(r.out, "return d1"));
  std::string loop = write_scratch("loop.pk", "tests a;\nactions p;\np*[a]\n");
  CliResult at = run_cli("derive --atom a " + loop);
  CHECK(at.code == 0);
  CHECK(contains(at.out, "p ->"));
  CliResult off = run_cli("derive --atom - " + loop);
  CHECK(off.code == 0);
  CHECK(contains(off.out, "accept"));
  CHECK(run_cli("derive --atom zz " + loop).code == 2);
}

TEST_CASE("cli: expand rewrites a program as its one-step unfolding") {
  CliResult r = run_cli("expand " + ex("die_direct.pk"));
  CHECK(r.code == 0);
  // The direct die is already in unfolded form, so expand reproduces it
  // (the printer omits parentheses the right-associative grammar implies).
  CHECK(r.out == "ret d1 +{1/3} ret d2 +{1/2} ret d3\n");
  json j = json::parse(run_cli("expand --json " + ex("die_direct.pk")).out);
  CHECK(j["expr"] == "ret d1 +{1/3} ret d2 +{1/2} ret d3");
}

TEST_CASE("cli: encode summarises the three-sorted graph") {
  CliResult r = run_cli("encode " + ex("die_knuthyao.pk"));
  CHECK(r.code == 0);
  CHECK(r.out ==
        "states 1\nintermediates 1\naction pairs 0\nnodes 2\nedges 1\n");
  json j = json::parse(run_cli("encode --json " + ex("die_knuthyao.pk")).out);
  CHECK(j["counts"]["nodes"] == 2);
  CHECK(j["nodes"].size() == 2);
  CHECK(j["edges"].size() == 1);
}

TEST_CASE("cli: minimize collapses bisimilar states") {
  // "p ; 1" and "1 ; p" reach textually different but bisimilar states.
  std::string prog =
      write_scratch("mergeable.pk", "actions p;\n(p ; 1) +{1/2} (1 ; p)\n");
  CliResult r = run_cli("minimize " + prog);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "2 classes of 3 states"));
  json j = json::parse(run_cli("minimize --json " + prog).out);
  CHECK(j["automaton"]["states"].size() == 2);
  CHECK(j["partition"]["blocks"].size() == 2);
}

TEST_CASE("cli: check-proof verifies the bundled die proof") {
  CliResult r = run_cli("check-proof " + ex("die_equivalence.proof"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "verified: 38 lines"));
  json j = json::parse(
      run_cli("check-proof --json " + ex("die_equivalence.proof")).out);
  CHECK(j["ok"] == true);
  CHECK(j["lines_checked"] == 38);
  // Every line also survives the semantic cross-check.
  CHECK(run_cli("check-proof --cross-check " + ex("die_equivalence.proof"))
            .code == 0);
}

TEST_CASE("cli: check-proof rejects a wrong script at the right line") {
  std::string bad = write_scratch("bad.proof",
                                  "actions p;\n1: p == 1 by refl\n");
  CliResult r = run_cli("check-proof " + bad);
  CHECK(r.code == 1);
  CHECK(contains(r.out, "rejected at line 1"));
  json j = json::parse(run_cli("check-proof --json " + bad).out);
  CHECK(j["ok"] == false);
  CHECK(j["failing_line"] == 1);
  std::string garbage = write_scratch("garbage.proof", "1: p == by refl\n");
  CHECK(run_cli("check-proof " + garbage).code == 2);
}

TEST_CASE("cli: check-solution accepts the bundled while-loop solution") {
  CliResult r = run_cli("check-solution " + ex("while_system.sys") + " " +
                        ex("while_solution.map"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "x1: ok"));
  CHECK(contains(r.out, "x2: ok"));
  CHECK(contains(r.out, "solution valid"));
  json j = json::parse(run_cli("check-solution --json " +
                               ex("while_system.sys") + " " +
                               ex("while_solution.map"))
                           .out);
  CHECK(j["ok"] == true);
  CHECK(j["vars"]["x1"] == true);
  CHECK(j["vars"]["x2"] == true);
}

TEST_CASE("cli: check-solution reports per-variable failures") {
  std::string bad = write_scratch(
      "bad.map",
      "tests t;\nactions p, q;\noutputs v;\n\nx1 = 1\nx2 = 1\n");
  CliResult r = run_cli("check-solution " + ex("while_system.sys") + " " + bad);
  CHECK(r.code == 1);
  CHECK(contains(r.out, "x1: FAIL"));
  CHECK(contains(r.out, "x2: ok"));
  CHECK(contains(r.out, "solution invalid"));

  std::string incomplete = write_scratch(
      "incomplete.map", "tests t;\nactions p, q;\noutputs v;\n\nx1 = 1\n");
  CliResult miss =
      run_cli("check-solution " + ex("while_system.sys") + " " + incomplete);
  CHECK(miss.code == 2);
  CHECK(contains(miss.out, "does not assign"));

  std::string wrong_alph =
      write_scratch("wrongalph.map", "actions p, q;\noutputs v;\n\nx1 = 1\n");
  CHECK(run_cli("check-solution " + ex("while_system.sys") + " " + wrong_alph)
            .code == 2);
}

TEST_CASE("cli: simulate reports exact run counts") {
  CliResult r =
      run_cli("simulate --n 300 --seed 5 --json " + ex("die_direct.pk"));
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  Rat total(0);
  for (const auto& [key, value] : j.items()) {
    (void)key;
    total += rat_from_string(value.get<std::string>());
  }
  CHECK(total == Rat(1));
  CHECK(j["timeout"] == "0/300");
  CHECK(j.contains("returned:d1"));
  CHECK(j.contains("returned:d2"));
  CHECK(j.contains("returned:d3"));

  CliResult text =
      run_cli("simulate --n 100 --seed 5 " + ex("die_direct.pk"));
  CHECK(text.code == 0);
  CHECK(contains(text.out, "returned:d1"));
  CHECK(contains(text.out, "/100"));
  CHECK(run_cli("simulate --policy nope " + ex("die_direct.pk")).code == 2);
}

TEST_CASE("cli: simulate --trace dumps individual runs") {
  std::string prog = write_scratch("step.pk", "actions p;\np\n");
  CliResult r = run_cli("simulate --n 2 --seed 1 --trace " + prog);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "run 0:"));
  CHECK(contains(r.out, "run 1:"));
  CHECK(contains(r.out, "-> accepted"));
  json j = json::parse(
      run_cli("simulate --n 2 --seed 1 --trace --json " + prog).out);
  CHECK(j["runs"].size() == 2);
  CHECK(j["runs"][0]["terminal"] == "accepted");
  CHECK(j["runs"][0]["trace"].size() == 1);
  CHECK(j["runs"][0]["trace"][0]["action"] == "p");
  CHECK(j["estimates"]["accepted"] == "2/2");
}
