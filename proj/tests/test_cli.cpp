#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "fixtures.hpp"

using mixext::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("solve") {
  const Outcome mp = call({"solve", fixtures::data_file("matching_pennies.game")});
  CHECK(mp.code == 0);
  CHECK(contains(mp.out, "equilibria: 1"));
  CHECK(contains(mp.out, "jacobian regular"));

  const Outcome bos = call({"--exact", "solve", fixtures::data_file("battle_of_sexes.game")});
  CHECK(bos.code == 0);
  CHECK(contains(bos.out, "equilibria: 3"));
  CHECK(contains(bos.out, "2/3 1/3"));

  const Outcome zero = call({"solve", fixtures::data_file("zero.game")});
  CHECK(zero.code == 2);
  CHECK(contains(zero.out, "non-generic: continuum detected"));

  CHECK(call({"solve", "/nonexistent.game"}).code == 1);
  CHECK(call({"--exact", "solve", fixtures::data_file("three_player.game")}).code == 1);
  CHECK(call({"solve"}).code == 1);
  CHECK(call({"bogus"}).code == 1);
}

TEST_CASE("solve rejects malformed files") {
  const std::string path = "cli_bad.game";
  std::ofstream(path) << "players 2\nstrategies 2 2\npayoff 1\n1 2 3\n";
  const Outcome r = call({"solve", path});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "line"));
}

TEST_CASE("solve json report") {
  const Outcome r = call({"--json", "--exact", "solve", fixtures::data_file("battle_of_sexes.game")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("meta"));
  CHECK(j.contains("warnings"));
  CHECK(j["results"]["count"] == 3);
  CHECK(j["results"]["equilibria"][1]["point"][0][0] == "2/3");
}

TEST_CASE("lambda") {
  const Outcome r = call({"lambda", fixtures::data_file("matching_pennies.game"), "--player", "1"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "kappa: const 1, g2_1 -2"));
  CHECK(contains(r.out, "lambda_1: const -2, g2_1 4"));

  const Outcome z = call({"lambda", fixtures::data_file("zero.game"), "--player", "2"});
  CHECK(contains(z.out, "kappa: const 0, g1_1 0"));
  CHECK(contains(z.out, "lambda_1: const 0, g1_1 0"));

  CHECK(call({"lambda", fixtures::data_file("matching_pennies.game"), "--player", "3"}).code == 1);
}

TEST_CASE("goodcheck") {
  CHECK(call({"goodcheck", "--r", "1:0-1,1-2"}).out == "good\n");
  const Outcome bad = call({"goodcheck", "--r", "1:0-1,0-2,1-2"});
  CHECK(bad.code == 0);
  CHECK(contains(bad.out, "not good"));
  CHECK(contains(bad.out, "(0,1,2)"));
  CHECK(call({"goodcheck"}).out == "good\n");
  CHECK(call({"goodcheck", "--r", "1:0+1"}).code == 1);
  CHECK(call({"goodcheck", "--r", "1:0-3", "--shape", "3x2"}).code == 1);
}

TEST_CASE("sample") {
  const Outcome r = call({"--json", "--seed", "7", "sample", "2x2", "--count", "100"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"]["oddness_rate"].get<double>() >= 0.98);

  const Outcome one = call({"--json", "--seed", "7", "sample", "2x2", "--count", "1"});
  const auto k = nlohmann::json::parse(one.out);
  CHECK(k["results"]["games"][0] == j["results"]["games"][0]);
  CHECK(call({"sample", "1x2"}).code == 1);
}

TEST_CASE("certify") {
  const std::string mp = fixtures::data_file("matching_pennies.game");
  const Outcome reg = call({"certify", mp, "--point", "1/2,1/2;1/2,1/2"});
  CHECK(reg.code == 0);
  CHECK(contains(reg.out, "verdict: transversal (regular)"));

  const Outcome dup =
      call({"certify", fixtures::data_file("duplicate_row.game"), "--point", "0.5,0.5;0.5,0.5"});
  CHECK(dup.code == 2);
  CHECK(contains(dup.out, "degenerate"));

  const Outcome off = call({"certify", mp, "--point", "0.3,0.7;0.2,0.8"});
  CHECK(off.code == 0);
  CHECK(contains(off.out, "0 of 2"));

  const Outcome excluded = call({"certify", mp, "--point", "0.3,0.7;0.2,0.8", "--t", "1:1", "--chart", "1,0"});
  CHECK(excluded.code == 1);
  CHECK(contains(excluded.err, "excludes"));
  CHECK(call({"certify", mp, "--point", "0.3,0.7"}).code == 1);
}

TEST_CASE("certify consumes solve output") {
  const std::string bos = fixtures::data_file("battle_of_sexes.game");
  const Outcome solved = call({"--json", "solve", bos});
  const std::string path = "cli_solve.json";
  std::ofstream(path) << solved.out;
  for (const char* index : {"0", "1", "2"}) {
    const Outcome r = call({"certify", bos, "--from-json", path, "--index", index});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "(regular)"));
  }
  CHECK(call({"certify", bos, "--from-json", path, "--index", "3"}).code == 1);
}

TEST_CASE("charts") {
  const Outcome r = call({"charts", "2x3"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "6 charts"));
  CHECK(contains(r.out, "chart 1,2  complement: C:1:1 C:2:2"));
}
