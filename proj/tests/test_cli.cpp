#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bfscott/cli.hpp"

using namespace bfscott;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json call_json(std::vector<std::string> args) {
  args.insert(args.begin(), "--json");
  const Result r = call(args);
  INFO(r.err);
  REQUIRE((r.code == 0 || r.code == 1 || r.code == 2));
  return json::parse(r.out);
}

std::filesystem::path temp_file(const std::string& text) {
  static int counter = 0;
  const auto p = std::filesystem::temp_directory_path() /
                 ("bfscott_batch_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".txt");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("leq prints verdicts and exits by truth value", "[cli]") {
  auto r = call({"leq", "-n", "2", "eta_0 + 1_0 + sh(0,1)", "sh(0,1)"});
  CHECK(r.code == cli::kTrue);
  CHECK(r.out == "true\n");
  r = call({"leq", "-n", "2", "sh(0,1)", "eta_0 + 1_0 + sh(0,1)"});
  CHECK(r.code == cli::kFalse);
  CHECK(r.out == "false\n");
}

TEST_CASE("leq with cut descriptors", "[cli]") {
  const std::string L = "eta_0 + 1_0 + sh(0,1)";
  auto r = call({"leq", "-n", "2", L, L, "--left-cut", "0||", "--right-cut", "|*|"});
  CHECK(r.code == cli::kTrue);
  r = call({"leq", "-n", "2", L, L, "--left-cut", "|*|", "--right-cut", "0||"});
  CHECK(r.code == cli::kFalse);
  r = call({"equiv", "-n", "1", L, L, "--left-cut", "0||", "--right-cut", "|*|"});
  CHECK(r.code == cli::kTrue);
  r = call({"leq", L, L, "--left-cut", "0||"});
  CHECK(r.code == cli::kUsage);
  r = call({"leq", L, L, "--left-cut", "0|", "--right-cut", "|*|"});
  CHECK(r.code == cli::kUsage);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("descriptor/expression mismatch"));
}

TEST_CASE("json output carries the schema", "[cli][json]") {
  const json j = call_json({"leq", "-n", "1", "sh(0,1)", "eta_0"});
  CHECK(j["schema"] == cli::kSchema);
  CHECK(j["verb"] == "leq");
  CHECK(j["verdict"] == "true");
  CHECK(j["rank"] == 1);
}

TEST_CASE("certificates print as trees or json", "[cli][certificate]") {
  auto r = call({"leq", "-n", "2", "sh(0,1)", "eta_0 + 1_0 + sh(0,1)", "--certificate"});
  CHECK(r.code == cli::kFalse);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("refutation <0||>"));
  const json j = call_json({"leq", "-n", "2", "eta_0 + 1_0 + sh(0,1)", "sh(0,1)", "--certificate"});
  REQUIRE(j.contains("certificate"));
  CHECK(j["certificate"]["intervals"].size() == 1);
  CHECK(j["certificate"]["intervals"][0]["holds"] == true);
  CHECK_FALSE(j["certificate"]["intervals"][0]["replies"].empty());
}

TEST_CASE("parse errors exit with the usage code", "[cli][errors]") {
  auto r = call({"leq", "eta_0 * eta_1", "eta_0"});
  CHECK(r.code == cli::kUsage);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("outside supported block algebra"));
  r = call({"leq", "eta_0 +", "eta_0"});
  CHECK(r.code == cli::kUsage);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("parse error at byte"));
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"frobnicate"}).code == cli::kUsage);
  CHECK(call({"leq", "-n", "x", "eta_0", "eta_0"}).code == cli::kUsage);
  CHECK(call({"--help"}).code == cli::kTrue);
}

TEST_CASE("classes, rank and complexity", "[cli]") {
  auto r = call({"classes", "-n", "2", "sh(0,1,2)"});
  CHECK(r.code == cli::kTrue);
  CHECK_THAT(r.out, Catch::Matchers::StartsWith("3 classes"));
  json j = call_json({"complexity", "eta_0 + 1_0 + sh(0,1)"});
  CHECK(j["complexity"] == "Sigma 3");
  CHECK(j["report"]["sr_lower"] == 3);
  CHECK(j["report"]["srp_upper"] == 1);
  CHECK(call({"complexity", "[0,1]"}).code == cli::kUsage);
  j = call_json({"complexity", "1_0 + 1_1"});
  CHECK(j["complexity"] == "d-Sigma 1");
  r = call({"rank", "eta_0 + 1_0 + sh(0,1)"});
  CHECK(r.code == cli::kTrue);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("SR   in [3, 3]"));
  // bounds too small to pin the rank
  r = call({"complexity", "--n-max", "2", "eta_0 + 1_0 + sh(0,1)"});
  CHECK(r.code == cli::kInconclusive);
  CHECK_THAT(r.out, Catch::Matchers::StartsWith("unknown"));
}

TEST_CASE("cover2 and emit", "[cli]") {
  auto r = call({"cover2", "omega[;1,0]"});
  CHECK(r.code == cli::kTrue);
  CHECK(r.out == "sh(0,1)\ne <=_2 cover: true\n");
  r = call({"emit", "[0,1]"});
  CHECK(r.code == cli::kTrue);
  CHECK_THAT(r.out, Catch::Matchers::StartsWith("(and (exists x0"));
  const json j = call_json({"emit", "--shuffle", "[0,1]"});
  CHECK(j["formulas"].size() == 6);
  for (const auto& f : j["formulas"]) CHECK(f["pi"] <= 2);
  CHECK(call({"emit", "--shuffle", "[]"}).code == cli::kUsage);
}

TEST_CASE("oracle and enumerate", "[cli]") {
  auto r = call({"oracle", "leq", "-n", "1", "[0,0,0]", "[0,0]"});
  CHECK(r.code == cli::kTrue);
  r = call({"oracle", "equiv", "-n", "1", "[0,0,0]", "[0,0]"});
  CHECK(r.code == cli::kFalse);
  r = call({"oracle", "leq", "-n", "2", "[0,1]", "[0,1]", "--left-tuple", "[0]", "--right-tuple", "[1]"});
  CHECK(r.code == cli::kFalse);
  r = call({"oracle", "leq", "-n", "1", "[0,1]", "[0,1]", "--left-tuple", "[0]"});
  CHECK(r.code == cli::kUsage);
  r = call({"oracle", "leq", "-n", "1", "[0]", "[0]", "--certificate"});
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("holds [0][] <=_1 [0][]"));
  CHECK(call({"oracle", "maybe", "[0]", "[0]"}).code == cli::kUsage);
  r = call({"enumerate", "--max-size", "2", "--max-colors", "2"});
  CHECK(r.out == "[]\n[0]\n[1]\n[0,0]\n[0,1]\n[1,0]\n[1,1]\n");
}

TEST_CASE("batch runs one command per line", "[cli][batch]") {
  const auto ok = temp_file(
      "# facts\n"
      "leq -n 1 \"sh(0,1)\" \"eta_0 + 1_0 + sh(0,1)\"\n"
      "\n"
      "bfscott leq -n 2 \"sh(0,1)\" \"eta_0 + 1_0 + sh(0,1)\"\n");
  auto r = call({"batch", ok.string()});
  CHECK(r.code == cli::kTrue);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("line 2 exit 0: true"));
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("line 4 exit 1: false"));

  const json j = call_json({"batch", ok.string()});
  REQUIRE(j["results"].size() == 2);
  CHECK(j["results"][0]["result"]["verdict"] == "true");
  CHECK(j["results"][1]["exit"] == 1);

  const auto bad = temp_file("leq eta_0\nleq \"eta_0\n");
  r = call({"batch", bad.string()});
  CHECK(r.code == cli::kUsage);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("unterminated quote"));

  CHECK(call({"batch", "/nonexistent/batch.txt"}).code == cli::kUsage);
  std::filesystem::remove(ok);
  std::filesystem::remove(bad);
}

TEST_CASE("stats and global bounds", "[cli]") {
  auto r = call({"--stats", "--horizon-mult", "2", "leq", "-n", "3", "omega[;1,0] + omega[;1,0]", "omega[;1,0]"});
  CHECK(r.code == cli::kTrue);
  CHECK_THAT(r.err, Catch::Matchers::StartsWith("memo: hits="));
  const json j = call_json({"--stats", "leq", "eta_0", "eta_0"});
  CHECK(j.contains("stats"));
}
