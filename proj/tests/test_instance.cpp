#include <fstream>

#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"

using namespace ts;
using namespace ts::test;

namespace {

nlohmann::json base() {
  return {{"schema", "tracesolve-instance/1"},
          {"mode", "monoid"},
          {"resources", {"r1", "r2"}},
          {"constants", {letter("a", "A", {"r1"}), letter("b", "B", {"r2"})}},
          {"variables", {variable("X")}},
          {"equation", {{"lhs", {"X", "a"}}, {"rhs", {"a", "X"}}}}};
}

// The message of the Error thrown by parsing `j`, or "" if it parses.
std::string error_of(const nlohmann::json& j) {
  try {
    parse_instance(j, "t.json");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& what) { return msg.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("a well-formed instance") {
  const Instance inst = parse_instance(base());
  CHECK(inst.mode == Mode::Monoid);
  CHECK(inst.k() == 1);
  const Sym a = inst.alphabet.find("a"), b = inst.alphabet.find("b");
  CHECK(inst.alphabet.table().bar(a) == inst.alphabet.find("A"));  // [TRIVIAL]
  CHECK(inst.alphabet.table().independent(a, b));                   // disjoint resources
  CHECK_FALSE(inst.alphabet.table().independent(a, a + 1));
  CHECK(inst.lhs == Word{inst.var_sym(0), a});
  CHECK(inst.symbol_name(inst.var_sym(0)) == "X");
}

TEST_CASE("loader errors name the field") {
  nlohmann::json j = base();
  j["schema"] = "other";
  CHECK(mentions(error_of(j), "schema"));

  j = base();
  j["mode"] = "ring";
  CHECK(mentions(error_of(j), "mode"));

  j = base();
  j["constants"][0]["rho"] = {"r9"};
  CHECK(mentions(error_of(j), "unknown resource 'r9'"));

  j = base();
  j["constants"][0]["rho"] = nlohmann::json::array();
  CHECK(mentions(error_of(j), "empty resource sets"));

  j = base();
  j["equation"]["lhs"] = {"X", "z"};
  CHECK(mentions(error_of(j), "unknown symbol 'z'"));

  j = base();
  j["equation"]["lhs"] = {"#"};
  CHECK(mentions(error_of(j), "marker"));

  j = base();
  j["variables"] = {variable("a")};
  CHECK(mentions(error_of(j), "already a letter"));

  j = base();
  j["mode"] = "group";
  j["constants"][0]["bar"] = "a";
  CHECK(mentions(error_of(j), "own inverse"));

  j = base();
  j.erase("equation");
  CHECK(mentions(error_of(j), "missing field 'equation'"));

  CHECK(error_of(base()).empty());
}

TEST_CASE("monoid validation") {
  nlohmann::json j = base();
  using A = nlohmann::json;
  j["monoid"] = {{"elements", A::array({"1", "x"})},
                 {"unit", "1"},
                 {"mult", A::array({A::array({"1", "x"}), A::array({"x", "x"})})},
                 {"inv", A::array({"1", "x"})},
                 {"images", A::object({{"a", "x"}, {"A", "x"}})}};
  CHECK(error_of(j).empty());

  // [TRIVIAL] the image of abar must be the involution of the image of a.
  j["monoid"]["images"]["A"] = "1";
  CHECK(mentions(error_of(j), "monoid.images"));

  // [TRIVIAL] the unit must be neutral.
  j["monoid"]["images"]["A"] = "x";
  j["monoid"]["unit"] = "x";
  CHECK(mentions(error_of(j), "monoid.unit"));

  // [TRIVIAL] mult must be a square table.
  j["monoid"]["unit"] = "1";
  j["monoid"]["mult"] = A::array({A::array({"1", "x"})});
  CHECK(mentions(error_of(j), "monoid.mult"));
}

TEST_CASE("load_instance reports unreadable files") {
  CHECK_THROWS_AS(load_instance("/nonexistent/t.json"), Error);
  const std::string tmp = "/tmp/tracesolve_bad_instance.json";
  std::ofstream(tmp) << "{ not json";
  std::string msg;
  try {
    load_instance(tmp);
  } catch (const Error& e) {
    msg = e.what();
  }
  CHECK(mentions(msg, "invalid JSON"));
}

TEST_CASE("format_word and parse_word") {
  const Instance inst = parse_instance(base());
  const Sym a = inst.alphabet.find("a"), b = inst.alphabet.find("b");
  CHECK(format_word(inst, {a, b, a + 1}) == "abA");  // [TRIVIAL]
  CHECK(format_word(inst, {}).empty());
  CHECK(parse_word(inst, "abA") == Word{a, b, a + 1});
  CHECK(parse_word(inst, nlohmann::json::array({"a", "B"})) == Word{a, b + 1});
  CHECK_THROWS_AS(parse_word(inst, "q"), Error);
  CHECK(format_tuple(inst, {{a}, {}}) == "(a, )");

  nlohmann::json j = base();
  j["constants"] = {letter("x1", "y1", {"r1"}), letter("x2", "y2", {"r2"})};
  j["equation"] = {{"lhs", {"X"}}, {"rhs", {"x1"}}};
  const Instance longer = parse_instance(j);
  const Word w{longer.alphabet.find("x1"), longer.alphabet.find("y2")};
  CHECK(format_word(longer, w) == "x1.y2");  // [TRIVIAL]
  CHECK(parse_word(longer, format_word(longer, w)) == w);
}

TEST_CASE("property: format and parse are inverse") {
  std::mt19937_64 rng(47);
  const Instance inst = parse_instance(base());
  const std::vector<Sym> ls{inst.alphabet.find("a"), inst.alphabet.find("A"), inst.alphabet.find("b"),
                            inst.alphabet.find("B")};
  for (int i = 0; i < 200; ++i) {
    const Word w = random_word(rng, ls, 8);
    CHECK(parse_word(inst, format_word(inst, w)) == w);
  }
}

TEST_CASE("an equation without variables") {
  nlohmann::json j = base();
  j["variables"] = nlohmann::json::array();
  j["equation"] = {{"lhs", {"a", "b"}}, {"rhs", {"b", "a"}}};
  const Instance yes = parse_instance(j);
  // [DERIVED] a and b commute, so the empty tuple is the only solution.
  CHECK(enumerate_bruteforce(yes, 2) == std::set<Tuple>{Tuple{}});
  SolveOptions opt;
  opt.bound = 2;
  const BuildResult b = build_nfa(yes, opt);
  CHECK(b.nfa.satisfiable());
  CHECK(nfa_solutions(b, 2) == std::set<Tuple>{Tuple{}});

  j["equation"] = {{"lhs", {"a", "A"}}, {"rhs", {"A", "a"}}};
  const Instance no = parse_instance(j);
  // [TRIVIAL] a and abar do not commute.
  CHECK(enumerate_bruteforce(no, 2).empty());
  CHECK_FALSE(build_nfa(no, opt).nfa.satisfiable());
}
