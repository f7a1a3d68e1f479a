#include <doctest.h>

#include "algclosure/commands.hpp"
#include "algclosure/scenario.hpp"

using namespace algclosure;

TEST_CASE("groups, sets and subgroups resolve") {
  auto s = Scenario::parse(R"(
version = 1
[groups.P]
kind = "countable-copies"
component = "S3"
[sets.B]
group = "Z"
builtin = "positives"
where = [{coordinate = 1, max = 10}, {coordinate = 1, odd = true}]
[sets.F]
group = "C6"
elements = ["1", "5"]
[subgroups.front]
group = "P"
where = [{support_within = [1, 2]}]
)");
  auto b = s.set("B");
  CHECK(b.contains(IntegerGroup::of(7)));
  CHECK(!b.contains(IntegerGroup::of(8)));
  CHECK(!b.contains(IntegerGroup::of(11)));
  CHECK(s.set("F").elements().size() == 2);
  auto front = s.subgroup("front");
  const auto& p = dynamic_cast<const RestrictedProduct&>(front.ambient());
  CHECK(front.contains(p.make({{2, FiniteGroup::element(1)}})));
  CHECK(!front.contains(p.make({{3, FiniteGroup::element(1)}})));
  CHECK(s.subgroup("whole:Z").is_whole_group());
  CHECK(s.digest().size() == 64);
}

TEST_CASE("malformed scenarios are input errors") {
  CHECK_THROWS_AS(Scenario::parse("version = 2\n"), ScenarioError);
  CHECK_THROWS_AS(Scenario::parse("version = 1\n[engine]\nstate_cap = -1\n"), ScenarioError);
  CHECK_THROWS_AS(Scenario::parse("version = 1\n[sets.A]\ngroup = \"Z\"\nbuiltin = \"nope\"\n").set("A"),
                  ScenarioError);
  CHECK_THROWS_AS(Scenario::parse("version = 1\n[subgroups.H]\ngroup = \"Z\"\nwhere = [{coordinate = 1, odd = true}]\n")
                      .subgroup("H"),
                  std::invalid_argument);
  CHECK_THROWS(Scenario::parse("version = "));
}

TEST_CASE("digest is sha256 of the bytes") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("closure command") {
  auto s = Scenario::parse("version = 1\n[sets.A]\ngroup = \"C6\"\nelements = [\"1\", \"2\"]\n[closure]\ngroup = \"C6\"\nset = \"A\"\n");
  CommandOptions o;
  o.recheck = true;
  auto r = run_closure(s, o);
  CHECK(r.exit_code == exit_ok);
  CHECK(r.report["result"]["closure"] == nlohmann::ordered_json::array({"1", "2"}));
  CHECK(r.report["recheck"]["ok"].get<bool>());
  auto text = render_report(r, false);
  CHECK(text.find("\"timing\"") == std::string::npos);
  CHECK(render_report(r, true).find("\"timing\"") != std::string::npos);
}

TEST_CASE("identity in the set is an input error") {
  CommandOptions o;
  auto s = Scenario::parse("version = 1\n[sets.A]\ngroup = \"Z\"\nelements = [0, 3]\n[construct]\nset = \"A\"\n");
  CHECK_THROWS_AS(run_construct(s, o), GroupError);
}

TEST_CASE("verify needs q within the truncation") {
  auto s = Scenario::parse(
      "version = 1\n[sets.A]\ngroup = \"Z\"\nbuiltin = \"positives\"\n[construct]\nset = \"A\"\n"
      "[verify]\np = [0]\nq = [4]\ntruncation = 3\n");
  CommandOptions o;
  CHECK_THROWS_AS(run_verify(s, o), ScenarioError);
}
