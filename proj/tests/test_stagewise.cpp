#include <doctest.h>

#include "algclosure/stagewise.hpp"
#include "oracles.hpp"

using namespace algclosure;

namespace {

GroupHandle integers() { return std::make_shared<IntegerGroup>(); }

Construction z_positives() {
  auto z = integers();
  return Construction(SubgroupSpec(z), SetSpec::filtered(z, [](const Element& e) { return e[0] >= 1; }, "positives"));
}

}  // namespace

TEST_CASE("initial state") {
  auto c = z_positives();
  CHECK(c.stage() == 0);
  CHECK(c.a(0) == IntegerGroup::of(0));
  CHECK(c.a(1) == IntegerGroup::of(1));
  CHECK(c.transfer_check(1).holds);

  auto z = integers();
  CHECK_THROWS_AS(Construction(SubgroupSpec(z), SetSpec::from_elements(z, {IntegerGroup::of(0)})), GroupError);
  auto c1 = catalog_group("C1");
  CHECK_THROWS_AS(Construction(SubgroupSpec(c1), SetSpec::from_elements(c1, {})), GroupError);
}

TEST_CASE("first stage on the integers") {
  auto c = z_positives();
  auto w = c.membership_B(1, IntegerGroup::of(2));
  CHECK(w.member);
  REQUIRE(w.witness);
  CHECK(format_mf(*w.witness) == "#1 #1 #2^-1");
  CHECK(!c.membership_B(1, IntegerGroup::of(0)).member);
  CHECK(!c.membership_B(1, IntegerGroup::of(5)).member);
  for (std::int64_t x = 1; x <= 4; ++x) CHECK(c.membership_B(1, IntegerGroup::of(x)).member);

  REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  CHECK(c.x(1) == IntegerGroup::of(5));
  CHECK(c.a(2) == IntegerGroup::of(5));
}

TEST_CASE("paired and abelian searches agree") {
  IntegerGroup z;
  std::vector<Element> fixed{IntegerGroup::of(1), IntegerGroup::of(5), IntegerGroup::of(-1)};
  AbelianSeparator ab(z, fixed, 8, 1'000'000);
  for (std::int64_t x = -12; x <= 12; ++x) {
    auto p = paired_search(z, fixed, IntegerGroup::of(x), 8, 5'000'000);
    auto a = ab.test(IntegerGroup::of(x));
    CHECK(p.member == a.member);
    CHECK(p.witness == a.witness);
    CHECK(p.member == oracle::integer_separation({1, 5, -1}, x, 8));
  }
}

TEST_CASE("transfer check catches a mutated state") {
  IntegerGroup z;
  std::vector<Element> a{IntegerGroup::of(1)};
  std::vector<Element> x{IntegerGroup::of(1)};  // x_1 := a_1
  auto t = check_transfer(z, a, x, 2, 1'000'000);
  CHECK(!t.holds);
  REQUIRE(t.violation);
  std::vector<Element> args{a[0], x[0]};
  CHECK(evaluate_mf(*t.violation, z, args) == z.identity());
  std::vector<Element> at_one{a[0], z.identity()};
  CHECK(!(evaluate_mf(*t.violation, z, at_one) == z.identity()));
  CHECK(format_mf(*t.violation) == "#1 #2^-1");
}

TEST_CASE("numbering") {
  auto c = z_positives();
  REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  auto m1 = c.materialize(1);
  REQUIRE(m1.size() == 1);
  CHECK(m1[0].second == IntegerGroup::of(0));
  auto m2 = c.materialize(2);
  CHECK(m2[1].second == c.a(1));

  // replay: position j+1 holds x_j, and positions are distinct and increasing
  auto m = c.materialize(40);
  std::set<Element> seen;
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(seen.insert(m[i].second).second);
    if (i > 0) CHECK(m[i - 1].first < m[i].first);
    CHECK(c.position_of(m[i].second) == m[i].first);
  }
  for (std::uint32_t j = 1; j <= 2; ++j) {
    const auto& rec = c.records()[j - 1];
    CHECK(c.position_of(c.x(j)).has_value());
    if (rec.placement != Placement::already_occupied) CHECK(c.numbered(j + 1) == c.x(j));
  }
  CHECK(c.numbered(2) == IntegerGroup::of(5));
}

TEST_CASE("snapshots round trip") {
  auto c = z_positives();
  for (int j = 0; j < 2; ++j) REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  auto snap = c.snapshot();
  auto z = c.subgroup();
  auto r = Construction::resume(c.subgroup(), c.set(), c.policy(), snap);
  CHECK(r.snapshot() == snap);
  REQUIRE(std::holds_alternative<StageRecord>(r.advance()));
  REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  CHECK(r.snapshot() == c.snapshot());
}

TEST_CASE("finite sets are refuted") {
  auto z = integers();
  Construction c(SubgroupSpec(z), SetSpec::from_elements(z, {IntegerGroup::of(2), IntegerGroup::of(4)}));
  std::optional<ClosureRefutation> ref;
  for (int j = 0; j < 4 && !ref; ++j) {
    auto out = c.advance();
    if (auto* r = std::get_if<ClosureRefutation>(&out)) ref = *r;
  }
  REQUIRE(ref);
  CHECK(verify_refutation(*z, *ref, c.set()));
  auto bad = *ref;
  bad.functions.front() = parse_mf("#1 #1^-1", bad.functions.front().arity());
  CHECK(!verify_refutation(*z, bad, c.set()));
}

TEST_CASE("basis vectors of a countable power") {
  auto c2 = catalog_group("C2");
  auto g = RestrictedProduct::countable_copies(c2);
  auto basis = SetSpec::filtered(g, [g](const Element& e) { return g->support(e).size() == 1; }, "basis");
  Construction c(SubgroupSpec(g), basis);
  CHECK(c.a(1) == g->make({{1, c2->parse(c2->name(1))}}));
}

TEST_CASE("inconclusive on a scan budget") {
  auto z = integers();
  StagePolicy p;
  p.scan_budget = 3;
  Construction c(SubgroupSpec(z), SetSpec::filtered(z, [](const Element& e) { return e[0] >= 1; }, "positives"), p);
  auto out = c.advance();
  CHECK(std::holds_alternative<Inconclusive>(out));
}
