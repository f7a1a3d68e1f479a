#include <doctest.h>

#include <map>

#include "algclosure/seminorm.hpp"

using namespace algclosure;

namespace {

Construction z_instance(std::uint32_t stages) {
  auto z = std::make_shared<IntegerGroup>();
  Construction c(SubgroupSpec(z), SetSpec::filtered(z, [](const Element& e) { return e[0] >= 1; }, "positives"));
  for (std::uint32_t j = 0; j < stages; ++j) REQUIRE(std::holds_alternative<StageRecord>(c.advance()));
  return c;
}

// Best (weight, length, letter codes) over all letter sequences up to
// max_len, by exhaustive enumeration. Letter 2i is generator i, 2i+1 its
// inverse.
struct Best {
  Rational weight;
  std::vector<std::uint32_t> codes;
};

std::map<std::uint32_t, Best> brute_force(const FiniteGroup& g, const WeightedGeneratorSet& gens, std::size_t max_len) {
  std::vector<std::pair<std::uint32_t, Rational>> letters;
  for (const auto& gen : gens.generators) {
    const auto i = FiniteGroup::index_of(gen.element);
    letters.push_back({i, gen.weight});
    letters.push_back({g.inv(i), gen.weight});
  }
  std::map<std::uint32_t, Best> best;
  std::vector<std::uint32_t> codes;
  auto rec = [&](auto&& self, std::uint32_t at, Rational w) -> void {
    auto it = best.find(at);
    bool take = it == best.end();
    if (!take) {
      const auto& b = it->second;
      if (w != b.weight) take = w < b.weight;
      else if (codes.size() != b.codes.size()) take = codes.size() < b.codes.size();
      else take = codes < b.codes;
    }
    if (take) best[at] = {w, codes};
    if (codes.size() == max_len) return;
    for (std::uint32_t c = 0; c < letters.size(); ++c) {
      codes.push_back(c);
      self(self, g.mul(at, letters[c].first), w + letters[c].second);
      codes.pop_back();
    }
  };
  rec(rec, 0, Rational(0));
  return best;
}

}  // namespace

TEST_CASE("seminorm values and tie-break match brute force") {
  auto c7 = cyclic_group(7);
  auto el = [&](const char* n) { return c7->parse(n); };
  WeightedGeneratorSet gens;
  gens.generators = {{el("1"), Rational(1, 2), "g"}, {el("3"), Rational(1), "h"}};
  Seminorm n(c7, gens);
  auto brute = brute_force(*c7, gens, 7);
  for (std::uint32_t x = 0; x < 7; ++x) {
    auto v = n.value(FiniteGroup::element(x));
    REQUIRE(v.kind == SeminormValue::Kind::exact);
    CHECK(v.value == brute.at(x).weight);
    std::vector<std::uint32_t> codes;
    for (const auto& f : v.factorization) codes.push_back(2 * f.generator + (f.sign < 0 ? 1 : 0));
    CHECK(codes == brute.at(x).codes);
    CHECK(n.verify(FiniteGroup::element(x), v));
  }
}

TEST_CASE("unreachable elements are infinite and ceilings cap") {
  auto c6 = cyclic_group(6);
  WeightedGeneratorSet gens;
  gens.generators = {{c6->parse("2"), Rational(1), "g"}};
  Seminorm n(c6, gens);
  CHECK(n.value(c6->parse("1")).kind == SeminormValue::Kind::infinite);
  CHECK(n.value(c6->parse("4")).value == Rational(1));  // inverse of the generator
  CHECK(n.value(c6->parse("3")).kind == SeminormValue::Kind::infinite);
  SeminormOptions opts;
  opts.ceiling = Rational(1);
  Seminorm capped(c6, gens, opts);
  CHECK(capped.value(c6->parse("2")).kind == SeminormValue::Kind::capped);
  auto v = capped.value(c6->parse("4"));
  CHECK(v.kind == SeminormValue::Kind::capped);
  CHECK(v.value == Rational(1));
}

TEST_CASE("generator sets of the integer instance") {
  auto c = z_instance(3);
  auto gens = build_generators(c, 1, 3);
  CHECK(gens.weight_of(IntegerGroup::of(0)) == Rational(0));
  CHECK(gens.weight_of(c.a(1)) == Rational(1));
  CHECK(gens.weight_of(c.x(2)) == Rational(1, 2));
  CHECK_THROWS_AS(build_generators(c, 1, 4), GroupError);
  CHECK_THROWS_AS(build_generators(c, 0, 3), GroupError);
}

TEST_CASE("composite values and neighbourhoods") {
  auto c = z_instance(5);
  SeminormOptions opts;
  opts.ceiling = Rational(1);
  SeminormFamily f(c, 5, opts);
  SeminormSpec single{{0}, {2}, 5};
  for (const auto& [pos, x] : c.materialize(20)) {
    auto direct = f.base(2).value(x);
    auto comp = composite_value(f, single, x);
    CHECK(comp.total == direct.value);
  }
  CHECK(composite_value(f, single, c.group().identity()).total == Rational(0));
  CHECK(in_UN(f, single, c.group().identity()).certified);
  // a_j under N_j has value 1, which does not certify membership
  SeminormSpec boundary{{0}, {1}, 5};
  CHECK(!in_UN(f, boundary, c.a(1)).certified);

  SeminormSpec two{{0, 1}, {1, 2}, 5};
  auto m = in_UN(f, two, c.x(5));
  CHECK(m.certified);
  CHECK(m.value.total <= Rational(2, 5));
  SeminormSpec bad{{0}, {1}, 4};
  CHECK_THROWS_AS(composite_value(f, bad, c.x(1)), GroupError);
}

TEST_CASE("closure witnesses") {
  auto c = z_instance(3);
  auto w = closure_witness(c, SeminormSpec{{0}, {1}, 1});
  CHECK(w.s == 2);
  CHECK(w.bound == Rational(1, 2));
  CHECK(w.x == c.x(2));
  CHECK(w.certified);
  try {
    closure_witness(c, SeminormSpec{{0, 1, 2}, {1, 2, 3}, 3});
    FAIL("expected an error");
  } catch (const GroupError& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("axiom and filterbase checks") {
  auto c = z_instance(3);
  SeminormFamily f(c, 3);
  std::vector<Element> sample;
  for (const auto& [pos, x] : c.materialize(30)) sample.push_back(x);
  CHECK(check_seminorm_axioms(f.base(1), sample).ok);
  CHECK(filterbase_check(f, SeminormSpec{{0}, {1}, 3}, SeminormSpec{{1}, {2}, 3}, sample).ok);
  CHECK(concatenate(SeminormSpec{{0}, {1}, 3}, SeminormSpec{{2}, {3}, 3}).describe() ==
        SeminormSpec{{0, 2}, {1, 3}, 3}.describe());
  CHECK_THROWS_AS(SeminormSpec({{0, 1}, {1}, 3}).validate(), GroupError);
}
