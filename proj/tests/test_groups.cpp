#include <doctest.h>

#include <set>

#include "algclosure/group.hpp"
#include "oracles.hpp"

using namespace algclosure;

TEST_CASE("integer arithmetic and enumeration") {
  IntegerGroup z;
  CHECK(z.multiply(IntegerGroup::of(3), IntegerGroup::of(4)) == IntegerGroup::of(7));
  CHECK(z.invert(IntegerGroup::of(5)) == IntegerGroup::of(-5));
  CHECK(z.invert(z.identity()) == z.identity());
  auto first = z.enumerate().take(5);
  std::vector<std::int64_t> got;
  for (const auto& e : first) got.push_back(e[0]);
  CHECK(got == std::vector<std::int64_t>{0, 1, -1, 2, -2});
  CHECK(z.parse(z.format(IntegerGroup::of(-12))) == IntegerGroup::of(-12));
}

TEST_CASE("cyclic table agrees with modular addition") {
  auto c6 = cyclic_group(6);
  for (std::uint32_t a = 0; a < 6; ++a)
    for (std::uint32_t b = 0; b < 6; ++b) {
      // names are residues; compare by name to stay independent of index order
      const auto prod = c6->name(c6->mul(a, b));
      const auto want = (std::stoi(c6->name(a)) + std::stoi(c6->name(b))) % 6;
      CHECK(prod == std::to_string(want));
    }
  CHECK(c6->format(c6->multiply(c6->parse("4"), c6->parse("5"))) == "3");
  auto a = c6->parse("2");
  CHECK(c6->multiply(a, c6->identity()) == a);
}

TEST_CASE("finite enumeration lists each element once") {
  for (const auto& name : catalog_names()) {
    auto g = catalog_group(name);
    auto s = g->enumerate();
    std::set<Element> seen;
    while (auto e = s.next()) CHECK(seen.insert(*e).second);
    CHECK(seen.size() == g->size());
    CHECK(verify_group_axioms(*g));
  }
}

TEST_CASE("restricted product inversion and enumeration") {
  auto p = std::make_shared<RestrictedProduct>(std::vector<GroupHandle>{cyclic_group(2), cyclic_group(3)});
  auto c3 = cyclic_group(3);
  auto x = p->make({{2, c3->parse("2")}});
  CHECK(p->invert(x) == p->make({{2, c3->parse("1")}}));
  CHECK(p->invert(p->identity()) == p->identity());

  auto z = std::make_shared<IntegerGroup>();
  RestrictedProduct zz({z, z});
  auto first = zz.enumerate().take(4);
  std::vector<std::pair<std::int64_t, std::int64_t>> got;
  for (const auto& e : first) got.push_back({zz.coordinate(e, 1)[0], zz.coordinate(e, 2)[0]});
  std::vector<std::pair<std::int64_t, std::int64_t>> want{{0, 0}, {1, 0}, {0, 1}, {-1, 0}};
  CHECK(got == want);
}

TEST_CASE("projection onto index sets") {
  auto copies = RestrictedProduct::countable_copies(std::make_shared<IntegerGroup>());
  auto x = copies->make({{1, IntegerGroup::of(4)}, {3, IntegerGroup::of(-2)}});
  CHECK(copies->support(x) == std::vector<Index>{1, 3});
  std::vector<Index> keep{1};
  CHECK(copies->project(x, keep) == copies->make({{1, IntegerGroup::of(4)}}));
  auto s = copies->support(x);
  CHECK(copies->project(x, s) == x);
  CHECK(copies->project(copies->identity(), keep) == copies->identity());
  CHECK(copies->parse(copies->format(x)) == x);
}

TEST_CASE("countable copies enumerate without repeats") {
  auto copies = RestrictedProduct::countable_copies(cyclic_group(2));
  auto first = copies->enumerate().take(200);
  std::set<Element> seen(first.begin(), first.end());
  CHECK(seen.size() == first.size());
  CHECK(first.front() == copies->identity());
}

TEST_CASE("subgroup lists match closure of generating sets") {
  for (const auto& name : {"C6", "S3", "Q8", "C2xC2xC2", "A4"}) {
    auto g = catalog_group(name);
    auto subs = all_subgroups(*g);
    CHECK(std::set<std::vector<std::uint32_t>>(subs.begin(), subs.end()) == oracle::subgroups(*g));
  }
}

TEST_CASE("fg abelian groups reduce torsion") {
  FgAbelianGroup g(1, {4});
  auto x = g.parse(g.format(Element{2, 3}));
  CHECK(g.multiply(x, x) == Element{4, 2});
  CHECK(g.invert(x) == Element{-2, 1});
  CHECK(!g.is_finite());
}

TEST_CASE("table groups reject bad tables") {
  CHECK_THROWS_AS(FiniteGroup("bad", {"e", "a"}, {{0, 1}, {1, 1}}), GroupError);
}
