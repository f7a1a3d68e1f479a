#include <doctest.h>

#include "algclosure/supernormal.hpp"
#include "oracles.hpp"

using namespace algclosure;

TEST_CASE("trivial subgroup of S3 is not supernormal") {
  auto s3 = catalog_group("S3");
  std::vector<std::uint32_t> trivial{0};
  auto r = is_supernormal_finite(*s3, trivial);
  CHECK(!r.supernormal);
  CHECK(!r.mismatches.empty());
  CHECK(verify_supernormality(*s3, trivial, r));
  CHECK(!supernormal_center_oracle(*s3, trivial));
}

TEST_CASE("whole group and abelian groups") {
  for (const auto& name : {"S3", "Q8", "D4", "C6", "V4"}) {
    auto g = catalog_group(name);
    std::vector<std::uint32_t> all(g->size());
    for (std::uint32_t i = 0; i < g->size(); ++i) all[i] = i;
    CHECK(is_supernormal_finite(*g, all).supernormal);
    if (g->is_abelian())
      for (const auto& sub : all_subgroups(*g)) CHECK(is_supernormal_finite(*g, sub).supernormal);
  }
}

TEST_CASE("center and brute force agree") {
  for (const auto& name : {"Q8", "D4", "Dic3", "A4"}) {
    auto g = catalog_group(name);
    for (const auto& sub : all_subgroups(*g)) {
      CHECK(is_supernormal_finite(*g, sub).supernormal == oracle::supernormal(*g, sub));
      CHECK(supernormal_center_oracle(*g, sub) == oracle::supernormal(*g, sub));
    }
  }
  auto q8 = catalog_group("Q8");
  CHECK(center(*q8).size() == 2);
}

TEST_CASE("non-subgroups are rejected") {
  auto s3 = catalog_group("S3");
  std::vector<std::uint32_t> not_sub{0, 1, 2};
  if (generated_subgroup(*s3, not_sub).size() != 3) CHECK_THROWS_AS(is_supernormal_finite(*s3, not_sub), GroupError);
}

TEST_CASE("projection witnesses in a countable power") {
  auto s3 = catalog_group("S3");
  auto g = RestrictedProduct::countable_copies(s3);
  SubgroupSpec h(g);
  auto x = g->make({{1, FiniteGroup::element(1)}, {4, FiniteGroup::element(3)}});
  std::vector<Index> keep{1, 4};
  std::vector<Element> samples = g->enumerate().take(60);
  for (std::uint32_t i = 1; i < s3->size(); ++i) samples.push_back(g->make({{4, FiniteGroup::element(i)}}));
  auto w = conjugation_witness(h, x, keep, samples);
  CHECK(w.ok);
  CHECK(w.y == x);
  std::vector<Index> front{1};
  auto partial = conjugation_witness(h, x, front, samples);
  CHECK(!partial.ok);

  std::vector<Element> xs{x}, cands{x}, hs = samples;
  auto sampled = is_supernormal_sampled(*g, xs, cands, hs);
  CHECK(sampled.consistent);
  CHECK(sampled.xs_tested == 1);
}
