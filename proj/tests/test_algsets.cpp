#include <doctest.h>

#include "algclosure/algsets.hpp"

using namespace algclosure;

namespace {
Subset of(const FiniteGroup& g, std::vector<std::uint32_t> members) { return make_subset(g, members); }
}  // namespace

TEST_CASE("elementary solution sets") {
  auto c6 = cyclic_group(6);
  auto w = parse_word("x x", *c6);
  auto sols = elementary_solution_set(*c6, w);
  std::vector<std::string> names;
  for (auto i : subset_members(sols)) names.push_back(c6->name(i));
  std::vector<std::string> brute;
  for (int k = 0; k < 6; ++k)
    if ((2 * k) % 6 == 0) brute.push_back(std::to_string(k));
  std::sort(names.begin(), names.end());
  CHECK(names == brute);

  auto s3 = catalog_group("S3");
  for (std::uint32_t c = 0; c < s3->size(); ++c) {
    Word single{{Variable{1}, Constant{FiniteGroup::element(s3->inv(c))}}};
    CHECK(subset_members(elementary_solution_set(*s3, single)) == std::vector<std::uint32_t>{c});
  }
  CHECK(elementary_solution_set(*s3, parse_word("x x^-1", *s3)).all());
}

TEST_CASE("closure of finite sets") {
  auto s3 = catalog_group("S3");
  ElementaryFamily fam(s3);
  auto whole = Subset(s3->size());
  whole.set();
  CHECK(algebraic_closure_finite(fam, whole).closure == whole);
  auto empty = Subset(s3->size());
  auto r = algebraic_closure_finite(fam, empty);
  CHECK(r.closure.none());
  CHECK(verify_closure_result(*s3, r));
  auto a = of(*s3, {1, 3});
  auto ra = algebraic_closure_finite(fam, a);
  CHECK(ra.closure == a);
  CHECK(ra.certificates.size() == 4);
  CHECK(verify_closure_result(*s3, ra));
}

TEST_CASE("tampered certificates are rejected") {
  auto c4 = catalog_group("C4");
  ElementaryFamily fam(c4);
  auto a = of(*c4, {1});
  auto r = algebraic_closure_finite(fam, a);
  REQUIRE(!r.certificates.empty());
  auto cert = r.certificates.front();
  cert.cover.front().second = parse_word("x x^-1", *c4);
  CHECK(!verify_certificate(*c4, a, cert));
}

TEST_CASE("translation of sets") {
  auto s3 = catalog_group("S3");
  auto a = of(*s3, {1, 2});
  CHECK(translate_subset(*s3, 0, a) == a);

  auto z = std::make_shared<IntegerGroup>();
  auto pos = SetSpec::filtered(z, [](const Element& e) { return e[0] >= 1; }, "positives");
  auto shifted = translate_set(z, IntegerGroup::of(2), pos);
  for (std::int64_t n = -5; n <= 5; ++n) CHECK(shifted.contains(IntegerGroup::of(n)) == (n >= -1));
  auto first = shifted.enumerate().take(3);
  CHECK(first[0] == IntegerGroup::of(-1));
}
