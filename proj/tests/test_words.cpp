#include <doctest.h>

#include "algclosure/algsets.hpp"
#include "algclosure/words.hpp"
#include "oracles.hpp"

using namespace algclosure;

TEST_CASE("word evaluation") {
  IntegerGroup z;
  Word w{{Variable{1}, Constant{IntegerGroup::of(3)}, Variable{-1}}};
  // independent left fold: x + 3 - x
  CHECK(evaluate_word(w, z, IntegerGroup::of(5)) == IntegerGroup::of(5 + 3 - 5));
  CHECK(evaluate_word(Word{}, z, IntegerGroup::of(9)) == z.identity());

  auto s3 = catalog_group("S3");
  for (std::uint32_t g = 0; g < s3->size(); ++g) {
    auto ge = FiniteGroup::element(g);
    Word single{{Variable{1}, Constant{s3->invert(ge)}}};
    CHECK(evaluate_word(single, *s3, ge) == s3->identity());
  }
}

TEST_CASE("multiplicative function evaluation") {
  IntegerGroup z;
  MultiplicativeFunction phi(2, {{1, 1}, {2, 1}, {1, 1}});
  std::vector<Element> args{IntegerGroup::of(3), IntegerGroup::of(4)};
  CHECK(evaluate_mf(phi, z, args) == IntegerGroup::of(3 + 4 + 3));
  std::vector<Element> wrong{IntegerGroup::of(3)};
  CHECK_THROWS_AS(evaluate_mf(phi, z, wrong), GroupError);
}

TEST_CASE("function counts") {
  CHECK(count_mfs(1, 1) == 3);
  std::uint64_t want = 0, p = 1;
  for (int l = 0; l <= 5; ++l, p *= 4) want += p;
  CHECK(count_mfs(2, 5) == want);
  CHECK(want == 1365);

  MfEnumerator e(2, 5);
  std::uint64_t n = 0;
  std::optional<MultiplicativeFunction> prev;
  while (auto f = e.next()) {
    if (prev) CHECK(*prev < *f);
    prev = f;
    ++n;
  }
  CHECK(n == 1365);
  MfEnumerator one(1, 1);
  CHECK(one.next()->length() == 0);
  CHECK(format_mf(*one.next()) == "#1");
  CHECK(format_mf(*one.next()) == "#1^-1");
  CHECK(!one.next());
}

TEST_CASE("word and function syntax") {
  auto s3 = catalog_group("S3");
  const auto g1 = s3->name(1);
  auto w = parse_word("x " + g1 + " x^-1", *s3);
  REQUIRE(w.length() == 3);
  CHECK(std::get<Variable>(w.letters[0]).sign == 1);
  CHECK(std::get<Constant>(w.letters[1]).value == FiniteGroup::element(1));
  CHECK(std::get<Variable>(w.letters[2]).sign == -1);
  CHECK(parse_word(format_word(w, *s3), *s3) == w);

  auto phi = parse_mf("#1 #2^-1");
  CHECK(phi == MultiplicativeFunction(2, {{1, 1}, {2, -1}}));

  try {
    parse_word("x^", *s3);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 1);
  }
  CHECK_THROWS_AS(parse_mf("#0"), ParseError);
  CHECK_THROWS_AS(parse_word("nosuch", *s3), ParseError);
}

TEST_CASE("prefix binding preserves solution sets") {
  auto s3 = catalog_group("S3");
  auto phi = parse_mf("#1 #3 #2^-1 #3");
  std::vector<Element> fixed{FiniteGroup::element(2), FiniteGroup::element(4)};
  auto w = bind_prefix(phi, *s3, fixed);
  for (std::uint32_t x = 0; x < s3->size(); ++x) {
    std::vector<Element> args{fixed[0], fixed[1], FiniteGroup::element(x)};
    CHECK(evaluate_word(w, *s3, FiniteGroup::element(x)) == evaluate_mf(phi, *s3, args));
  }
}

TEST_CASE("word function monoid sizes") {
  CHECK(word_function_monoid(catalog_group("C1")).size() == 1);
  CHECK(word_function_monoid(catalog_group("C2")).size() == 4);
  CHECK(word_function_monoid(catalog_group("C3")).size() == 9);
  for (const auto& name : {"C2", "C3", "C4", "V4", "S3", "C6"}) {
    auto g = catalog_group(name);
    auto m = word_function_monoid(g);
    std::set<std::vector<std::uint32_t>> got;
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto v = m.values(i);
      got.insert({v.begin(), v.end()});
      // the witness word realises the tabulated map
      for (std::uint32_t x = 0; x < g->size(); ++x)
        CHECK(evaluate_word(m.witness(i), *g, FiniteGroup::element(x)) == FiniteGroup::element(v[x]));
    }
    CHECK(got == oracle::word_maps(*g));
  }
  CHECK_THROWS_AS(word_function_monoid(catalog_group("S3"), 3), BudgetExceeded);
}
