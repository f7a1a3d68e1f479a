// Acceptance run: one PASS/FAIL line per criterion; exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "algclosure/algsets.hpp"
#include "algclosure/commands.hpp"
#include "algclosure/seminorm.hpp"
#include "algclosure/stagewise.hpp"
#include "algclosure/supernormal.hpp"
#include "oracles.hpp"

using namespace algclosure;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

#define EXPECT(cond, msg)                  \
  do {                                     \
    if (!(cond)) {                         \
      std::ostringstream os__;             \
      os__ << msg;                         \
      return Outcome{false, os__.str()};   \
    }                                      \
  } while (0)

GroupHandle integers() { return std::make_shared<IntegerGroup>(); }

SetSpec positives(const GroupHandle& z) {
  return SetSpec::filtered(z, [](const Element& e) { return e[0] >= 1; }, "positives");
}

Construction z_instance(std::uint32_t stages) {
  auto z = integers();
  Construction c(SubgroupSpec(z), positives(z));
  for (std::uint32_t j = 0; j < stages; ++j)
    if (!std::holds_alternative<StageRecord>(c.advance())) throw std::runtime_error("stage did not complete");
  return c;
}

bool closure_is_identity(const ElementaryFamily& fam, const Subset& a, std::string& why) {
  auto r = algebraic_closure_finite(fam, a);
  if (r.closure != a) {
    why = fam.group().describe() + ": closure differs from input";
    return false;
  }
  if (r.certificates.size() != fam.group().size() - a.count()) {
    why = fam.group().describe() + ": missing certificates";
    return false;
  }
  for (const auto& cert : r.certificates)
    if (!verify_certificate(fam.group(), a, cert)) {
      why = fam.group().describe() + ": certificate fails to verify";
      return false;
    }
  return true;
}

Outcome criterion1() {
  std::mt19937_64 rng(20240601);
  std::size_t exhaustive = 0, sampled = 0;
  for (const auto& name : catalog_names()) {
    auto g = catalog_group(name);
    if (g->size() > 8) continue;
    ElementaryFamily fam(g);
    std::string why;
    if (g->size() <= 6) {
      for (std::uint32_t mask = 0; mask < (1u << g->size()); ++mask) {
        Subset a(g->size());
        for (std::uint32_t i = 0; i < g->size(); ++i) a[i] = (mask >> i) & 1u;
        EXPECT(closure_is_identity(fam, a, why), why);
        ++exhaustive;
      }
    } else {
      std::uniform_int_distribution<std::uint32_t> bits(0, (1u << g->size()) - 1);
      for (int k = 0; k < 64; ++k) {
        const auto mask = bits(rng);
        Subset a(g->size());
        for (std::uint32_t i = 0; i < g->size(); ++i) a[i] = (mask >> i) & 1u;
        EXPECT(closure_is_identity(fam, a, why), why);
        ++sampled;
      }
    }
  }
  return {true, std::to_string(exhaustive) + " exhaustive subsets, " + std::to_string(sampled) + " sampled"};
}

Outcome criterion2() {
  std::size_t checked = 0;
  auto one_minus_one = parse_mf("#1 #1^-1", 2);  // second slot unused
  auto first_minus_second = parse_mf("#1 #2^-1");
  for (const auto& name : {"S3", "Q8", "C5"}) {
    auto g = catalog_group(name);
    const auto e = g->identity();
    for (std::uint32_t i = 0; i < g->size(); ++i) {
      const auto a1 = FiniteGroup::element(i);
      std::vector<Element> args{a1, e};
      EXPECT(evaluate_mf(one_minus_one, *g, args) == e, "(1,+1)(1,-1) is not the identity");
      std::vector<Element> same{a1, a1};
      EXPECT(evaluate_mf(first_minus_second, *g, same) == e, "Phi(a_1, a_1) != 1");
      std::vector<Element> with_one{a1, e};
      EXPECT(evaluate_mf(first_minus_second, *g, with_one) == a1, "Phi(a_1, 1) != a_1");
      if (i != 0) EXPECT(!(evaluate_mf(first_minus_second, *g, with_one) == e), "Phi(a_1, 1) = 1 for a_1 != 1");
      ++checked;
    }
  }
  // (i,+1)(2j,-1) vanishes exactly when slots i and 2j agree.
  auto g = catalog_group("S3");
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::uint32_t> pick(0, g->size() - 1);
  for (std::uint32_t j = 1; j <= 3; ++j)
    for (std::uint32_t i = 1; i <= j; ++i)
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<Element> args;
        for (std::uint32_t k = 0; k < 2 * j; ++k) args.push_back(FiniteGroup::element(pick(rng)));
        MultiplicativeFunction phi(2 * j, {{i, 1}, {2 * j, -1}});
        const bool vanishes = evaluate_mf(phi, *g, args) == g->identity();
        EXPECT(vanishes == (args[i - 1] == args[2 * j - 1]), "(i,+1)(2j,-1) identity rule fails");
        ++checked;
      }
  return {true, std::to_string(checked) + " evaluations"};
}

Outcome criterion3() {
  auto c = z_instance(3);
  const auto& g = c.group();
  // first survivor of the coefficient-vector oracle at stage 1 (a_1 = 1)
  std::int64_t first = 0;
  for (std::int64_t n = 1; n < 100 && first == 0; ++n)
    if (!oracle::integer_separation({1}, n, 5)) first = n;
  EXPECT(first == 5, "oracle survivor is " << first);
  EXPECT(c.x(1)[0] == 5, "x_1 = " << c.x(1)[0]);
  std::ostringstream xs;
  for (std::uint32_t j = 1; j <= 3; ++j) {
    const auto xj = c.x(j);
    EXPECT(!c.membership_B(j, g.identity()).member, "identity in B_" << j);
    EXPECT(c.set().contains(xj), "x_" << j << " not in A");
    EXPECT(!c.membership_B(j, xj).member, "x_" << j << " in B_" << j);
    for (std::uint32_t i = 0; i <= j; ++i) EXPECT(!(c.a(i) == xj), "x_" << j << " = a_" << i);
    auto t = c.transfer_check(j + 1);
    EXPECT(t.holds, "transfer check fails entering stage " << j + 1);
    xs << (j > 1 ? ", " : "") << "x_" << j << "=" << xj[0] << " (transfer states " << t.states << ")";
  }
  return {true, xs.str()};
}

Outcome criterion4() {
  auto c = z_instance(3);
  std::size_t checked = 0;
  for (std::uint32_t j = 1; j <= 3; ++j) {
    std::vector<std::int64_t> fixed;
    for (std::uint32_t i = 1; i <= j; ++i) fixed.push_back(c.a(i)[0]);
    for (std::uint32_t i = 1; i < j; ++i) fixed.push_back(c.x(i)[0]);
    for (std::int64_t x = -10; x <= 10; ++x) {
      const bool engine = c.membership_B(j, IntegerGroup::of(x)).member;
      const bool expect = oracle::integer_separation(fixed, x, 3 * static_cast<int>(j) + 2);
      EXPECT(engine == expect, "stage " << j << ", x = " << x << ": engine " << engine << ", oracle " << expect);
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " memberships agree"};
}

Outcome criterion5() {
  auto c = z_instance(3);
  const auto& g = c.group();
  std::vector<Element> sample;
  for (const auto& [pos, e] : c.materialize(200)) sample.push_back(e);
  EXPECT(sample.size() == 200, "only " << sample.size() << " numbered elements");
  SeminormFamily t3(c, 3), t2(c, 2);
  std::size_t pairs = 0;
  for (std::uint32_t q = 1; q <= 3; ++q) {
    const auto& n = t3.base(q);
    auto val = [&](const Element& x) {
      auto v = n.value(x);
      if (!v.finite()) throw std::runtime_error("infinite value in the sample");
      return v.value;
    };
    EXPECT(val(g.identity()) == Rational(0), "N_" << q << "(1) != 0");
    for (const auto& x : sample) EXPECT(val(g.invert(x)) == val(x), "N_" << q << " not symmetric at " << x[0]);
    for (const auto& x : sample)
      for (const auto& y : sample) {
        EXPECT(val(g.multiply(x, y)) <= val(x) + val(y), "subadditivity fails at " << x[0] << ", " << y[0]);
        ++pairs;
      }
  }
  for (std::uint32_t q = 1; q <= 2; ++q)
    for (const auto& x : sample) {
      auto hi = t2.base(q).value(x), lo = t3.base(q).value(x);
      EXPECT(hi.finite() && lo.finite() && lo.value <= hi.value, "truncation monotonicity fails at " << x[0]);
    }
  SeminormSpec a{{0, 1}, {1, 2}, 3}, b{{2}, {3}, 3};
  auto both = concatenate(a, b);
  for (std::size_t k = 0; k < 100; ++k) {
    const auto& x = sample[k];
    auto va = composite_value(t3, a, x), vb = composite_value(t3, b, x), vab = composite_value(t3, both, x);
    EXPECT(vab.total == va.total + vb.total, "filterbase additivity fails at " << x[0]);
    if (in_UN(t3, both, x).certified)
      EXPECT(in_UN(t3, a, x).certified && in_UN(t3, b, x).certified, "U_N' not inside both at " << x[0]);
  }
  return {true, std::to_string(pairs) + " subadditivity pairs over N_1..N_3"};
}

Outcome criterion6() {
  auto c = z_instance(5);
  std::mt19937 rng(11);
  std::size_t specs = 0;
  for (std::uint32_t n = 1; n <= 3; ++n)
    for (std::uint32_t target = n + 1; target <= 5; ++target)
      for (int trial = 0; trial < 4; ++trial) {
        std::uniform_int_distribution<std::uint32_t> pd(0, target - 1), qd(1, target - 1);
        SeminormSpec spec;
        spec.truncation = 1;
        for (std::uint32_t k = 0; k < n; ++k) {
          spec.p.push_back(pd(rng));
          spec.q.push_back(qd(rng));
        }
        std::uint32_t m = n;
        for (auto v : spec.p) m = std::max<std::uint32_t>(m, static_cast<std::uint32_t>(v));
        for (auto v : spec.q) m = std::max(m, v);
        const auto s = m + 1;
        auto w = closure_witness(c, spec);
        EXPECT(w.s == s, spec.describe() << ": s = " << w.s << ", expected " << s);
        EXPECT(w.x == c.x(s), "witness is not x_s");
        EXPECT(w.bound == Rational(n, s), "bound " << to_string(w.bound) << " != " << n << "/" << s);
        EXPECT(w.bound < Rational(1), "bound not below 1");
        EXPECT(w.computed.kind == SeminormValue::Kind::exact && w.computed.total <= w.bound,
               spec.describe() << ": computed " << to_string(w.computed.total));
        EXPECT(w.in_A && w.certified, spec.describe() << ": not certified");
        // each term: the single generator a_p^-1 x_s a_p of N_q weighs 1/s
        const auto trunc = std::max<std::uint32_t>(spec.truncation, s);
        for (std::size_t k = 0; k < n; ++k) {
          auto gens = build_generators(c, spec.q[k], trunc);
          auto conj = c.group().conjugate(c.x(s), c.a(spec.p[k]));
          auto weight = gens.weight_of(conj);
          EXPECT(weight && *weight <= Rational(1, s), "term " << k << " has no 1/s generator");
        }
        ++specs;
      }
  return {true, std::to_string(specs) + " specs with n in {1,2,3}"};
}

Outcome criterion7() {
  auto s = Scenario::parse("version = 1\n[sets.A]\ngroup = \"Z\"\nelements = [2, 4]\n[construct]\nset = \"A\"\n", "A={2,4}");
  CommandOptions o;
  o.recheck = true;
  auto r = run_construct(s, o, true);
  EXPECT(r.exit_code == exit_ok, "exit code " << r.exit_code);
  const auto& body = r.report["result"];
  EXPECT(body.contains("refutation"), "no refutation emitted");
  EXPECT(r.report["recheck"]["ok"].get<bool>(), "recheck failed");
  // independent replay of the certificate from its serialized form
  auto z = integers();
  const auto& ref = body["refutation"];
  std::vector<Element> args;
  for (const auto& a : ref["a"]) args.push_back(z->parse(a.get<std::string>()));
  for (const auto& x : ref["x"]) args.push_back(z->parse(x.get<std::string>()));
  std::vector<MultiplicativeFunction> fs;
  for (const auto& f : ref["functions"]) fs.push_back(parse_mf(f.get<std::string>(), static_cast<std::uint32_t>(args.size() + 1)));
  for (const auto& f : fs) {
    auto at_one = args;
    at_one.push_back(z->identity());
    EXPECT(!(evaluate_mf(f, *z, at_one) == z->identity()), format_mf(f) << " vanishes at 1");
  }
  std::set<std::int64_t> covered;
  for (const auto& entry : ref["cover"]) {
    auto e = z->parse(entry[0].get<std::string>());
    auto at = args;
    at.push_back(e);
    EXPECT(evaluate_mf(fs.at(entry[1].get<std::size_t>()), *z, at) == z->identity(), e[0] << " does not solve its function");
    covered.insert(e[0]);
  }
  EXPECT((covered == std::set<std::int64_t>{2, 4}), "cover does not equal A");
  return {true, std::to_string(fs.size()) + " functions cover {2, 4}"};
}

Outcome criterion8() {
  std::size_t pairs = 0, groups = 0;
  for (const auto& name : catalog_names()) {
    auto g = catalog_group(name);
    if (g->size() > 12) continue;
    ++groups;
    auto subs = all_subgroups(*g);
    auto expected = oracle::subgroups(*g);
    EXPECT(std::set<std::vector<std::uint32_t>>(subs.begin(), subs.end()) == expected, name << ": subgroup list differs");
    for (const auto& sub : subs) {
      auto rep = is_supernormal_finite(*g, sub);
      const bool center = supernormal_center_oracle(*g, sub);
      EXPECT(rep.supernormal == center, name << ": brute force and center criterion disagree");
      EXPECT(rep.supernormal == oracle::supernormal(*g, sub), name << ": report disagrees with direct check");
      EXPECT(verify_supernormality(*g, sub, rep), name << ": report does not re-verify");
      if (g->is_abelian()) EXPECT(rep.supernormal, name << " is abelian but a subgroup is not supernormal");
      ++pairs;
    }
  }
  return {true, std::to_string(pairs) + " subgroup pairs in " + std::to_string(groups) + " groups"};
}

Outcome criterion9() {
  std::size_t checked = 0;
  for (const auto& name : {"C4", "S3"}) {
    auto g = catalog_group(name);
    ElementaryFamily fam(g);
    for (std::uint32_t mask = 0; mask < (1u << g->size()); ++mask) {
      Subset b(g->size());
      for (std::uint32_t i = 0; i < g->size(); ++i) b[i] = (mask >> i) & 1u;
      const auto closed = algebraic_closure_finite(fam, b).closure;
      for (std::uint32_t k = 0; k < g->size(); ++k) {
        // b^-1 B computed directly
        Subset shifted(g->size());
        for (std::uint32_t i = 0; i < g->size(); ++i)
          if (b[i]) shifted[g->mul(g->inv(k), i)] = true;
        EXPECT(translate_subset(*g, k, b) == shifted, name << ": translate_subset is wrong");
        Subset shifted_closure(g->size());
        for (std::uint32_t i = 0; i < g->size(); ++i)
          if (closed[i]) shifted_closure[g->mul(g->inv(k), i)] = true;
        EXPECT(algebraic_closure_finite(fam, shifted).closure == shifted_closure, name << ": translation fails");
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " (B, b) pairs"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "finite closure equals the input set, with certificates", 60, criterion1},
      {2, "multiplicative function micro-identities", 0, criterion2},
      {3, "stage invariants on the integers with A = positives, J = 3", 300, criterion3},
      {4, "B_j membership agrees with the coefficient-vector oracle", 0, criterion4},
      {5, "seminorm axioms, truncation monotonicity, filterbase additivity", 120, criterion5},
      {6, "closure witness bound n/s < 1", 0, criterion6},
      {7, "refutation for A = {2, 4} with recheck", 0, criterion7},
      {8, "supernormality: brute force equals the center criterion", 60, criterion8},
      {9, "closure commutes with translation on C4 and S3", 0, criterion9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.ok && c.limit_seconds > 0 && secs > c.limit_seconds) {
      out = {false, "took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_seconds) + " s"};
    }
    std::printf("%s criterion %d: %s (%.2f s) %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    std::fflush(stdout);
    failed += !out.ok;
  }
  return failed == 0 ? 0 : 1;
}
