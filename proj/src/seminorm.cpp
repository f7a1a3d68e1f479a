#include "algclosure/seminorm.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace algclosure {

namespace {
// Mixed rational/int comparisons recurse in Boost 1.74.
const Rational kZero(0);
const Rational kOne(1);
}  // namespace

std::string to_string(SeminormValue::Kind k) {
  switch (k) {
    case SeminormValue::Kind::exact: return "exact";
    case SeminormValue::Kind::capped: return "capped";
    case SeminormValue::Kind::infinite: return "infinite";
  }
  return "?";
}

std::optional<Rational> WeightedGeneratorSet::weight_of(const Element& e) const {
  for (const auto& g : generators)
    if (g.element == e) return g.weight;
  return std::nullopt;
}

WeightedGeneratorSet build_generators(const Construction& s, std::uint32_t j, std::uint32_t truncation) {
  if (truncation > s.stage())
    throw GroupError("truncation " + std::to_string(truncation) + " needs " + std::to_string(truncation) +
                     " completed stages, have " + std::to_string(s.stage()));
  if (j == 0 || j > truncation)
    throw GroupError("generator set N_" + std::to_string(j) + " needs 1 <= j <= T = " + std::to_string(truncation));
  const auto& g = s.group();
  WeightedGeneratorSet out{j, truncation, {}};
  std::unordered_map<Element, std::size_t, ElementHash> seen;
  auto add = [&](Element e, Rational w, std::string label) {
    auto [it, fresh] = seen.emplace(e, out.generators.size());
    if (!fresh) {
      const auto& prev = out.generators[it->second];
      if (prev.weight != w)
        throw InvariantViolation("ill-defined weights: " + prev.label + " (" + to_string(prev.weight) + ") and " +
                                 label + " (" + to_string(w) + ") are both " + g.format(e));
    }
    out.generators.push_back({std::move(e), w, std::move(label)});
  };
  add(g.identity(), Rational(0), "1");
  add(s.a(j), Rational(1), "a_" + std::to_string(j));
  for (std::uint32_t i = j; i <= truncation; ++i) {
    const auto xi = s.x(i);
    for (std::uint32_t k = 0; k <= i; ++k) {
      auto label = "a_" + std::to_string(k) + "^-1 x_" + std::to_string(i) + " a_" + std::to_string(k);
      add(g.conjugate(xi, s.a(k)), Rational(1, i), std::move(label));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dijkstra ball

namespace {

struct SymmetricLetter {
  Element element;
  Rational weight;
  std::uint32_t generator;
  int sign;
};

}  // namespace

struct Seminorm::Ball {
  struct Node {
    Rational dist;
    std::uint32_t hops = 0;
    std::int64_t parent = -1;
    std::uint32_t letter = 0;
    bool settled = false;
    std::uint32_t jump = 0;  // skew-binary ancestor pointer, set when settled
  };
  struct Entry {
    Rational dist;
    std::uint32_t hops;
    std::uint32_t node;
    bool operator>(const Entry& o) const {
      if (dist != o.dist) return dist > o.dist;
      if (hops != o.hops) return hops > o.hops;
      return node > o.node;
    }
  };

  std::mutex mu;
  std::vector<SymmetricLetter> letters;
  std::vector<Element> elems;
  std::vector<Node> nodes;
  std::unordered_map<Element, std::uint32_t, ElementHash> index;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;

  std::vector<std::uint32_t> path(std::int64_t n) const {
    std::vector<std::uint32_t> rev;
    for (; nodes[n].parent >= 0; n = nodes[n].parent) rev.push_back(nodes[n].letter);
    std::reverse(rev.begin(), rev.end());
    return rev;
  }

  void settle(std::uint32_t v) {
    auto& n = nodes[v];
    n.settled = true;
    if (n.parent < 0) {
      n.jump = v;
      return;
    }
    const auto p = static_cast<std::uint32_t>(n.parent);
    const auto j = nodes[p].jump;
    const auto jj = nodes[j].jump;
    n.jump = nodes[p].hops - nodes[j].hops == nodes[j].hops - nodes[jj].hops ? jj : p;
  }

  // Candidate reaching via (parent u, letter c) is better than the node's
  // current route: weight, then factor count, then lexicographic. Both
  // parents are settled and equally deep, so the paths first differ just
  // below their common ancestor.
  bool better(std::uint32_t v, const Rational& d, std::uint32_t hops, std::uint32_t u, std::uint32_t c) const {
    const auto& cur = nodes[v];
    if (d != cur.dist) return d < cur.dist;
    if (hops != cur.hops) return hops < cur.hops;
    auto a = u;
    auto b = static_cast<std::uint32_t>(cur.parent);
    if (a == b) return c < cur.letter;
    while (nodes[a].parent != nodes[b].parent) {
      if (nodes[a].jump != nodes[b].jump) {
        a = nodes[a].jump;
        b = nodes[b].jump;
      } else {
        a = static_cast<std::uint32_t>(nodes[a].parent);
        b = static_cast<std::uint32_t>(nodes[b].parent);
      }
    }
    return nodes[a].letter < nodes[b].letter;
  }

  void relax(const Group& g, std::uint32_t u, std::size_t cap) {
    for (std::uint32_t c = 0; c < letters.size(); ++c) {
      auto y = g.multiply_unchecked(elems[u], letters[c].element);
      const Rational d = nodes[u].dist + letters[c].weight;
      const auto hops = nodes[u].hops + 1;
      auto it = index.find(y);
      if (it == index.end()) {
        if (nodes.size() >= cap) throw BudgetExceeded("seminorm search exceeded " + std::to_string(cap) + " elements");
        const auto v = static_cast<std::uint32_t>(nodes.size());
        index.emplace(y, v);
        elems.push_back(std::move(y));
        nodes.push_back({d, hops, u, c, false, 0});
        frontier.push({d, hops, v});
      } else {
        const auto v = it->second;
        if (nodes[v].settled || !better(v, d, hops, u, c)) continue;
        nodes[v] = {d, hops, u, c, false, 0};
        frontier.push({d, hops, v});
      }
    }
  }
};

Seminorm::Seminorm(GroupHandle g, WeightedGeneratorSet gens, SeminormOptions opts)
    : group_(std::move(g)), gens_(std::move(gens)), opts_(opts), ball_(std::make_shared<Ball>()) {
  auto& b = *ball_;
  std::unordered_map<Element, std::size_t, ElementHash> at;
  for (std::uint32_t i = 0; i < gens_.generators.size(); ++i) {
    const auto& gen = gens_.generators[i];
    if (gen.weight < kZero) throw GroupError("negative generator weight");
    if (group_->is_identity(gen.element)) continue;
    for (int sign : {1, -1}) {
      auto e = sign > 0 ? gen.element : group_->invert(gen.element);
      auto [it, fresh] = at.emplace(e, b.letters.size());
      if (fresh)
        b.letters.push_back({std::move(e), gen.weight, i, sign});
      else if (gen.weight < b.letters[it->second].weight)
        b.letters[it->second] = {std::move(e), gen.weight, i, sign};
    }
  }
  const auto id = group_->identity();
  b.index.emplace(id, 0);
  b.elems.push_back(id);
  b.nodes.push_back({Rational(0), 0, -1, 0, false, 0});
  b.frontier.push({Rational(0), 0, 0});
}

SeminormValue Seminorm::value(const Element& x) const {
  if (!group_->is_valid(x)) throw GroupError("element not valid in " + group_->describe());
  auto& b = *ball_;
  std::lock_guard lock(b.mu);
  auto settled = [&]() -> std::optional<std::uint32_t> {
    auto it = b.index.find(x);
    if (it != b.index.end() && b.nodes[it->second].settled) return it->second;
    return std::nullopt;
  };
  for (;;) {
    if (auto v = settled()) {
      SeminormValue out{SeminormValue::Kind::exact, b.nodes[*v].dist, {}};
      for (auto c : b.path(*v)) out.factorization.push_back({b.letters[c].generator, b.letters[c].sign});
      if (opts_.ceiling && out.value >= *opts_.ceiling) return {SeminormValue::Kind::capped, *opts_.ceiling, {}};
      return out;
    }
    while (!b.frontier.empty()) {
      const auto& top = b.frontier.top();
      if (b.nodes[top.node].settled || top.dist != b.nodes[top.node].dist || top.hops != b.nodes[top.node].hops)
        b.frontier.pop();
      else
        break;
    }
    if (b.frontier.empty()) return {SeminormValue::Kind::infinite, Rational(0), {}};
    if (opts_.ceiling && b.frontier.top().dist >= *opts_.ceiling)
      return {SeminormValue::Kind::capped, *opts_.ceiling, {}};
    const auto u = b.frontier.top().node;
    b.frontier.pop();
    b.settle(u);
    b.relax(*group_, u, opts_.node_cap);
  }
}

bool Seminorm::verify(const Element& x, const SeminormValue& v) const {
  if (v.kind != SeminormValue::Kind::exact) return false;
  auto acc = group_->identity();
  Rational total(0);
  for (const auto& step : v.factorization) {
    if (step.generator >= gens_.generators.size()) return false;
    const auto& gen = gens_.generators[step.generator];
    acc = group_->multiply(acc, step.sign > 0 ? gen.element : group_->invert(gen.element));
    total += gen.weight;
  }
  return acc == x && total == v.value;
}

std::string Seminorm::format_factorization(const SeminormValue& v) const {
  std::string out;
  for (const auto& step : v.factorization) {
    if (!out.empty()) out += " . ";
    const auto& gen = gens_.generators[step.generator];
    out += "[" + std::to_string(step.generator) + (step.sign < 0 ? "]^-1" : "]") + "{" + to_string(gen.weight) + "}";
  }
  return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------
// Composite seminorms

void SeminormSpec::validate() const {
  if (p.empty()) throw GroupError("seminorm spec needs n >= 1 terms");
  if (p.size() != q.size()) throw GroupError("p and q lists differ in length");
  for (auto v : q)
    if (v == 0) throw GroupError("q entries must be positive");
  if (truncation == 0) throw GroupError("truncation must be positive");
}

std::string SeminormSpec::describe() const {
  auto join = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  return "p=" + join(p) + " q=" + join(q) + " T=" + std::to_string(truncation);
}

SeminormSpec concatenate(const SeminormSpec& a, const SeminormSpec& b) {
  if (a.truncation != b.truncation) throw GroupError("concatenated specs must share a truncation");
  SeminormSpec out = a;
  out.p.insert(out.p.end(), b.p.begin(), b.p.end());
  out.q.insert(out.q.end(), b.q.begin(), b.q.end());
  return out;
}

SeminormFamily::SeminormFamily(const Construction& s, std::uint32_t truncation, SeminormOptions opts)
    : s_(&s), truncation_(truncation), opts_(opts) {
  if (truncation == 0 || truncation > s.stage())
    throw GroupError("truncation " + std::to_string(truncation) + " needs that many completed stages, have " +
                     std::to_string(s.stage()));
}

const Seminorm& SeminormFamily::base(std::uint32_t q) const {
  auto it = bases_.find(q);
  if (it == bases_.end()) {
    auto gens = build_generators(*s_, q, truncation_);
    it = bases_.emplace(q, std::make_unique<Seminorm>(s_->subgroup().ambient_handle(), std::move(gens), opts_)).first;
  }
  return *it->second;
}

CompositeValue composite_value(const SeminormFamily& f, const SeminormSpec& spec, const Element& x) {
  spec.validate();
  if (spec.truncation != f.truncation())
    throw GroupError("spec truncation " + std::to_string(spec.truncation) + " differs from the family's " +
                     std::to_string(f.truncation()));
  const auto& s = f.construction();
  const auto& g = s.group();
  CompositeValue out;
  for (std::size_t k = 0; k < spec.n(); ++k) {
    auto ap = s.numbered(spec.p[k]);
    if (!ap) throw GroupError("a_" + std::to_string(spec.p[k]) + " is not numbered");
    CompositeTerm term{spec.p[k], spec.q[k], g.conjugate(x, *ap), {}};
    term.value = f.base(spec.q[k]).value(term.conjugated);
    if (term.value.kind == SeminormValue::Kind::infinite)
      out.kind = SeminormValue::Kind::infinite;
    else if (term.value.kind == SeminormValue::Kind::capped && out.kind == SeminormValue::Kind::exact)
      out.kind = SeminormValue::Kind::capped;
    if (out.kind != SeminormValue::Kind::infinite) out.total += term.value.value;
    out.terms.push_back(std::move(term));
  }
  if (out.kind == SeminormValue::Kind::infinite) out.total = 0;
  return out;
}

MembershipResult in_UN(const SeminormFamily& f, const SeminormSpec& spec, const Element& x) {
  MembershipResult r{false, composite_value(f, spec, x)};
  if (r.value.kind != SeminormValue::Kind::exact || r.value.total >= kOne) return r;
  for (const auto& t : r.value.terms)
    if (!f.base(t.q).verify(t.conjugated, t.value)) return r;
  r.certified = true;
  return r;
}

ClosureWitness closure_witness(const Construction& s, const SeminormSpec& spec, SeminormOptions opts) {
  spec.validate();
  std::uint64_t m = spec.n();
  for (auto v : spec.p) m = std::max(m, v);
  for (auto v : spec.q) m = std::max<std::uint64_t>(m, v);
  const auto need = m + 1;
  const auto trunc = std::max<std::uint64_t>(spec.truncation, need);
  if (trunc > s.stage())
    throw GroupError("closure witness needs s = " + std::to_string(need) + " and truncation " + std::to_string(trunc) +
                     ", so " + std::to_string(trunc) + " completed stages; have " + std::to_string(s.stage()));
  ClosureWitness w;
  w.s = static_cast<std::uint32_t>(need);
  w.x = s.x(w.s);
  w.bound = Rational(static_cast<std::int64_t>(spec.n()), w.s);
  w.in_A = s.set().contains(w.x);

  SeminormSpec eff = spec;
  eff.truncation = static_cast<std::uint32_t>(trunc);
  SeminormFamily fam(s, eff.truncation, opts);
  const auto& g = s.group();
  bool proofs_ok = true;
  Rational single_sum(0);
  for (std::size_t k = 0; k < spec.n(); ++k) {
    const auto& gens = fam.base(spec.q[k]).generators();
    auto conj = g.conjugate(w.x, s.a(spec.p[k]));
    auto weight = gens.weight_of(conj);
    auto label = "a_" + std::to_string(spec.p[k]) + "^-1 x_" + std::to_string(w.s) + " a_" + std::to_string(spec.p[k]);
    if (!weight || *weight != Rational(1, w.s)) proofs_ok = false;
    single_sum += weight.value_or(Rational(0));
    w.single_generator_proof.emplace_back(label + " in N_" + std::to_string(spec.q[k]), weight.value_or(Rational(0)));
  }
  w.computed = composite_value(fam, eff, w.x);
  for (const auto& t : w.computed.terms)
    if (!fam.base(t.q).verify(t.conjugated, t.value)) proofs_ok = false;
  w.certified = proofs_ok && single_sum == w.bound && w.computed.kind == SeminormValue::Kind::exact &&
                w.computed.total <= w.bound && w.bound < kOne && w.in_A;
  return w;
}

CheckReport check_seminorm_axioms(const Seminorm& n, std::span<const Element> sample) {
  CheckReport r;
  const auto& g = n.group();
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.failure = std::move(msg);
    return r;
  };
  auto id = n.value(g.identity());
  ++r.checked;
  if (id.kind != SeminormValue::Kind::exact || id.value != kZero) return fail("value at the identity is not 0");
  auto le = [](const SeminormValue& a, const SeminormValue& b, const SeminormValue& c) {
    // a <= b + c with infinity absorbing
    if (!b.finite() || !c.finite()) return true;
    if (!a.finite()) return false;
    return a.value <= b.value + c.value;
  };
  auto same = [](const SeminormValue& a, const SeminormValue& b) {
    return a.kind == b.kind && (a.kind == SeminormValue::Kind::infinite || a.value == b.value);
  };
  std::vector<SeminormValue> vals;
  for (const auto& x : sample) {
    vals.push_back(n.value(x));
    ++r.checked;
    if (!same(vals.back(), n.value(g.invert(x)))) return fail("asymmetric at " + g.format(x));
    if (vals.back().kind == SeminormValue::Kind::exact && !n.verify(x, vals.back()))
      return fail("factorization does not replay at " + g.format(x));
  }
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = 0; j < sample.size(); ++j) {
      ++r.checked;
      auto xy = n.value(g.multiply(sample[i], sample[j]));
      if (!le(xy, vals[i], vals[j]))
        return fail("subadditivity fails at " + g.format(sample[i]) + ", " + g.format(sample[j]));
    }
  return r;
}

CheckReport filterbase_check(const SeminormFamily& f, const SeminormSpec& a, const SeminormSpec& b,
                             std::span<const Element> samples) {
  CheckReport r;
  const auto ab = concatenate(a, b);
  const auto& g = f.construction().group();
  for (const auto& x : samples) {
    ++r.checked;
    auto va = composite_value(f, a, x), vb = composite_value(f, b, x), vab = composite_value(f, ab, x);
    const bool inf = va.kind == SeminormValue::Kind::infinite || vb.kind == SeminormValue::Kind::infinite;
    const bool ok = inf ? vab.kind == SeminormValue::Kind::infinite : vab.total == va.total + vb.total;
    if (!ok) {
      r.ok = false;
      r.failure = "additivity fails at " + g.format(x);
      return r;
    }
    if (!inf && vab.kind == SeminormValue::Kind::exact && vab.total < kOne && (va.total >= kOne || vb.total >= kOne)) {
      r.ok = false;
      r.failure = "U of the concatenation escapes a constituent at " + g.format(x);
      return r;
    }
  }
  return r;
}

}  // namespace algclosure
