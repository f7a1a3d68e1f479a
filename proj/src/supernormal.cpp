#include "algclosure/supernormal.hpp"

#include <algorithm>

namespace algclosure {

namespace {

// x^-1 h x for every h.
std::vector<std::uint32_t> conjugation_table(const FiniteGroup& g, std::uint32_t x) {
  std::vector<std::uint32_t> t(g.size());
  const auto xi = g.inv(x);
  for (std::uint32_t h = 0; h < g.size(); ++h) t[h] = g.mul(g.mul(xi, h), x);
  return t;
}

void require_subgroup(const FiniteGroup& g, std::span<const std::uint32_t> sub) {
  std::vector<bool> in(g.size(), false);
  for (auto s : sub) {
    if (s >= g.size()) throw GroupError("subgroup member out of range");
    in[s] = true;
  }
  if (!in[0]) throw GroupError("subset does not contain the identity, so it is not a subgroup");
  for (auto a : sub) {
    if (!in[g.inv(a)]) throw GroupError("subset is not closed under inverses, so it is not a subgroup");
    for (auto b : sub)
      if (!in[g.mul(a, b)]) throw GroupError("subset is not closed under products, so it is not a subgroup");
  }
}

std::vector<std::uint32_t> members_of(const FiniteGroup& g, const SubgroupSpec& sub) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < g.size(); ++i)
    if (sub.contains(FiniteGroup::element(i))) out.push_back(i);
  return out;
}

}  // namespace

SupernormalityReport is_supernormal_finite(const FiniteGroup& h, std::span<const std::uint32_t> sub) {
  require_subgroup(h, sub);
  std::vector<std::vector<std::uint32_t>> tables;
  for (auto y : sub) tables.push_back(conjugation_table(h, y));
  SupernormalityReport r;
  for (std::uint32_t x = 0; x < h.size(); ++x) {
    const auto tx = conjugation_table(h, x);
    std::optional<std::uint32_t> match;
    for (std::size_t k = 0; k < sub.size() && !match; ++k)
      if (tables[k] == tx) match = sub[k];
    if (match) {
      r.matches.push_back({x, *match});
      continue;
    }
    r.supernormal = false;
    ConjugationMismatch m{x, {}};
    for (std::size_t k = 0; k < sub.size(); ++k) {
      auto it = std::mismatch(tx.begin(), tx.end(), tables[k].begin());
      m.refutations.emplace_back(sub[k], static_cast<std::uint32_t>(it.first - tx.begin()));
    }
    r.mismatches.push_back(std::move(m));
  }
  return r;
}

SupernormalityReport is_supernormal_finite(const FiniteGroup& h, const SubgroupSpec& sub) {
  auto members = members_of(h, sub);
  return is_supernormal_finite(h, members);
}

bool verify_supernormality(const FiniteGroup& h, std::span<const std::uint32_t> sub, const SupernormalityReport& r) {
  auto in_sub = [&](std::uint32_t y) { return std::find(sub.begin(), sub.end(), y) != sub.end(); };
  auto conj = [&](std::uint32_t by, std::uint32_t e) { return h.mul(h.mul(h.inv(by), e), by); };
  if (r.matches.size() + r.mismatches.size() != h.size()) return false;
  if (r.supernormal != r.mismatches.empty()) return false;
  for (const auto& m : r.matches) {
    if (!in_sub(m.y)) return false;
    for (std::uint32_t e = 0; e < h.size(); ++e)
      if (conj(m.x, e) != conj(m.y, e)) return false;
  }
  for (const auto& m : r.mismatches) {
    if (m.refutations.size() != sub.size()) return false;
    for (const auto& [y, e] : m.refutations)
      if (!in_sub(y) || conj(m.x, e) == conj(y, e)) return false;
  }
  return true;
}

std::vector<std::uint32_t> center(const FiniteGroup& h) {
  std::vector<std::uint32_t> z;
  for (std::uint32_t a = 0; a < h.size(); ++a) {
    bool central = true;
    for (std::uint32_t b = 0; b < h.size() && central; ++b) central = h.mul(a, b) == h.mul(b, a);
    if (central) z.push_back(a);
  }
  return z;
}

bool supernormal_center_oracle(const FiniteGroup& h, std::span<const std::uint32_t> sub) {
  require_subgroup(h, sub);
  const auto z = center(h);
  std::vector<bool> hit(h.size(), false);
  for (auto y : sub)
    for (auto c : z) hit[h.mul(y, c)] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

SampledSupernormality is_supernormal_sampled(const Group& g, std::span<const Element> xs,
                                             std::span<const Element> candidates, std::span<const Element> hs) {
  SampledSupernormality r;
  for (const auto& x : xs) {
    ++r.xs_tested;
    std::optional<Element> found;
    for (const auto& y : candidates) {
      bool agree = true;
      for (const auto& h : hs)
        if (!(g.conjugate(h, x) == g.conjugate(h, y))) {
          agree = false;
          break;
        }
      if (agree) {
        found = y;
        break;
      }
    }
    if (!found) {
      r.consistent = false;
      r.unmatched_x = x;
      return r;
    }
    r.matches.emplace_back(x, *found);
  }
  return r;
}

ProjectionWitness conjugation_witness(const SubgroupSpec& h, const Element& x, std::span<const Index> keep,
                                      std::span<const Element> samples) {
  const auto& g = h.ambient();
  if (!h.contains(x)) throw GroupError(g.format(x) + " is not in H");
  ProjectionWitness w;
  w.y = g.project(x, keep);
  auto check = [&](const Element& e) {
    ++w.checked;
    if (!(g.conjugate(e, x) == g.conjugate(e, w.y))) {
      w.ok = false;
      w.violating_h = e;
      return false;
    }
    return true;
  };
  if (g.is_finite()) {
    w.exhaustive = true;
    auto stream = h.enumerate();
    while (auto e = stream.next())
      if (!check(*e)) return w;
  } else {
    for (const auto& e : samples) {
      if (!h.contains(e)) throw GroupError("sample " + g.format(e) + " is not in H");
      if (!check(e)) return w;
    }
  }
  return w;
}

}  // namespace algclosure
