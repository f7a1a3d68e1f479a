#include "algclosure/algsets.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace algclosure {

namespace {

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

std::string key_of(const Subset& s) {
  std::string k;
  boost::to_string(s, k);
  return k;
}

}  // namespace

Subset make_subset(const FiniteGroup& g, std::span<const std::uint32_t> members) {
  Subset s(g.size());
  for (auto m : members) {
    if (m >= g.size()) throw GroupError("subset member out of range");
    s.set(m);
  }
  return s;
}

std::vector<std::uint32_t> subset_members(const Subset& s) {
  std::vector<std::uint32_t> out;
  for (auto i = s.find_first(); i != Subset::npos; i = s.find_next(i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::span<const std::uint32_t> WordFunctionMonoid::values(std::size_t i) const {
  const auto n = group_->size();
  return {table_.data() + i * n, n};
}

Word WordFunctionMonoid::witness(std::size_t i) const {
  std::vector<std::uint32_t> rev;
  for (auto k = static_cast<std::int64_t>(i); parent_[k] >= 0; k = parent_[k]) rev.push_back(letter_[k]);
  Word w;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    if (*it == 0) {
      w.letters.emplace_back(Variable{1});
    } else if (*it == 1) {
      w.letters.emplace_back(Variable{-1});
    } else {
      w.letters.emplace_back(Constant{FiniteGroup::element(*it - 2)});
    }
  }
  return w;
}

WordFunctionMonoid word_function_monoid(std::shared_ptr<const FiniteGroup> g, std::size_t cap) {
  WordFunctionMonoid m;
  m.group_ = g;
  const auto n = g->size();
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VectorHash> seen;

  auto add = [&](std::vector<std::uint32_t> f, std::int64_t parent, std::uint32_t letter, std::uint32_t depth) {
    if (seen.count(f)) return;
    if (m.parent_.size() >= cap) {
      throw BudgetExceeded("word-function monoid of " + g->describe() + " exceeds " + std::to_string(cap) + " maps");
    }
    seen.emplace(f, static_cast<std::uint32_t>(m.parent_.size()));
    m.table_.insert(m.table_.end(), f.begin(), f.end());
    m.parent_.push_back(parent);
    m.letter_.push_back(letter);
    m.depth_.push_back(depth);
  };

  add(std::vector<std::uint32_t>(n, 0), -1, 0, 0);
  std::vector<std::uint32_t> f(n);
  for (std::size_t i = 0; i < m.parent_.size(); ++i) {
    const auto depth = m.depth_[i] + 1;
    for (std::uint32_t letter = 0; letter < n + 2; ++letter) {
      for (std::uint32_t x = 0; x < n; ++x) {
        auto cur = m.table_[i * n + x];
        std::uint32_t right = letter == 0 ? x : letter == 1 ? g->inv(x) : letter - 2;
        f[x] = g->mul(cur, right);
      }
      add(f, static_cast<std::int64_t>(i), letter, depth);
    }
  }
  return m;
}

Subset elementary_solution_set(const FiniteGroup& g, const Word& w) {
  Subset s(g.size());
  for (std::uint32_t x = 0; x < g.size(); ++x)
    if (g.is_identity(evaluate_word(w, g, FiniteGroup::element(x)))) s.set(x);
  return s;
}

ElementaryFamily::ElementaryFamily(std::shared_ptr<const FiniteGroup> g, std::size_t cap) : group_(std::move(g)) {
  auto monoid = word_function_monoid(group_, cap);
  monoid_size_ = monoid.size();
  const auto n = group_->size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < monoid.size(); ++i) {
    Subset s(n);
    auto vals = monoid.values(i);
    for (std::uint32_t x = 0; x < n; ++x)
      if (vals[x] == 0) s.set(x);
    if (index.emplace(key_of(s), sets_.size()).second) sets_.push_back({std::move(s), monoid.witness(i)});
  }
  hull_.assign(n, Subset(n).set());
  for (const auto& e : sets_)
    for (auto a = e.members.find_first(); a != Subset::npos; a = e.members.find_next(a)) hull_[a] &= e.members;
}

ClosureResult algebraic_closure_finite(const ElementaryFamily& family, const Subset& a) {
  const auto& g = family.group();
  if (a.size() != g.size()) throw GroupError("subset size does not match the group order");
  ClosureResult r{a, Subset(g.size()), {}};
  for (auto m = a.find_first(); m != Subset::npos; m = a.find_next(m)) r.closure |= family.hull(static_cast<std::uint32_t>(m));

  for (std::uint32_t y = 0; y < g.size(); ++y) {
    if (r.closure.test(y)) continue;
    ExclusionCertificate cert{y, {}};
    for (auto m = a.find_first(); m != Subset::npos; m = a.find_next(m)) {
      for (const auto& e : family.sets()) {
        if (e.members.test(m) && !e.members.test(y)) {
          cert.cover.emplace_back(static_cast<std::uint32_t>(m), e.witness);
          break;
        }
      }
    }
    r.certificates.push_back(std::move(cert));
  }
  return r;
}

bool verify_certificate(const FiniteGroup& g, const Subset& a, const ExclusionCertificate& cert) {
  const auto y = FiniteGroup::element(cert.excluded);
  std::vector<bool> covered(g.size(), false);
  for (const auto& [member, word] : cert.cover) {
    if (g.is_identity(evaluate_word(word, g, y))) return false;
    // Every element the word vanishes on is in its solution set; record all
    // members of A it covers.
    for (auto m = a.find_first(); m != Subset::npos; m = a.find_next(m))
      if (g.is_identity(evaluate_word(word, g, FiniteGroup::element(static_cast<std::uint32_t>(m))))) covered[m] = true;
    if (!covered[member]) return false;
  }
  for (auto m = a.find_first(); m != Subset::npos; m = a.find_next(m))
    if (!covered[m]) return false;
  return true;
}

bool verify_closure_result(const FiniteGroup& g, const ClosureResult& result) {
  if (!result.input.is_subset_of(result.closure)) return false;
  std::size_t expected = g.size() - result.closure.count();
  if (result.certificates.size() != expected) return false;
  for (const auto& cert : result.certificates) {
    if (result.closure.test(cert.excluded)) return false;
    if (!verify_certificate(g, result.input, cert)) return false;
  }
  return true;
}

Subset translate_subset(const FiniteGroup& g, std::uint32_t b, const Subset& a) {
  Subset out(g.size());
  auto binv = g.inv(b);
  for (auto m = a.find_first(); m != Subset::npos; m = a.find_next(m)) out.set(g.mul(binv, static_cast<std::uint32_t>(m)));
  return out;
}

SetSpec translate_set(const GroupHandle& g, const Element& b, const SetSpec& a) {
  if (!g->is_valid(b)) throw GroupError("translation element not valid in " + g->describe());
  auto binv = g->invert_unchecked(b);
  auto inner = a;
  auto group = g;
  return SetSpec(
      g,
      [group, b, inner](const Element& x) { return group->is_valid(x) && inner.contains(group->multiply_unchecked(b, x)); },
      [group, binv, inner]() {
        auto src = std::make_shared<ElementStream>(inner.enumerate());
        return ElementStream([group, binv, src]() -> std::optional<Element> {
          auto e = src->next();
          if (!e) return std::nullopt;
          return group->multiply_unchecked(binv, *e);
        });
      },
      a.is_finite(), g->format(b) + "^-1 (" + a.description() + ")");
}

}  // namespace algclosure
