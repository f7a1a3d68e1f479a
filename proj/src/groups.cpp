#include "algclosure/group.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace algclosure {

namespace {

std::int64_t parse_int(std::string_view token, std::string_view what) {
  std::int64_t v = 0;
  auto first = token.data();
  auto last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw GroupError("not " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return v;
}

std::int64_t integer_at_position(std::uint64_t p) {
  if (p == 0) return 0;
  auto k = static_cast<std::int64_t>((p + 1) / 2);
  return (p % 2 == 1) ? k : -k;
}

// Splits on `sep` at bracket depth zero.
std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '{' || c == '[') ++depth;
    if (c == ')' || c == '}' || c == ']') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

/// Walks the compositions of a level sum into K bounded parts in
/// descending lexicographic order.
class CompositionWalker {
 public:
  explicit CompositionWalker(std::vector<std::optional<std::uint64_t>> caps)
      : caps_(std::move(caps)), suffix_(caps_.size() + 1, 0) {
    for (std::size_t i = caps_.size(); i-- > 0;) {
      if (!caps_[i] || !suffix_[i + 1]) {
        suffix_[i] = std::nullopt;
      } else {
        suffix_[i] = *caps_[i] + *suffix_[i + 1];
      }
    }
  }

  std::optional<std::uint64_t> total() const { return suffix_[0]; }

  bool first(std::uint64_t sum, std::vector<std::uint64_t>& t) const {
    t.assign(caps_.size(), 0);
    return fill(t, 0, sum);
  }

  bool next(std::vector<std::uint64_t>& t) const {
    if (t.size() < 2) return false;
    std::uint64_t tail = 0;
    for (std::size_t i = t.size() - 1; i-- > 0;) {
      tail += t[i + 1];
      if (t[i] > 0 && (!suffix_[i + 1] || *suffix_[i + 1] >= tail + 1)) {
        --t[i];
        return fill(t, i + 1, tail + 1);
      }
    }
    return false;
  }

 private:
  bool fill(std::vector<std::uint64_t>& t, std::size_t from, std::uint64_t r) const {
    for (std::size_t i = from; i < t.size(); ++i) {
      auto take = caps_[i] ? std::min(*caps_[i], r) : r;
      t[i] = take;
      r -= take;
    }
    return r == 0;
  }

  std::vector<std::optional<std::uint64_t>> caps_;
  std::vector<std::optional<std::uint64_t>> suffix_;
};

/// Lazily cached prefix of a group's enumeration: position -> element.
class PositionSource {
 public:
  explicit PositionSource(const Group& g) : stream_(g.enumerate()) {
    if (auto n = g.order()) cap_ = *n - 1;
  }
  const Element& at(std::uint64_t p) {
    while (cache_.size() <= p) {
      auto e = stream_.next();
      if (!e) throw GroupError("component enumeration ended early");
      cache_.push_back(std::move(*e));
    }
    return cache_[p];
  }
  std::optional<std::uint64_t> cap() const { return cap_; }

 private:
  ElementStream stream_;
  std::vector<Element> cache_;
  std::optional<std::uint64_t> cap_;
};

/// Dovetail over a fixed list of coordinates: levels by position sum.
ElementStream dovetail_stream(
    std::vector<std::optional<std::uint64_t>> caps,
    std::function<Element(const std::vector<std::uint64_t>&)> build) {
  struct State {
    State(CompositionWalker w, std::function<Element(const std::vector<std::uint64_t>&)> b)
        : walker(std::move(w)), build(std::move(b)) {}
    CompositionWalker walker;
    std::function<Element(const std::vector<std::uint64_t>&)> build;
    std::vector<std::uint64_t> tuple;
    std::uint64_t level = 0;
    bool started = false;
    bool done = false;
  };
  auto st = std::make_shared<State>(CompositionWalker(std::move(caps)), std::move(build));
  return ElementStream([st]() -> std::optional<Element> {
    if (st->done) return std::nullopt;
    if (!st->started) {
      st->started = true;
      st->walker.first(0, st->tuple);
      return st->build(st->tuple);
    }
    if (st->walker.next(st->tuple)) return st->build(st->tuple);
    ++st->level;
    if (auto total = st->walker.total(); total && st->level > *total) {
      st->done = true;
      return std::nullopt;
    }
    if (!st->walker.first(st->level, st->tuple)) {
      st->done = true;
      return std::nullopt;
    }
    return st->build(st->tuple);
  });
}

}  // namespace

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::finite_table: return "finite-table";
    case GroupKind::integers: return "integers";
    case GroupKind::fg_abelian: return "fg-abelian";
    case GroupKind::restricted_product: return "restricted-product";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Group

void Group::require_valid(const Element& e) const {
  if (!is_valid(e)) {
    std::ostringstream os;
    os << "element [";
    for (std::size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
    os << "] is not valid in " << describe();
    throw GroupError(os.str());
  }
}

Element Group::multiply(const Element& a, const Element& b) const {
  require_valid(a);
  require_valid(b);
  return multiply_unchecked(a, b);
}

Element Group::invert(const Element& a) const {
  require_valid(a);
  return invert_unchecked(a);
}

Element Group::conjugate(const Element& x, const Element& by) const {
  require_valid(x);
  require_valid(by);
  return multiply_unchecked(multiply_unchecked(invert_unchecked(by), x), by);
}

std::vector<Index> Group::support(const Element& e) const {
  require_valid(e);
  if (is_identity(e)) return {};
  return {1};
}

Element Group::project(const Element& e, std::span<const Index> keep) const {
  require_valid(e);
  if (std::find(keep.begin(), keep.end(), Index{1}) != keep.end()) return e;
  return identity();
}

ElementStream Group::enumerate_subproduct(std::span<const Index> indices) const {
  if (std::find(indices.begin(), indices.end(), Index{1}) != indices.end()) return enumerate();
  auto done = std::make_shared<bool>(false);
  auto id = identity();
  return ElementStream([done, id]() -> std::optional<Element> {
    if (*done) return std::nullopt;
    *done = true;
    return id;
  });
}

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup::FiniteGroup(std::string label, std::vector<std::string> names,
                         std::vector<std::vector<std::uint32_t>> table)
    : label_(std::move(label)), names_(std::move(names)) {
  const auto n = static_cast<std::uint32_t>(names_.size());
  if (n == 0) throw GroupError("finite group needs at least one element");
  if (table.size() != n) throw GroupError("Cayley table has wrong row count");
  for (const auto& row : table) {
    if (row.size() != n) throw GroupError("Cayley table has wrong column count");
    for (auto v : row)
      if (v >= n) throw GroupError("Cayley table entry out of range");
  }
  for (const auto& nm : names_) {
    if (nm.empty() || nm.find_first_of(" \t\n^,:{}") != std::string::npos) {
      throw GroupError("invalid element name '" + nm + "'");
    }
  }

  std::optional<std::uint32_t> id;
  for (std::uint32_t e = 0; e < n && !id; ++e) {
    bool ok = true;
    for (std::uint32_t x = 0; x < n && ok; ++x) ok = table[e][x] == x && table[x][e] == x;
    if (ok) id = e;
  }
  if (!id) throw GroupError("Cayley table has no identity");

  // Relabel so that the identity has index 0.
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::swap(perm[0], perm[*id]);  // new index -> old index
  std::vector<std::uint32_t> old_to_new(n);
  for (std::uint32_t i = 0; i < n; ++i) old_to_new[perm[i]] = i;
  std::vector<std::string> renamed(n);
  for (std::uint32_t i = 0; i < n; ++i) renamed[i] = names_[perm[i]];
  names_ = std::move(renamed);

  table_.resize(static_cast<std::size_t>(n) * n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) table_[a * n + b] = old_to_new[table[perm[a]][perm[b]]];

  for (std::uint32_t a = 0; a < n; ++a) {
    std::vector<bool> row(n, false), col(n, false);
    for (std::uint32_t b = 0; b < n; ++b) {
      row[mul(a, b)] = true;
      col[mul(b, a)] = true;
    }
    if (std::count(row.begin(), row.end(), true) != n || std::count(col.begin(), col.end(), true) != n) {
      throw GroupError("Cayley table of " + label_ + " is not a Latin square");
    }
  }

  inverse_.assign(n, 0);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (mul(a, b) == 0) inverse_[a] = b;

  for (std::uint32_t a = 0; a < n && abelian_; ++a)
    for (std::uint32_t b = 0; b < n && abelian_; ++b) abelian_ = mul(a, b) == mul(b, a);

  for (std::uint32_t i = 0; i < n; ++i) {
    if (!by_name_.emplace(names_[i], i).second) throw GroupError("duplicate element name '" + names_[i] + "'");
  }

  if (n <= 128 && !verify_group_axioms(*this)) throw GroupError("Cayley table of " + label_ + " is not associative");
}

bool FiniteGroup::is_valid(const Element& e) const {
  return e.size() == 1 && e[0] >= 0 && e[0] < static_cast<std::int64_t>(size());
}

Element FiniteGroup::multiply_unchecked(const Element& a, const Element& b) const {
  return element(mul(index_of(a), index_of(b)));
}

Element FiniteGroup::invert_unchecked(const Element& a) const { return element(inv(index_of(a))); }

ElementStream FiniteGroup::enumerate() const {
  auto next = std::make_shared<std::uint32_t>(0);
  auto n = size();
  return ElementStream([next, n]() -> std::optional<Element> {
    if (*next >= n) return std::nullopt;
    return element((*next)++);
  });
}

std::string FiniteGroup::format(const Element& e) const {
  require_valid(e);
  return names_[index_of(e)];
}

Element FiniteGroup::parse(std::string_view token) const {
  auto it = by_name_.find(token);
  if (it == by_name_.end()) throw GroupError("unknown element '" + std::string(token) + "' in " + label_);
  return element(it->second);
}

// ---------------------------------------------------------------------------
// IntegerGroup

Element IntegerGroup::multiply_unchecked(const Element& a, const Element& b) const {
  return Element{a[0] + b[0]};
}

Element IntegerGroup::invert_unchecked(const Element& a) const { return Element{-a[0]}; }

ElementStream IntegerGroup::enumerate() const {
  auto pos = std::make_shared<std::uint64_t>(0);
  return ElementStream([pos]() -> std::optional<Element> { return Element{integer_at_position((*pos)++)}; });
}

std::string IntegerGroup::format(const Element& e) const {
  require_valid(e);
  return std::to_string(e[0]);
}

Element IntegerGroup::parse(std::string_view token) const { return Element{parse_int(token, "an integer")}; }

// ---------------------------------------------------------------------------
// FgAbelianGroup

FgAbelianGroup::FgAbelianGroup(std::uint32_t rank, std::vector<std::int64_t> torsion)
    : rank_(rank), torsion_(std::move(torsion)) {
  for (auto t : torsion_)
    if (t < 2) throw GroupError("torsion orders must be >= 2");
  if (rank_ == 0 && torsion_.empty()) throw GroupError("fg-abelian group needs rank or torsion");
}

std::string FgAbelianGroup::describe() const {
  std::ostringstream os;
  os << "Z^" << rank_;
  for (auto t : torsion_) os << " x Z_" << t;
  return os.str();
}

Element FgAbelianGroup::identity() const {
  Element::Storage s(width(), 0);
  return Element(std::move(s));
}

bool FgAbelianGroup::is_valid(const Element& e) const {
  if (e.size() != width()) return false;
  for (std::size_t i = 0; i < torsion_.size(); ++i) {
    auto v = e[rank_ + i];
    if (v < 0 || v >= torsion_[i]) return false;
  }
  return true;
}

std::optional<std::uint64_t> FgAbelianGroup::order() const {
  if (rank_ > 0) return std::nullopt;
  std::uint64_t n = 1;
  for (auto t : torsion_) n *= static_cast<std::uint64_t>(t);
  return n;
}

std::int64_t FgAbelianGroup::reduce(std::size_t coord, std::int64_t v) const {
  if (coord < rank_) return v;
  auto t = torsion_[coord - rank_];
  return ((v % t) + t) % t;
}

Element FgAbelianGroup::multiply_unchecked(const Element& a, const Element& b) const {
  Element::Storage s(width());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = reduce(i, a[i] + b[i]);
  return Element(std::move(s));
}

Element FgAbelianGroup::invert_unchecked(const Element& a) const {
  Element::Storage s(width());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = reduce(i, -a[i]);
  return Element(std::move(s));
}

ElementStream FgAbelianGroup::enumerate() const {
  std::vector<std::optional<std::uint64_t>> caps;
  for (std::uint32_t i = 0; i < rank_; ++i) caps.emplace_back(std::nullopt);
  for (auto t : torsion_) caps.emplace_back(static_cast<std::uint64_t>(t - 1));
  auto rank = rank_;
  return dovetail_stream(std::move(caps), [rank](const std::vector<std::uint64_t>& t) {
    Element::Storage s(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      s[i] = i < rank ? integer_at_position(t[i]) : static_cast<std::int64_t>(t[i]);
    return Element(std::move(s));
  });
}

std::string FgAbelianGroup::format(const Element& e) const {
  require_valid(e);
  std::string out = "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(e[i]);
  }
  return out + ")";
}

Element FgAbelianGroup::parse(std::string_view token) const {
  auto body = token;
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  auto parts = split_top_level(body, ',');
  if (parts.size() != width()) throw GroupError("expected " + std::to_string(width()) + " coordinates in '" + std::string(token) + "'");
  Element::Storage s(width());
  for (std::size_t i = 0; i < parts.size(); ++i) s[i] = parse_int(parts[i], "a coordinate");
  Element e(std::move(s));
  require_valid(e);
  return e;
}

// ---------------------------------------------------------------------------
// RestrictedProduct

RestrictedProduct::RestrictedProduct(std::vector<GroupHandle> components) : components_(std::move(components)) {
  if (components_.empty()) throw GroupError("product needs at least one component");
  for (const auto& c : components_) {
    if (!c) throw GroupError("null product component");
    if (c->kind() == GroupKind::restricted_product) throw GroupError("nested products are not supported");
  }
}

RestrictedProduct::RestrictedProduct(GroupHandle component, bool copies)
    : components_{std::move(component)}, copies_(copies) {
  if (components_[0]->kind() == GroupKind::restricted_product) throw GroupError("nested products are not supported");
  if (components_[0]->order() == std::uint64_t{1}) throw GroupError("countable copies of the trivial group");
}

std::shared_ptr<RestrictedProduct> RestrictedProduct::countable_copies(GroupHandle component) {
  return std::shared_ptr<RestrictedProduct>(new RestrictedProduct(std::move(component), true));
}

std::string RestrictedProduct::describe() const {
  if (copies_) return "(+)_{n>=1} " + components_[0]->describe();
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += " x ";
    out += components_[i]->describe();
  }
  return out;
}

bool RestrictedProduct::has_index(Index index) const {
  return index >= 1 && (copies_ || index <= components_.size());
}

const GroupHandle& RestrictedProduct::component_handle(Index index) const {
  if (!has_index(index)) throw GroupError("product index " + std::to_string(index) + " out of range");
  return copies_ ? components_[0] : components_[index - 1];
}

const Group& RestrictedProduct::component(Index index) const { return *component_handle(index); }

std::optional<Index> RestrictedProduct::component_count() const {
  if (copies_) return std::nullopt;
  return static_cast<Index>(components_.size());
}

std::vector<std::pair<Index, Element>> RestrictedProduct::entries(const Element& e) const {
  std::vector<std::pair<Index, Element>> out;
  std::size_t i = 0;
  while (i < e.size()) {
    auto idx = e[i];
    if (idx < 1 || !has_index(static_cast<Index>(idx))) throw GroupError("bad product index in encoding");
    const auto& comp = component(static_cast<Index>(idx));
    auto w = comp.width();
    if (i + 1 + w > e.size()) throw GroupError("truncated product encoding");
    Element::Storage s(e.storage().begin() + static_cast<std::ptrdiff_t>(i + 1),
                       e.storage().begin() + static_cast<std::ptrdiff_t>(i + 1 + w));
    out.emplace_back(static_cast<Index>(idx), Element(std::move(s)));
    i += 1 + w;
  }
  return out;
}

bool RestrictedProduct::is_valid(const Element& e) const {
  try {
    auto es = entries(e);
    std::int64_t prev = 0;
    for (const auto& [idx, v] : es) {
      if (static_cast<std::int64_t>(idx) <= prev) return false;
      prev = idx;
      const auto& comp = component(idx);
      if (!comp.is_valid(v) || comp.is_identity(v)) return false;
    }
    return true;
  } catch (const GroupError&) {
    return false;
  }
}

Element RestrictedProduct::make(std::vector<std::pair<Index, Element>> entries) const {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Element::Storage s;
  Index prev = 0;
  for (const auto& [idx, v] : entries) {
    if (idx == prev) throw GroupError("duplicate product index " + std::to_string(idx));
    prev = idx;
    const auto& comp = component(idx);
    if (!comp.is_valid(v)) throw GroupError("invalid component value at index " + std::to_string(idx));
    if (comp.is_identity(v)) continue;
    s.push_back(idx);
    s.insert(s.end(), v.storage().begin(), v.storage().end());
  }
  return Element(std::move(s));
}

Element RestrictedProduct::coordinate(const Element& e, Index index) const {
  for (auto& [idx, v] : entries(e))
    if (idx == index) return v;
  return component(index).identity();
}

Element RestrictedProduct::multiply_unchecked(const Element& a, const Element& b) const {
  Element::Storage s;
  std::size_t i = 0, j = 0;
  auto append = [&](const Element& src, std::size_t at, std::size_t w) {
    s.insert(s.end(), src.storage().begin() + static_cast<std::ptrdiff_t>(at),
             src.storage().begin() + static_cast<std::ptrdiff_t>(at + 1 + w));
  };
  while (i < a.size() || j < b.size()) {
    auto ia = i < a.size() ? a[i] : INT64_MAX;
    auto ib = j < b.size() ? b[j] : INT64_MAX;
    if (ia < ib) {
      auto w = component(static_cast<Index>(ia)).width();
      append(a, i, w);
      i += 1 + w;
    } else if (ib < ia) {
      auto w = component(static_cast<Index>(ib)).width();
      append(b, j, w);
      j += 1 + w;
    } else {
      const auto& comp = component(static_cast<Index>(ia));
      auto w = comp.width();
      Element::Storage va(a.storage().begin() + static_cast<std::ptrdiff_t>(i + 1),
                          a.storage().begin() + static_cast<std::ptrdiff_t>(i + 1 + w));
      Element::Storage vb(b.storage().begin() + static_cast<std::ptrdiff_t>(j + 1),
                          b.storage().begin() + static_cast<std::ptrdiff_t>(j + 1 + w));
      auto prod = comp.multiply_unchecked(Element(std::move(va)), Element(std::move(vb)));
      if (!comp.is_identity(prod)) {
        s.push_back(ia);
        s.insert(s.end(), prod.storage().begin(), prod.storage().end());
      }
      i += 1 + w;
      j += 1 + w;
    }
  }
  return Element(std::move(s));
}

Element RestrictedProduct::invert_unchecked(const Element& a) const {
  Element::Storage s;
  for (auto& [idx, v] : entries(a)) {
    auto inv = component(idx).invert_unchecked(v);
    s.push_back(idx);
    s.insert(s.end(), inv.storage().begin(), inv.storage().end());
  }
  return Element(std::move(s));
}

std::optional<std::uint64_t> RestrictedProduct::order() const {
  if (copies_) return std::nullopt;
  std::uint64_t n = 1;
  for (const auto& c : components_) {
    auto o = c->order();
    if (!o) return std::nullopt;
    n *= *o;
  }
  return n;
}

bool RestrictedProduct::is_abelian() const {
  return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c->is_abelian(); });
}

std::size_t RestrictedProduct::width() const {
  throw GroupError("products cannot be product components");
}

std::vector<Index> RestrictedProduct::support(const Element& e) const {
  require_valid(e);
  std::vector<Index> out;
  for (auto& [idx, v] : entries(e)) out.push_back(idx);
  return out;
}

Element RestrictedProduct::project(const Element& e, std::span<const Index> keep) const {
  require_valid(e);
  std::vector<std::pair<Index, Element>> kept;
  for (auto& [idx, v] : entries(e))
    if (std::find(keep.begin(), keep.end(), idx) != keep.end()) kept.emplace_back(idx, v);
  return make(std::move(kept));
}

ElementStream RestrictedProduct::enumerate_subproduct(std::span<const Index> indices) const {
  std::vector<Index> idx(indices.begin(), indices.end());
  for (auto i : idx)
    if (!has_index(i)) throw GroupError("product index " + std::to_string(i) + " out of range");
  auto sources = std::make_shared<std::vector<PositionSource>>();
  std::vector<std::optional<std::uint64_t>> caps;
  for (auto i : idx) {
    sources->emplace_back(component(i));
    caps.push_back(sources->back().cap());
  }
  auto self = this;
  return dovetail_stream(std::move(caps), [self, sources, idx](const std::vector<std::uint64_t>& t) {
    std::vector<std::pair<Index, Element>> entries;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] > 0) entries.emplace_back(idx[k], (*sources)[k].at(t[k]));
    return self->make(std::move(entries));
  });
}

ElementStream RestrictedProduct::enumerate() const {
  if (!copies_) {
    std::vector<Index> all(components_.size());
    std::iota(all.begin(), all.end(), Index{1});
    return enumerate_subproduct(all);
  }
  // Countable copies: level = sum of positions + largest support index.
  struct State {
    explicit State(const Group& g) : source(g), cap(source.cap()) {}
    PositionSource source;
    std::optional<std::uint64_t> cap;
    std::uint64_t level = 0;
    std::uint64_t max_index = 0;
    std::optional<CompositionWalker> walker;
    std::vector<std::uint64_t> tuple;
    bool emitted_identity = false;
  };
  auto st = std::make_shared<State>(*components_[0]);
  auto self = this;
  auto build = [self, st]() {
    std::vector<std::pair<Index, Element>> entries;
    for (std::size_t k = 0; k < st->tuple.size(); ++k) {
      auto pos = st->tuple[k] + (k + 1 == st->tuple.size() ? 1 : 0);
      if (pos > 0) entries.emplace_back(static_cast<Index>(k + 1), st->source.at(pos));
    }
    return self->make(std::move(entries));
  };
  // Positions for coordinates 1..m-1 use the full cap; coordinate m is
  // shifted by one so it is never the identity.
  auto start_group = [st](std::uint64_t m) {
    std::vector<std::optional<std::uint64_t>> caps(m, st->cap);
    if (st->cap) caps.back() = *st->cap - 1;
    st->walker.emplace(std::move(caps));
    return st->walker->first(st->level - m - 1, st->tuple);
  };
  return ElementStream([st, build, start_group]() -> std::optional<Element> {
    if (!st->emitted_identity) {
      st->emitted_identity = true;
      st->level = 1;
      st->max_index = 0;
      return Element{};
    }
    if (st->walker && st->walker->next(st->tuple)) return build();
    while (true) {
      ++st->max_index;
      if (st->max_index + 1 > st->level) {
        ++st->level;
        st->max_index = 1;
      }
      // level = (sum of positions) + max index, with sum >= 1.
      if (start_group(st->max_index)) return build();
    }
  });
}

std::string RestrictedProduct::format(const Element& e) const {
  require_valid(e);
  std::string out = "{";
  bool first = true;
  for (auto& [idx, v] : entries(e)) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(idx) + ":" + component(idx).format(v);
  }
  return out + "}";
}

Element RestrictedProduct::parse(std::string_view token) const {
  if (token.size() < 2 || token.front() != '{' || token.back() != '}') {
    throw GroupError("product element must look like {i:v,...}: '" + std::string(token) + "'");
  }
  auto body = token.substr(1, token.size() - 2);
  std::vector<std::pair<Index, Element>> entries;
  if (!body.empty()) {
    for (auto part : split_top_level(body, ',')) {
      auto colon = part.find(':');
      if (colon == std::string_view::npos) throw GroupError("missing ':' in '" + std::string(part) + "'");
      auto idx = parse_int(part.substr(0, colon), "a product index");
      if (idx < 1 || !has_index(static_cast<Index>(idx))) throw GroupError("product index out of range in '" + std::string(part) + "'");
      entries.emplace_back(static_cast<Index>(idx), component(static_cast<Index>(idx)).parse(part.substr(colon + 1)));
    }
  }
  return make(std::move(entries));
}

// ---------------------------------------------------------------------------
// SubgroupSpec / SetSpec

SubgroupSpec::SubgroupSpec(GroupHandle ambient) : ambient_(std::move(ambient)), description_("whole group") {}

SubgroupSpec::SubgroupSpec(GroupHandle ambient, Predicate member, std::string description,
                           std::vector<Element> generators)
    : ambient_(std::move(ambient)),
      member_(std::move(member)),
      description_(std::move(description)),
      generators_(std::move(generators)) {
  if (!contains(ambient_->identity())) throw GroupError("subgroup does not contain the identity");
}

bool SubgroupSpec::contains(const Element& e) const {
  if (!ambient_->is_valid(e)) return false;
  return !member_ || member_(e);
}

ElementStream SubgroupSpec::enumerate() const {
  if (!member_) return ambient_->enumerate();
  auto inner = std::make_shared<ElementStream>(ambient_->enumerate());
  auto member = member_;
  return ElementStream([inner, member]() -> std::optional<Element> {
    while (auto e = inner->next())
      if (member(*e)) return e;
    return std::nullopt;
  });
}

ElementStream SubgroupSpec::enumerate_subproduct(std::span<const Index> indices) const {
  auto inner = std::make_shared<ElementStream>(ambient_->enumerate_subproduct(indices));
  if (!member_) return ElementStream([inner] { return inner->next(); });
  auto member = member_;
  return ElementStream([inner, member]() -> std::optional<Element> {
    while (auto e = inner->next())
      if (member(*e)) return e;
    return std::nullopt;
  });
}

std::optional<std::string> SubgroupSpec::check_closure(std::span<const Element> sample) const {
  const auto& g = *ambient_;
  if (!contains(g.identity())) return "identity is not a member";
  for (const auto& a : sample) {
    if (!contains(a)) continue;
    if (!contains(g.invert_unchecked(a))) return "not closed under inverse at " + g.format(a);
    for (const auto& b : sample) {
      if (!contains(b)) continue;
      if (!contains(g.multiply_unchecked(a, b)))
        return "not closed under product at " + g.format(a) + " * " + g.format(b);
    }
  }
  return std::nullopt;
}

SetSpec::SetSpec(GroupHandle group, Predicate member, StreamFactory stream, bool finite, std::string description)
    : group_(std::move(group)),
      member_(std::move(member)),
      stream_(std::move(stream)),
      finite_(finite),
      description_(std::move(description)) {}

SetSpec SetSpec::from_elements(GroupHandle group, std::vector<Element> elements, std::string description) {
  std::vector<Element> uniq;
  std::unordered_map<Element, bool, ElementHash> seen;
  for (auto& e : elements) {
    if (!group->is_valid(e)) throw GroupError("set element not valid in " + group->describe());
    if (seen.emplace(e, true).second) uniq.push_back(e);
  }
  auto shared = std::make_shared<const std::vector<Element>>(std::move(uniq));
  auto lookup = std::make_shared<const std::unordered_map<Element, bool, ElementHash>>(std::move(seen));
  if (description.empty()) {
    description = "{";
    for (std::size_t i = 0; i < shared->size(); ++i) description += (i ? "," : "") + group->format((*shared)[i]);
    description += "}";
  }
  return SetSpec(
      std::move(group), [lookup](const Element& e) { return lookup->count(e) > 0; },
      [shared]() {
        auto pos = std::make_shared<std::size_t>(0);
        return ElementStream([shared, pos]() -> std::optional<Element> {
          if (*pos >= shared->size()) return std::nullopt;
          return (*shared)[(*pos)++];
        });
      },
      true, std::move(description));
}

SetSpec SetSpec::filtered(GroupHandle group, Predicate member, std::string description) {
  bool finite = group->is_finite();
  auto g = group;
  auto pred = member;
  return SetSpec(
      std::move(group), [g, pred](const Element& e) { return g->is_valid(e) && pred(e); },
      [g, pred]() {
        auto inner = std::make_shared<ElementStream>(g->enumerate());
        return ElementStream([inner, pred]() -> std::optional<Element> {
          while (auto e = inner->next())
            if (pred(*e)) return e;
          return std::nullopt;
        });
      },
      finite, std::move(description));
}

std::vector<Element> SetSpec::elements(std::size_t limit) const {
  if (!finite_) throw GroupError("set '" + description_ + "' is not declared finite");
  auto s = enumerate();
  std::vector<Element> out;
  while (auto e = s.next()) {
    if (out.size() >= limit) throw BudgetExceeded("set enumeration exceeded " + std::to_string(limit) + " elements");
    out.push_back(std::move(*e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-group utilities and catalog

std::shared_ptr<const FiniteGroup> tabulate(const Group& g, std::uint64_t max_order) {
  if (auto f = dynamic_cast<const FiniteGroup*>(&g)) return std::make_shared<FiniteGroup>(*f);
  auto n = g.order();
  if (!n) throw GroupError(g.describe() + " is infinite and cannot be tabulated");
  if (*n > max_order) throw BudgetExceeded(g.describe() + " is too large to tabulate");
  std::vector<Element> elems;
  std::unordered_map<Element, std::uint32_t, ElementHash> index;
  auto s = g.enumerate();
  while (auto e = s.next()) {
    index.emplace(*e, static_cast<std::uint32_t>(elems.size()));
    elems.push_back(std::move(*e));
  }
  if (elems.size() != *n) throw GroupError("enumeration of " + g.describe() + " does not match its order");
  std::vector<std::string> names;
  bool plain = true;
  for (const auto& e : elems) {
    names.push_back(g.format(e));
    plain = plain && names.back().find_first_of(" \t\n^,:{}") == std::string::npos;
  }
  if (!plain)
    for (std::size_t i = 0; i < names.size(); ++i) names[i] = "e" + std::to_string(i);
  std::vector<std::vector<std::uint32_t>> table(elems.size(), std::vector<std::uint32_t>(elems.size()));
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = 0; b < elems.size(); ++b) table[a][b] = index.at(g.multiply_unchecked(elems[a], elems[b]));
  return std::make_shared<FiniteGroup>(g.describe(), std::move(names), std::move(table));
}

bool verify_group_axioms(const FiniteGroup& g) {
  const auto n = g.size();
  for (std::uint32_t a = 0; a < n; ++a) {
    if (g.mul(a, 0) != a || g.mul(0, a) != a) return false;
    if (g.mul(a, g.inv(a)) != 0 || g.mul(g.inv(a), a) != 0) return false;
    for (std::uint32_t b = 0; b < n; ++b) {
      auto ab = g.mul(a, b);
      for (std::uint32_t c = 0; c < n; ++c)
        if (g.mul(ab, c) != g.mul(a, g.mul(b, c))) return false;
    }
  }
  return true;
}

bool verify_group_axioms_sampled(const Group& g, std::span<const Element> sample) {
  const auto id = g.identity();
  for (const auto& a : sample) {
    if (!g.is_valid(a)) return false;
    if (g.multiply_unchecked(a, id) != a || g.multiply_unchecked(id, a) != a) return false;
    if (g.multiply_unchecked(a, g.invert_unchecked(a)) != id) return false;
    for (const auto& b : sample) {
      auto ab = g.multiply_unchecked(a, b);
      if (!g.is_valid(ab)) return false;
      for (const auto& c : sample)
        if (g.multiply_unchecked(ab, c) != g.multiply_unchecked(a, g.multiply_unchecked(b, c))) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> generated_subgroup(const FiniteGroup& g, std::span<const std::uint32_t> generators) {
  std::vector<bool> in(g.size(), false);
  std::deque<std::uint32_t> queue{0};
  in[0] = true;
  while (!queue.empty()) {
    auto a = queue.front();
    queue.pop_front();
    for (auto s : generators) {
      for (auto b : {g.mul(a, s), g.mul(a, g.inv(s))}) {
        if (!in[b]) {
          in[b] = true;
          queue.push_back(b);
        }
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < g.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

std::vector<std::vector<std::uint32_t>> all_subgroups(const FiniteGroup& g) {
  std::set<std::vector<std::uint32_t>> seen;
  std::deque<std::vector<std::uint32_t>> queue;
  std::vector<std::uint32_t> trivial{0};
  seen.insert(trivial);
  queue.push_back(trivial);
  while (!queue.empty()) {
    auto h = queue.front();
    queue.pop_front();
    for (std::uint32_t x = 0; x < g.size(); ++x) {
      if (std::binary_search(h.begin(), h.end(), x)) continue;
      auto gens = h;
      gens.push_back(x);
      auto k = generated_subgroup(g, gens);
      if (seen.insert(k).second) queue.push_back(std::move(k));
    }
  }
  std::vector<std::vector<std::uint32_t>> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

std::shared_ptr<const FiniteGroup> cyclic_group(std::uint32_t n) {
  if (n == 0) throw GroupError("cyclic group order must be positive");
  std::vector<std::string> names;
  std::vector<std::vector<std::uint32_t>> table(n, std::vector<std::uint32_t>(n));
  for (std::uint32_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (std::uint32_t j = 0; j < n; ++j) table[i][j] = (i + j) % n;
  }
  return std::make_shared<FiniteGroup>("C" + std::to_string(n), std::move(names), std::move(table));
}

std::shared_ptr<const FiniteGroup> permutation_group(std::string label, std::uint32_t degree,
                                                     const std::vector<std::vector<std::uint32_t>>& generators) {
  using Perm = std::vector<std::uint32_t>;
  for (const auto& p : generators) {
    if (p.size() != degree) throw GroupError("permutation has wrong degree");
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < degree; ++i)
      if (sorted[i] != i) throw GroupError("generator is not a permutation");
  }
  // (a*b)(i) = b(a(i)): apply a first.
  auto compose = [degree](const Perm& a, const Perm& b) {
    Perm c(degree);
    for (std::uint32_t i = 0; i < degree; ++i) c[i] = b[a[i]];
    return c;
  };
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<Perm> elems{id};
  std::map<Perm, std::uint32_t> index{{id, 0}};
  for (std::size_t k = 0; k < elems.size(); ++k) {
    for (const auto& s : generators) {
      auto c = compose(elems[k], s);
      if (index.emplace(c, static_cast<std::uint32_t>(elems.size())).second) elems.push_back(c);
    }
  }
  std::vector<std::string> names;
  for (const auto& p : elems) {
    std::string nm = "p";
    for (std::uint32_t i = 0; i < degree; ++i) {
      if (degree > 10 && i) nm += '.';
      nm += std::to_string(p[i]);
    }
    names.push_back(nm);
  }
  std::vector<std::vector<std::uint32_t>> table(elems.size(), std::vector<std::uint32_t>(elems.size()));
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = 0; b < elems.size(); ++b) table[a][b] = index.at(compose(elems[a], elems[b]));
  return std::make_shared<FiniteGroup>(std::move(label), std::move(names), std::move(table));
}

std::shared_ptr<const FiniteGroup> dihedral_group(std::uint32_t n) {
  if (n < 3) throw GroupError("dihedral group needs n >= 3");
  std::vector<std::uint32_t> r(n), s(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    r[i] = (i + 1) % n;
    s[i] = (n - i) % n;
  }
  return permutation_group("D" + std::to_string(n), n, {r, s});
}

std::shared_ptr<const FiniteGroup> dicyclic_group(std::uint32_t n) {
  if (n < 2) throw GroupError("dicyclic group needs n >= 2");
  const std::uint32_t m = 2 * n;
  // a^i x^k with x^2 = a^n and x a x^-1 = a^-1.
  auto idx = [m](std::uint32_t i, std::uint32_t k) { return k * m + i; };
  std::vector<std::string> names(2 * m);
  for (std::uint32_t k = 0; k < 2; ++k)
    for (std::uint32_t i = 0; i < m; ++i) names[idx(i, k)] = "a" + std::to_string(i) + (k ? "x" : "");
  if (n == 2) names = {"1", "i", "-1", "-i", "j", "k", "-j", "-k"};
  std::vector<std::vector<std::uint32_t>> table(2 * m, std::vector<std::uint32_t>(2 * m));
  for (std::uint32_t k1 = 0; k1 < 2; ++k1)
    for (std::uint32_t i1 = 0; i1 < m; ++i1)
      for (std::uint32_t k2 = 0; k2 < 2; ++k2)
        for (std::uint32_t i2 = 0; i2 < m; ++i2) {
          std::uint32_t i = (i1 + (k1 ? m - i2 : i2) + (k1 && k2 ? n : 0)) % m;
          table[idx(i1, k1)][idx(i2, k2)] = idx(i, k1 ^ k2);
        }
  return std::make_shared<FiniteGroup>(n == 2 ? "Q8" : "Dic" + std::to_string(n), std::move(names), std::move(table));
}

std::shared_ptr<const FiniteGroup> direct_product_table(const FiniteGroup& a, const FiniteGroup& b) {
  const auto na = a.size(), nb = b.size();
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < na; ++i)
    for (std::uint32_t j = 0; j < nb; ++j) names.push_back(a.name(i) + "_" + b.name(j));
  std::vector<std::vector<std::uint32_t>> table(na * nb, std::vector<std::uint32_t>(na * nb));
  for (std::uint32_t i1 = 0; i1 < na; ++i1)
    for (std::uint32_t j1 = 0; j1 < nb; ++j1)
      for (std::uint32_t i2 = 0; i2 < na; ++i2)
        for (std::uint32_t j2 = 0; j2 < nb; ++j2) table[i1 * nb + j1][i2 * nb + j2] = a.mul(i1, i2) * nb + b.mul(j1, j2);
  return std::make_shared<FiniteGroup>(a.describe() + "x" + b.describe(), std::move(names), std::move(table));
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (int n = 1; n <= 12; ++n) out.push_back("C" + std::to_string(n));
  for (const char* nm : {"V4", "S3", "D4", "Q8", "C2xC4", "C2xC2xC2", "C3xC3", "C2xC6", "D5", "D6", "A4", "Dic3"})
    out.emplace_back(nm);
  return out;
}

std::shared_ptr<const FiniteGroup> catalog_group(std::string_view name) {
  auto relabel = [](std::shared_ptr<const FiniteGroup> g, std::string label, std::vector<std::string> names = {}) {
    if (names.empty()) names = g->names();
    std::vector<std::vector<std::uint32_t>> table(g->size(), std::vector<std::uint32_t>(g->size()));
    for (std::uint32_t a = 0; a < g->size(); ++a)
      for (std::uint32_t b = 0; b < g->size(); ++b) table[a][b] = g->mul(a, b);
    return std::make_shared<const FiniteGroup>(std::move(label), std::move(names), std::move(table));
  };
  if (name.size() >= 2 && name[0] == 'C' && name.find('x') == std::string_view::npos) {
    auto n = parse_int(name.substr(1), "a cyclic order");
    if (n >= 1 && n <= 64) return cyclic_group(static_cast<std::uint32_t>(n));
  }
  if (name == "V4") return relabel(direct_product_table(*cyclic_group(2), *cyclic_group(2)), "V4", {"e", "a", "b", "c"});
  if (name == "S3") return permutation_group("S3", 3, {{1, 0, 2}, {1, 2, 0}});
  if (name == "D4") return dihedral_group(4);
  if (name == "Q8") return dicyclic_group(2);
  if (name == "C2xC4") return relabel(direct_product_table(*cyclic_group(2), *cyclic_group(4)), "C2xC4");
  if (name == "C2xC2xC2")
    return relabel(direct_product_table(*direct_product_table(*cyclic_group(2), *cyclic_group(2)), *cyclic_group(2)),
                   "C2xC2xC2");
  if (name == "C3xC3") return relabel(direct_product_table(*cyclic_group(3), *cyclic_group(3)), "C3xC3");
  if (name == "C2xC6") return relabel(direct_product_table(*cyclic_group(2), *cyclic_group(6)), "C2xC6");
  if (name == "D5") return dihedral_group(5);
  if (name == "D6") return dihedral_group(6);
  if (name == "A4") return permutation_group("A4", 4, {{1, 2, 0, 3}, {1, 0, 3, 2}});
  if (name == "Dic3") return dicyclic_group(3);
  throw GroupError("unknown catalog group '" + std::string(name) + "'");
}

}  // namespace algclosure
