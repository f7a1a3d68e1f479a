#include "algclosure/stagewise.hpp"

#include <algorithm>
#include <unordered_set>

namespace algclosure {

namespace {

std::vector<Index> sorted(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool better(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string_view strategy_name(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::automatic: return "automatic";
    case SearchStrategy::paired_bfs: return "paired-bfs";
    case SearchStrategy::abelian: return "abelian";
  }
  return "automatic";
}

Placement placement_from(const std::string& s) {
  for (auto p : {Placement::already_occupied, Placement::reserved, Placement::filled_hole, Placement::relocated})
    if (to_string(p) == s) return p;
  throw GroupError("unknown placement '" + s + "' in snapshot");
}

}  // namespace

std::string_view to_string(Placement p) {
  switch (p) {
    case Placement::already_occupied: return "already-occupied";
    case Placement::reserved: return "reserved";
    case Placement::filled_hole: return "filled-hole";
    case Placement::relocated: return "relocated";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Separating searches

Separation paired_search(const Group& g, std::span<const Element> fixed, const Element& x, std::size_t max_len,
                         std::size_t state_cap) {
  const auto m = static_cast<std::uint32_t>(fixed.size() + 1);
  const auto id = g.identity();
  std::vector<Element> uval(2 * m), vval(2 * m);
  for (std::uint32_t i = 0; i + 1 < m; ++i) {
    uval[2 * i] = vval[2 * i] = fixed[i];
    uval[2 * i + 1] = vval[2 * i + 1] = g.invert(fixed[i]);
  }
  uval[2 * m - 2] = x;
  uval[2 * m - 1] = g.invert(x);
  vval[2 * m - 2] = vval[2 * m - 1] = id;

  std::vector<std::pair<Element, Element>> states;
  std::vector<std::int64_t> parent;
  std::vector<std::uint32_t> code;
  std::unordered_set<std::pair<Element, Element>, ElementPairHash> seen;
  states.emplace_back(id, id);
  parent.push_back(-1);
  code.push_back(0);
  seen.insert(states.back());

  std::size_t begin = 0, end = 1;
  for (std::size_t depth = 1; depth <= max_len && begin < end; ++depth) {
    for (std::size_t s = begin; s < end; ++s) {
      for (std::uint32_t c = 0; c < 2 * m; ++c) {
        auto nu = g.multiply_unchecked(states[s].first, uval[c]);
        auto nv = g.multiply_unchecked(states[s].second, vval[c]);
        if (!seen.emplace(nu, nv).second) continue;
        const bool hit = nu == id && !(nv == id);
        states.emplace_back(std::move(nu), std::move(nv));
        parent.push_back(static_cast<std::int64_t>(s));
        code.push_back(c);
        if (hit) {
          std::vector<std::uint32_t> rev;
          for (auto k = static_cast<std::int64_t>(states.size() - 1); parent[k] >= 0; k = parent[k]) rev.push_back(code[k]);
          std::reverse(rev.begin(), rev.end());
          return {true, mf_from_codes(m, rev), states.size()};
        }
        if (states.size() > state_cap)
          throw BudgetExceeded("paired search exceeded " + std::to_string(state_cap) + " states at length " +
                               std::to_string(depth));
      }
    }
    begin = end;
    end = states.size();
  }
  return {false, std::nullopt, states.size()};
}

AbelianSeparator::AbelianSeparator(const Group& g, std::vector<Element> fixed, std::size_t max_len,
                                   std::size_t state_cap)
    : group_(&g), fixed_(std::move(fixed)), max_len_(max_len) {
  if (!g.is_abelian()) throw GroupError("abelian separator needs an abelian group, got " + g.describe());
  const auto k = static_cast<std::uint32_t>(fixed_.size());
  std::vector<Element> val(2 * k);
  for (std::uint32_t i = 0; i < k; ++i) {
    val[2 * i] = fixed_[i];
    val[2 * i + 1] = g.invert(fixed_[i]);
  }
  std::vector<Element> elems;
  nodes_.push_back({0, -1, 0});
  elems.push_back(g.identity());
  index_.emplace(g.identity(), 0);
  std::size_t begin = 0, end = 1;
  for (std::uint32_t depth = 1; depth + 1 <= max_len_ && begin < end; ++depth) {
    for (std::size_t s = begin; s < end; ++s) {
      for (std::uint32_t c = 0; c < 2 * k; ++c) {
        auto e = g.multiply_unchecked(elems[s], val[c]);
        if (!index_.emplace(e, static_cast<std::int64_t>(nodes_.size())).second) continue;
        nodes_.push_back({depth, static_cast<std::int64_t>(s), c});
        elems.push_back(std::move(e));
        if (nodes_.size() > state_cap)
          throw BudgetExceeded("abelian separator exceeded " + std::to_string(state_cap) + " values");
      }
    }
    begin = end;
    end = nodes_.size();
  }
}

std::vector<std::uint32_t> AbelianSeparator::path(std::int64_t node) const {
  std::vector<std::uint32_t> rev;
  for (auto k = node; nodes_[k].parent >= 0; k = nodes_[k].parent) rev.push_back(nodes_[k].code);
  std::reverse(rev.begin(), rev.end());
  return rev;
}

Separation AbelianSeparator::test(const Element& x) const {
  const auto& g = *group_;
  if (!g.is_valid(x)) throw GroupError("element not valid in " + g.describe());
  const auto m = static_cast<std::uint32_t>(fixed_.size() + 1);
  const auto id = g.identity();
  const auto xinv = g.invert_unchecked(x);
  // phi = w * x^e with w over the fixed slots: phi(x) = 1 iff w = x^-e, and
  // phi(1) = w must be non-trivial.
  Element pos_target = id, neg_target = id;  // x^-c and x^c
  std::optional<std::vector<std::uint32_t>> best;
  for (std::size_t c = 1; c <= max_len_; ++c) {
    if (best && c > best->size()) break;
    pos_target = g.multiply_unchecked(pos_target, xinv);
    neg_target = g.multiply_unchecked(neg_target, x);
    for (int sign : {1, -1}) {
      const auto& w = sign > 0 ? pos_target : neg_target;
      if (w == id) continue;
      auto it = index_.find(w);
      if (it == index_.end() || nodes_[it->second].depth + c > max_len_) continue;
      auto codes = path(it->second);
      codes.insert(codes.end(), c, 2 * (m - 1) + (sign > 0 ? 0 : 1));
      if (!best || better(codes, *best)) best = std::move(codes);
    }
  }
  if (!best) return {false, std::nullopt, nodes_.size()};
  return {true, mf_from_codes(m, *best), nodes_.size()};
}

TransferResult check_transfer(const Group& g, std::span<const Element> a, std::span<const Element> x, std::uint32_t j,
                              std::size_t state_cap) {
  if (j <= 1) return {};
  if (a.size() + 1 < j || x.size() + 1 < j) throw GroupError("transfer check needs a_1..a_{j-1} and x_1..x_{j-1}");
  std::vector<Element> fixed(a.begin(), a.begin() + (j - 1));
  fixed.insert(fixed.end(), x.begin(), x.begin() + (j - 2));
  auto s = paired_search(g, fixed, x[j - 2], 3 * static_cast<std::size_t>(j) - 1, state_cap);
  return {!s.member, s.witness, s.states};
}

bool verify_refutation(const Group& g, const ClosureRefutation& r, const SetSpec& a, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (!a.is_finite()) return fail("refutations are only checked against declared-finite sets");
  if (r.stage == 0 || r.a.size() != r.stage || r.x.size() + 1 != r.stage)
    return fail("referenced elements do not match stage " + std::to_string(r.stage));
  std::vector<Element> args(r.a);
  args.insert(args.end(), r.x.begin(), r.x.end());
  args.push_back(g.identity());
  for (std::size_t i = 0; i < r.functions.size(); ++i) {
    if (r.functions[i].arity() != args.size()) return fail("function " + std::to_string(i) + " has the wrong arity");
    if (g.is_identity(evaluate_mf(r.functions[i], g, args)))
      return fail("function " + format_mf(r.functions[i]) + " vanishes at the identity");
  }
  for (const auto& e : a.elements()) {
    args.back() = e;
    bool covered = false;
    for (const auto& phi : r.functions)
      if (g.is_identity(evaluate_mf(phi, g, args))) {
        covered = true;
        break;
      }
    if (!covered) return fail(g.format(e) + " is not a solution of any listed function");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct Cursor {
  ElementStream stream;
  std::vector<Element> items;
  std::unordered_map<Element, std::size_t, ElementHash> rank;
  bool exhausted = false;
  std::size_t pulled = 0;
};

}  // namespace

struct Construction::Cache {
  std::mutex mu;
  std::vector<std::unique_ptr<Cursor>> cursors;  // cursors[j-1] numbers stage j
};

Construction::Construction(SubgroupSpec h, SetSpec a, StagePolicy policy)
    : h_(std::move(h)), a_(std::move(a)), policy_(policy), cache_(std::make_unique<Cache>()) {
  const auto& g = group();
  if (a_.contains(g.identity())) throw GroupError("the identity belongs to A; nothing to construct");
  auto stream = h_.enumerate();
  for (std::size_t n = 0;; ++n) {
    if (n > policy_.enumeration_budget) throw BudgetExceeded("no non-identity element of H found within budget");
    auto e = stream.next();
    if (!e) throw GroupError("H is trivial");
    if (!g.is_identity(*e)) {
      a1_ = *e;
      break;
    }
  }
  alpha0_ = g.support(a1_);
}

Construction::Construction(const Construction& o)
    : h_(o.h_),
      a_(o.a_),
      policy_(o.policy_),
      a1_(o.a1_),
      alpha0_(o.alpha0_),
      records_(o.records_),
      placed_(o.placed_),
      placed_rev_(o.placed_rev_),
      holes_(o.holes_),
      cache_(std::make_unique<Cache>()) {}

Construction& Construction::operator=(const Construction& o) {
  if (this != &o) {
    Construction copy(o);
    *this = std::move(copy);
  }
  return *this;
}

Construction::~Construction() = default;
Construction::Construction(Construction&&) noexcept = default;
Construction& Construction::operator=(Construction&&) noexcept = default;

const std::vector<Index>& Construction::alpha() const { return records_.empty() ? alpha0_ : records_.back().alpha; }

Element Construction::x(std::uint32_t i) const {
  if (i == 0 || i > records_.size()) throw GroupError("x_" + std::to_string(i) + " is not defined yet");
  return records_[i - 1].x;
}

std::vector<Element> Construction::xs() const {
  std::vector<Element> out;
  for (const auto& r : records_) out.push_back(r.x);
  return out;
}

bool Construction::covered_by(const Element& e, const std::vector<Index>& alpha) const {
  auto s = group().support(e);
  auto al = sorted(alpha);
  return std::includes(al.begin(), al.end(), s.begin(), s.end());
}

bool Construction::new_at_stage(const Element& e, std::uint32_t j) const {
  const auto& r = records_[j - 1];
  if (!covered_by(e, r.alpha)) return false;
  if (j == 1) {
    if (group().is_identity(e) || e == a1_) return false;
  } else if (covered_by(e, records_[j - 2].alpha)) {
    return false;
  }
  if (e == r.x && (r.placement == Placement::reserved || r.placement == Placement::filled_hole)) return false;
  return true;
}

namespace {

// Pulls the cursor until it holds index k or is exhausted.
bool cursor_has(Cursor& c, std::size_t k, std::size_t budget, const std::function<bool(const Element&)>& keep) {
  while (c.items.size() <= k && !c.exhausted) {
    if (c.pulled >= budget) throw BudgetExceeded("numbering enumeration exceeded " + std::to_string(budget) + " steps");
    auto e = c.stream.next();
    ++c.pulled;
    if (!e) {
      c.exhausted = true;
      break;
    }
    if (!keep(*e)) continue;
    c.rank.emplace(*e, c.items.size());
    c.items.push_back(std::move(*e));
  }
  return c.items.size() > k;
}

}  // namespace

void Construction::open_cursors() const {
  while (cache_->cursors.size() < records_.size()) {
    const auto j = cache_->cursors.size() + 1;
    auto c = std::make_unique<Cursor>();
    // A stage that adds no support index covers nothing new.
    if (j >= 2 && records_[j - 1].alpha.size() == records_[j - 2].alpha.size())
      c->exhausted = true;
    else
      c->stream = h_.enumerate_subproduct(sorted(records_[j - 1].alpha));
    cache_->cursors.push_back(std::move(c));
  }
}

// The free sequence before stage 1 is t |-> t + 2. Stage j first removes
// the index it placed x_j at, leaving F'; its c new elements take F'(0),
// F'(2), ..., F'(2c-2), and the free sequence becomes
// t |-> F'(t < c ? 2t + 1 : t + c).
std::optional<Element> Construction::structural(std::uint64_t position) const {
  if (position < 2) return std::nullopt;
  std::uint64_t t = position - 2;
  for (std::uint32_t j = 1; j <= records_.size(); ++j) {
    const auto& r = records_[j - 1];
    if (r.free_index_taken) {
      if (t == *r.free_index_taken) return std::nullopt;
      if (t > *r.free_index_taken) --t;
    }
    auto& c = *cache_->cursors.at(j - 1);
    const auto k = t / 2;
    auto keep = [this, j](const Element& e) { return new_at_stage(e, j); };
    if (cursor_has(c, k, policy_.enumeration_budget, keep)) {
      if (t % 2 == 0) return c.items[k];
      t = k;
    } else {
      t -= c.items.size();
    }
  }
  return std::nullopt;
}

std::optional<std::uint64_t> Construction::structural_position(const Element& e) const {
  std::uint32_t first = 0;
  for (std::uint32_t j = 1; j <= records_.size(); ++j)
    if (covered_by(e, records_[j - 1].alpha)) {
      first = j;
      break;
    }
  if (first == 0 || !new_at_stage(e, first)) return std::nullopt;
  auto& c = *cache_->cursors.at(first - 1);
  auto keep = [this, first](const Element& el) { return new_at_stage(el, first); };
  while (!c.rank.count(e)) {
    if (!cursor_has(c, c.items.size(), policy_.enumeration_budget, keep))
      throw InvariantViolation(group().format(e) + " is covered at stage " + std::to_string(first) +
                               " but missing from its enumeration");
  }
  std::uint64_t t = 2 * c.rank.at(e);
  for (std::uint32_t j = first;; --j) {
    const auto& r = records_[j - 1];
    if (r.free_index_taken && t >= *r.free_index_taken) ++t;
    if (j == 1) break;
    // t indexes free_{j-1}; map back through stage j-1's interleaving.
    auto& prev = *cache_->cursors.at(j - 2);
    auto keep_prev = [this, j](const Element& el) { return new_at_stage(el, j - 1); };
    if (cursor_has(prev, t, policy_.enumeration_budget, keep_prev))
      t = 2 * t + 1;
    else
      t += prev.items.size();
  }
  return t + 2;
}

std::optional<Element> Construction::numbered(std::uint64_t position) const {
  if (position == 0) return group().identity();
  if (position == 1) return a1_;
  if (auto it = placed_.find(position); it != placed_.end()) return it->second;
  if (holes_.count(position)) return std::nullopt;
  std::lock_guard lock(cache_->mu);
  open_cursors();
  return structural(position);
}

Element Construction::a(std::uint64_t position) const {
  auto e = numbered(position);
  if (!e) throw InvariantViolation("position " + std::to_string(position) + " is unoccupied");
  return *e;
}

std::optional<std::uint64_t> Construction::position_of(const Element& e) const {
  const auto& g = group();
  if (!g.is_valid(e)) return std::nullopt;
  if (g.is_identity(e)) return 0;
  if (e == a1_) return 1;
  if (auto it = placed_rev_.find(e); it != placed_rev_.end()) return it->second;
  if (!h_.contains(e)) return std::nullopt;
  std::lock_guard lock(cache_->mu);
  open_cursors();
  return structural_position(e);
}

std::optional<std::uint64_t> Construction::free_index(std::uint64_t position) const {
  // Index of `position` in the free sequence after the current stage, if
  // the position is structurally free.
  if (position < 2 || placed_.count(position) || holes_.count(position)) return std::nullopt;
  std::lock_guard lock(cache_->mu);
  open_cursors();
  std::uint64_t t = position - 2;
  for (std::uint32_t j = 1; j <= records_.size(); ++j) {
    const auto& r = records_[j - 1];
    if (r.free_index_taken) {
      if (t == *r.free_index_taken) return std::nullopt;
      if (t > *r.free_index_taken) --t;
    }
    auto& c = *cache_->cursors.at(j - 1);
    auto keep = [this, j](const Element& e) { return new_at_stage(e, j); };
    if (cursor_has(c, t / 2, policy_.enumeration_budget, keep)) {
      if (t % 2 == 0) return std::nullopt;
      t /= 2;
    } else {
      t -= c.items.size();
    }
  }
  return t;
}

std::vector<Element> Construction::fixed_arguments(std::uint32_t j) const {
  std::vector<Element> out;
  for (std::uint32_t i = 1; i <= j; ++i) out.push_back(a(i));
  for (std::uint32_t i = 1; i < j; ++i) out.push_back(records_[i - 1].x);
  return out;
}

Separation Construction::membership_B(std::uint32_t j, const Element& x) const {
  if (j == 0 || j > records_.size() + 1) throw GroupError("B_" + std::to_string(j) + " is not defined at this stage");
  if (!h_.contains(x)) throw GroupError(group().format(x) + " is not in H");
  auto fixed = fixed_arguments(j);
  const std::size_t max_len = 3 * static_cast<std::size_t>(j) + 2;
  const bool abelian = policy_.strategy == SearchStrategy::abelian ||
                       (policy_.strategy == SearchStrategy::automatic && group().is_abelian());
  if (abelian) return AbelianSeparator(group(), fixed, max_len, policy_.state_cap).test(x);
  return paired_search(group(), fixed, x, max_len, policy_.state_cap);
}

TransferResult Construction::transfer_check(std::uint32_t j) const {
  if (j > records_.size() + 1) throw GroupError("transfer check past the current stage");
  if (j <= 1) return {};
  std::vector<Element> as;
  for (std::uint32_t i = 1; i < j; ++i) as.push_back(a(i));
  auto x = xs();
  return check_transfer(group(), as, x, j, policy_.state_cap);
}

void Construction::apply_placement(const StageRecord& r) {
  const auto target = static_cast<std::uint64_t>(r.stage) + 1;
  switch (r.placement) {
    case Placement::already_occupied:
      return;
    case Placement::relocated: {
      if (!r.relocated_from) throw InvariantViolation("relocation without a source position");
      auto from = *r.relocated_from;
      if (auto it = placed_.find(from); it != placed_.end()) {
        placed_rev_.erase(it->second);
        placed_.erase(it);
      }
      holes_.insert(from);
      break;
    }
    case Placement::reserved:
    case Placement::filled_hole:
      break;
  }
  holes_.erase(target);
  placed_[target] = r.x;
  placed_rev_[r.x] = target;
}

StageOutcome Construction::advance() {
  const auto& g = group();
  const auto j = stage() + 1;
  auto fixed = fixed_arguments(j);
  const std::size_t max_len = 3 * static_cast<std::size_t>(j) + 2;
  const bool abelian = policy_.strategy == SearchStrategy::abelian ||
                       (policy_.strategy == SearchStrategy::automatic && g.is_abelian());
  std::optional<AbelianSeparator> sep;
  if (abelian) sep.emplace(g, fixed, max_len, policy_.state_cap);
  auto test = [&](const Element& e) {
    return sep ? sep->test(e) : paired_search(g, fixed, e, max_len, policy_.state_cap);
  };

  ClosureRefutation refutation;
  refutation.stage = j;
  refutation.a.assign(fixed.begin(), fixed.begin() + j);
  refutation.x.assign(fixed.begin() + j, fixed.end());

  auto stream = a_.enumerate();
  std::size_t scanned = 0;
  std::optional<Element> chosen;
  for (;;) {
    if (scanned >= policy_.scan_budget)
      return Inconclusive{j, scanned, "scan budget of " + std::to_string(policy_.scan_budget) + " candidates exhausted"};
    auto e = stream.next();
    if (!e) break;
    ++scanned;
    if (!h_.contains(*e)) throw GroupError("A contains " + g.format(*e) + ", which is outside H");
    auto s = test(*e);
    if (!s.member) {
      chosen = std::move(*e);
      break;
    }
    auto it = std::find(refutation.functions.begin(), refutation.functions.end(), *s.witness);
    auto idx = static_cast<std::size_t>(it - refutation.functions.begin());
    if (it == refutation.functions.end()) refutation.functions.push_back(*s.witness);
    refutation.cover.emplace_back(std::move(*e), idx);
  }
  if (!chosen) {
    if (!a_.is_finite())
      return Inconclusive{j, scanned, "enumeration of A ended but A is not declared finite"};
    return refutation;
  }

  // Stage invariants that do not depend on the new numbering.
  if (!a_.contains(*chosen)) throw InvariantViolation("x_" + std::to_string(j) + " is not in A");
  if (test(g.identity()).member) throw InvariantViolation("the identity lies in B_" + std::to_string(j));
  for (std::uint32_t i = 0; i <= j; ++i)
    if (a(i) == *chosen)
      throw InvariantViolation("x_" + std::to_string(j) + " equals a_" + std::to_string(i));

  StageRecord r;
  r.stage = j;
  r.x = *chosen;
  r.scanned = scanned;
  r.alpha = alpha();
  std::vector<Index> fresh;
  for (auto i : g.support(*chosen))
    if (std::find(r.alpha.begin(), r.alpha.end(), i) == r.alpha.end()) fresh.push_back(i);
  r.alpha.insert(r.alpha.end(), fresh.begin(), fresh.end());

  const auto target = static_cast<std::uint64_t>(j) + 1;
  if (numbered(target)) {
    r.placement = Placement::already_occupied;
  } else {
    if (auto k = position_of(*chosen)) {
      r.placement = Placement::relocated;
      r.relocated_from = *k;
    } else {
      r.placement = holes_.count(target) ? Placement::filled_hole : Placement::reserved;
    }
    if (!holes_.count(target)) r.free_index_taken = free_index(target);
  }
  apply_placement(r);
  records_.push_back(r);
  check_stage(r);
  return r;
}

void Construction::check_stage(const StageRecord& r) const {
  for (std::uint64_t p = 1; p <= static_cast<std::uint64_t>(r.stage) + 1; ++p)
    if (!numbered(p)) throw InvariantViolation("position " + std::to_string(p) + " unoccupied after stage " +
                                               std::to_string(r.stage));
  auto pos = position_of(r.x);
  if (!pos || *numbered(*pos) != r.x) throw InvariantViolation("x_" + std::to_string(r.stage) + " is not numbered");
  if (!covered_by(r.x, r.alpha)) throw InvariantViolation("support of x_j escapes the index list");
}

std::vector<std::pair<std::uint64_t, Element>> Construction::materialize(std::size_t bound) const {
  std::vector<std::pair<std::uint64_t, Element>> out;
  // Finite totals are known once every cursor is exhausted.
  auto total = [&]() -> std::optional<std::uint64_t> {
    std::lock_guard lock(cache_->mu);
    std::uint64_t n = 2;
    if (cache_->cursors.size() < records_.size()) return std::nullopt;
    for (std::size_t j = 0; j < records_.size(); ++j) {
      if (!cache_->cursors[j]->exhausted) return std::nullopt;
      n += cache_->cursors[j]->items.size();
      auto p = records_[j].placement;
      if (p == Placement::reserved || p == Placement::filled_hole) ++n;
    }
    return n;
  };
  for (std::uint64_t p = 0; out.size() < bound; ++p) {
    if (auto e = numbered(p)) out.emplace_back(p, std::move(*e));
    if (p % 64 == 63) {
      auto n = total();
      if (n && out.size() >= *n) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

nlohmann::ordered_json Construction::snapshot() const {
  const auto& g = group();
  nlohmann::ordered_json j;
  j["format"] = "algclosure-stage-snapshot";
  j["version"] = 1;
  j["group"] = g.describe();
  j["subgroup"] = h_.description();
  j["set"] = a_.description();
  j["policy"] = {
      {"a1", "first non-identity element of H"},
      {"x", "first element of A outside B_j"},
      {"alpha", "append new support indices in ascending order"},
      {"numbering", "j+1 to x_j when free, then every second free number"},
  };
  j["budgets"] = {
      {"state_cap", policy_.state_cap},
      {"scan_budget", policy_.scan_budget},
      {"enumeration_budget", policy_.enumeration_budget},
      {"strategy", strategy_name(policy_.strategy)},
  };
  j["stage"] = stage();
  j["a1"] = g.format(a1_);
  j["alpha0"] = alpha0_;
  auto stages = nlohmann::ordered_json::array();
  for (const auto& r : records_) {
    nlohmann::ordered_json s;
    s["stage"] = r.stage;
    s["x"] = g.format(r.x);
    s["alpha"] = r.alpha;
    s["placement"] = to_string(r.placement);
    s["relocated_from"] = r.relocated_from ? nlohmann::ordered_json(*r.relocated_from) : nullptr;
    s["free_index_taken"] = r.free_index_taken ? nlohmann::ordered_json(*r.free_index_taken) : nullptr;
    s["scanned"] = r.scanned;
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  j["holes"] = std::vector<std::uint64_t>(holes_.begin(), holes_.end());
  auto numbering = nlohmann::ordered_json::array();
  for (std::uint64_t p = 0; p <= static_cast<std::uint64_t>(stage()) + 1; ++p)
    numbering.push_back({p, g.format(a(p))});
  j["numbering"] = std::move(numbering);
  return j;
}

Construction Construction::resume(SubgroupSpec h, SetSpec a, StagePolicy policy, const nlohmann::ordered_json& snap) {
  if (snap.value("format", "") != "algclosure-stage-snapshot") throw GroupError("not a stage snapshot");
  if (snap.value("version", 0) != 1) throw GroupError("unsupported snapshot version");
  Construction c(std::move(h), std::move(a), policy);
  const auto& g = c.group();
  if (snap.at("group").get<std::string>() != g.describe() ||
      snap.at("subgroup").get<std::string>() != c.h_.description() ||
      snap.at("set").get<std::string>() != c.a_.description())
    throw GroupError("snapshot was taken for a different instance");
  if (g.parse(snap.at("a1").get<std::string>()) != c.a1_) throw InvariantViolation("snapshot a_1 differs from replay");
  for (const auto& s : snap.at("stages")) {
    StageRecord r;
    r.stage = s.at("stage").get<std::uint32_t>();
    if (r.stage != c.stage() + 1) throw GroupError("snapshot stages out of order");
    r.x = g.parse(s.at("x").get<std::string>());
    r.alpha = s.at("alpha").get<std::vector<Index>>();
    r.placement = placement_from(s.at("placement").get<std::string>());
    if (!s.at("relocated_from").is_null()) r.relocated_from = s.at("relocated_from").get<std::uint64_t>();
    if (!s.at("free_index_taken").is_null()) r.free_index_taken = s.at("free_index_taken").get<std::uint64_t>();
    r.scanned = s.at("scanned").get<std::size_t>();
    if (!c.a_.contains(r.x)) throw InvariantViolation("snapshot x_" + std::to_string(r.stage) + " is not in A");
    c.apply_placement(r);
    c.records_.push_back(std::move(r));
    c.check_stage(c.records_.back());
  }
  for (const auto& entry : snap.at("numbering")) {
    auto p = entry.at(0).get<std::uint64_t>();
    if (g.format(c.a(p)) != entry.at(1).get<std::string>())
      throw InvariantViolation("snapshot numbering disagrees at position " + std::to_string(p));
  }
  return c;
}

}  // namespace algclosure
