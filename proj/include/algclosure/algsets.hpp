#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "algclosure/group.hpp"
#include "algclosure/words.hpp"

namespace algclosure {

/// Subset of a finite table group, indexed by element index.
using Subset = boost::dynamic_bitset<>;

Subset make_subset(const FiniteGroup& g, std::span<const std::uint32_t> members);
std::vector<std::uint32_t> subset_members(const Subset& s);

/// Every map G -> G of the form x |-> w(x), found breadth-first by word
/// length. The witness of each map is its shortest word, ties broken by the
/// letter order x < x^-1 < constants in index order.
class WordFunctionMonoid {
 public:
  std::size_t size() const { return parent_.size(); }
  /// Value table of the i-th map: values(i)[x] = w_i(x).
  std::span<const std::uint32_t> values(std::size_t i) const;
  Word witness(std::size_t i) const;
  std::size_t witness_length(std::size_t i) const { return depth_[i]; }
  const FiniteGroup& group() const { return *group_; }

 private:
  friend WordFunctionMonoid word_function_monoid(std::shared_ptr<const FiniteGroup>, std::size_t);

  std::shared_ptr<const FiniteGroup> group_;
  std::vector<std::uint32_t> table_;  // size() * n values
  std::vector<std::int64_t> parent_;  // -1 for the empty word
  std::vector<std::uint32_t> letter_; // 0 = x, 1 = x^-1, 2 + c = constant c
  std::vector<std::uint32_t> depth_;
};

/// Throws BudgetExceeded once more than `cap` maps are discovered.
WordFunctionMonoid word_function_monoid(std::shared_ptr<const FiniteGroup> g, std::size_t cap = 1'000'000);

/// {x : w(x) = 1}.
Subset elementary_solution_set(const FiniteGroup& g, const Word& w);

struct ElementarySet {
  Subset members;
  Word witness;  // minimal-length word with this solution set
};

/// All elementary algebraic sets of a finite group, deduplicated by
/// solution set, in order of first discovery.
class ElementaryFamily {
 public:
  ElementaryFamily(std::shared_ptr<const FiniteGroup> g, std::size_t cap = 1'000'000);

  const FiniteGroup& group() const { return *group_; }
  const std::shared_ptr<const FiniteGroup>& group_handle() const { return group_; }
  const std::vector<ElementarySet>& sets() const { return sets_; }
  std::size_t monoid_size() const { return monoid_size_; }
  /// Intersection of all elementary sets containing `a`.
  const Subset& hull(std::uint32_t a) const { return hull_[a]; }

 private:
  std::shared_ptr<const FiniteGroup> group_;
  std::vector<ElementarySet> sets_;
  std::vector<Subset> hull_;
  std::size_t monoid_size_ = 0;
};

/// Certificate that `excluded` is outside the closure: for each a in A a
/// word whose solution set contains a and misses `excluded`. The union of
/// these solution sets is additively algebraic, covers A, and misses
/// `excluded`.
struct ExclusionCertificate {
  std::uint32_t excluded = 0;
  std::vector<std::pair<std::uint32_t, Word>> cover;
};

struct ClosureResult {
  Subset input;
  Subset closure;
  std::vector<ExclusionCertificate> certificates;  // one per element outside closure
};

/// Exact closure: y is in the closure iff some a in A lies only in
/// elementary sets that also contain y. The empty union is the empty set.
ClosureResult algebraic_closure_finite(const ElementaryFamily& family, const Subset& a);

/// Re-checks a certificate by evaluating its words.
bool verify_certificate(const FiniteGroup& g, const Subset& a, const ExclusionCertificate& cert);
bool verify_closure_result(const FiniteGroup& g, const ClosureResult& result);

/// b^-1 A = {b^-1 a : a in A}.
Subset translate_subset(const FiniteGroup& g, std::uint32_t b, const Subset& a);

/// b^-1 A for arbitrary groups: membership x |-> A(b x); enumeration maps
/// each member a to b^-1 a.
SetSpec translate_set(const GroupHandle& g, const Element& b, const SetSpec& a);

}  // namespace algclosure
