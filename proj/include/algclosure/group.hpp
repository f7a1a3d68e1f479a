#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algclosure/element.hpp"

namespace algclosure {

enum class GroupKind { finite_table, integers, fg_abelian, restricted_product };

std::string_view to_string(GroupKind kind);

/// A computable group: identity, multiplication, inversion, structural
/// equality on Element, and an injective enumeration that starts at the
/// identity and reaches every element at a finite position.
///
/// Groups that are not restricted products behave as a one-coordinate
/// product at index 1, so support/projection bookkeeping has one code path.
class Group {
 public:
  virtual ~Group() = default;

  virtual GroupKind kind() const = 0;
  virtual std::string describe() const = 0;
  virtual Element identity() const = 0;
  virtual bool is_valid(const Element& e) const = 0;
  virtual std::optional<std::uint64_t> order() const = 0;
  virtual bool is_abelian() const = 0;

  /// Checked operations; throw GroupError on elements foreign to this group.
  Element multiply(const Element& a, const Element& b) const;
  Element invert(const Element& a) const;
  Element conjugate(const Element& x, const Element& by) const;  // by^-1 x by

  /// Unchecked operations for inner loops.
  virtual Element multiply_unchecked(const Element& a, const Element& b) const = 0;
  virtual Element invert_unchecked(const Element& a) const = 0;

  virtual ElementStream enumerate() const = 0;

  /// Whitespace-free token; parse(format(e)) == e.
  virtual std::string format(const Element& e) const = 0;
  virtual Element parse(std::string_view token) const = 0;

  /// Encoding width when used as a product component.
  virtual std::size_t width() const = 0;

  virtual std::vector<Index> support(const Element& e) const;
  virtual Element project(const Element& e, std::span<const Index> keep) const;
  /// Elements supported inside `indices`, in the sub-product's own dovetail order.
  virtual ElementStream enumerate_subproduct(std::span<const Index> indices) const;

  bool is_identity(const Element& e) const { return e == identity(); }
  bool is_finite() const { return order().has_value(); }

 protected:
  void require_valid(const Element& e) const;
};

using GroupHandle = std::shared_ptr<const Group>;

/// Finite group given by a Cayley table over indices 0..n-1; index 0 is the
/// identity. Elements are encoded as {index}.
class FiniteGroup final : public Group {
 public:
  /// `table[i][j]` is the index of names[i]*names[j]. The identity is moved to
  /// index 0 if necessary; group axioms are verified exhaustively.
  FiniteGroup(std::string label, std::vector<std::string> names,
              std::vector<std::vector<std::uint32_t>> table);

  GroupKind kind() const override { return GroupKind::finite_table; }
  std::string describe() const override { return label_; }
  Element identity() const override { return Element{0}; }
  bool is_valid(const Element& e) const override;
  std::optional<std::uint64_t> order() const override { return size(); }
  bool is_abelian() const override { return abelian_; }
  Element multiply_unchecked(const Element& a, const Element& b) const override;
  Element invert_unchecked(const Element& a) const override;
  ElementStream enumerate() const override;
  std::string format(const Element& e) const override;
  Element parse(std::string_view token) const override;
  std::size_t width() const override { return 1; }

  std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return table_[a * size() + b]; }
  std::uint32_t inv(std::uint32_t a) const { return inverse_[a]; }
  const std::string& name(std::uint32_t a) const { return names_[a]; }
  const std::vector<std::string>& names() const { return names_; }
  static std::uint32_t index_of(const Element& e) { return static_cast<std::uint32_t>(e[0]); }
  static Element element(std::uint32_t i) { return Element{static_cast<std::int64_t>(i)}; }

 private:
  std::string label_;
  std::vector<std::string> names_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> inverse_;
  std::map<std::string, std::uint32_t, std::less<>> by_name_;
  bool abelian_ = true;
};

/// The integers under addition; encoded as {n}; enumerated 0, 1, -1, 2, -2, ...
class IntegerGroup final : public Group {
 public:
  GroupKind kind() const override { return GroupKind::integers; }
  std::string describe() const override { return "Z"; }
  Element identity() const override { return Element{0}; }
  bool is_valid(const Element& e) const override { return e.size() == 1; }
  std::optional<std::uint64_t> order() const override { return std::nullopt; }
  bool is_abelian() const override { return true; }
  Element multiply_unchecked(const Element& a, const Element& b) const override;
  Element invert_unchecked(const Element& a) const override;
  ElementStream enumerate() const override;
  std::string format(const Element& e) const override;
  Element parse(std::string_view token) const override;
  std::size_t width() const override { return 1; }

  static Element of(std::int64_t n) { return Element{n}; }
  static std::int64_t value(const Element& e) { return e[0]; }
};

/// Z^rank x Z_t1 x ... x Z_tk, written additively; encoded as the dense
/// coordinate vector (free part first, torsion reduced into [0, t)).
class FgAbelianGroup final : public Group {
 public:
  FgAbelianGroup(std::uint32_t rank, std::vector<std::int64_t> torsion);

  GroupKind kind() const override { return GroupKind::fg_abelian; }
  std::string describe() const override;
  Element identity() const override;
  bool is_valid(const Element& e) const override;
  std::optional<std::uint64_t> order() const override;
  bool is_abelian() const override { return true; }
  Element multiply_unchecked(const Element& a, const Element& b) const override;
  Element invert_unchecked(const Element& a) const override;
  ElementStream enumerate() const override;
  std::string format(const Element& e) const override;
  Element parse(std::string_view token) const override;
  std::size_t width() const override { return rank_ + torsion_.size(); }

  std::uint32_t rank() const { return rank_; }
  const std::vector<std::int64_t>& torsion() const { return torsion_; }

 private:
  std::int64_t reduce(std::size_t coord, std::int64_t v) const;

  std::uint32_t rank_;
  std::vector<std::int64_t> torsion_;
};

/// Restricted (finite-support) direct product. Either a finite list of
/// components at indices 1..K, or countably many copies of one component at
/// indices 1, 2, 3, ... Components must not themselves be products.
///
/// Encoding: ascending blocks [index, component encoding...]; identity
/// components are omitted, so the identity is the empty vector.
///
/// Enumeration: finite lists dovetail over component positions by their
/// sum (descending lexicographic within a level); countable copies use the
/// level sum(positions) + max(support index), ordered by that max index
/// and then descending lexicographic positions.
class RestrictedProduct final : public Group {
 public:
  explicit RestrictedProduct(std::vector<GroupHandle> components);
  static std::shared_ptr<RestrictedProduct> countable_copies(GroupHandle component);

  GroupKind kind() const override { return GroupKind::restricted_product; }
  std::string describe() const override;
  Element identity() const override { return Element{}; }
  bool is_valid(const Element& e) const override;
  std::optional<std::uint64_t> order() const override;
  bool is_abelian() const override;
  Element multiply_unchecked(const Element& a, const Element& b) const override;
  Element invert_unchecked(const Element& a) const override;
  ElementStream enumerate() const override;
  std::string format(const Element& e) const override;
  Element parse(std::string_view token) const override;
  std::size_t width() const override;

  std::vector<Index> support(const Element& e) const override;
  Element project(const Element& e, std::span<const Index> keep) const override;
  ElementStream enumerate_subproduct(std::span<const Index> indices) const override;

  bool has_countably_many_components() const { return copies_; }
  /// Component at `index`; throws for indices outside the product.
  const Group& component(Index index) const;
  const GroupHandle& component_handle(Index index) const;
  std::optional<Index> component_count() const;

  /// Sparse construction from (index, component element) pairs; identity
  /// components are dropped.
  Element make(std::vector<std::pair<Index, Element>> entries) const;
  /// Component value at `index` (the component identity when absent).
  Element coordinate(const Element& e, Index index) const;
  std::vector<std::pair<Index, Element>> entries(const Element& e) const;

 private:
  RestrictedProduct(GroupHandle component, bool copies);
  bool has_index(Index index) const;

  std::vector<GroupHandle> components_;
  bool copies_ = false;
};

/// A subgroup H of an ambient group, given by a membership predicate;
/// enumeration filters the ambient enumeration.
class SubgroupSpec {
 public:
  using Predicate = std::function<bool(const Element&)>;

  /// The whole ambient group.
  explicit SubgroupSpec(GroupHandle ambient);
  SubgroupSpec(GroupHandle ambient, Predicate member, std::string description,
               std::vector<Element> generators = {});

  const Group& ambient() const { return *ambient_; }
  const GroupHandle& ambient_handle() const { return ambient_; }
  bool contains(const Element& e) const;
  ElementStream enumerate() const;
  ElementStream enumerate_subproduct(std::span<const Index> indices) const;
  const std::string& description() const { return description_; }
  const std::vector<Element>& generators() const { return generators_; }
  bool is_whole_group() const { return !member_; }

  /// Closure under product and inverse on all pairs of `sample`, plus the
  /// identity. Returns the first failing description, if any.
  std::optional<std::string> check_closure(std::span<const Element> sample) const;

 private:
  GroupHandle ambient_;
  Predicate member_;
  std::string description_;
  std::vector<Element> generators_;
};

/// A subset of a group: a decidable membership predicate plus an
/// enumeration of its members; `finite` marks sets whose enumeration is
/// declared to terminate.
class SetSpec {
 public:
  using Predicate = std::function<bool(const Element&)>;
  using StreamFactory = std::function<ElementStream()>;

  SetSpec(GroupHandle group, Predicate member, StreamFactory stream, bool finite,
          std::string description);

  static SetSpec from_elements(GroupHandle group, std::vector<Element> elements,
                               std::string description = {});
  /// Members of `group` satisfying `member`, in the group's enumeration order.
  static SetSpec filtered(GroupHandle group, Predicate member, std::string description);

  const Group& group() const { return *group_; }
  const GroupHandle& group_handle() const { return group_; }
  bool contains(const Element& e) const { return member_(e); }
  ElementStream enumerate() const { return stream_(); }
  bool is_finite() const { return finite_; }
  const std::string& description() const { return description_; }
  /// Members, for finite sets; throws BudgetExceeded past `limit`.
  std::vector<Element> elements(std::size_t limit = 1'000'000) const;

 private:
  GroupHandle group_;
  Predicate member_;
  StreamFactory stream_;
  bool finite_;
  std::string description_;
};

/// Tabulates a finite group of any kind into a Cayley table; index i is the
/// i-th element of the source enumeration. Names are the source formatting,
/// or e0, e1, ... when that formatting is not a valid table name.
std::shared_ptr<const FiniteGroup> tabulate(const Group& g, std::uint64_t max_order = 4096);

/// Subgroup generated by `generators` inside a finite table group, as a
/// sorted list of indices.
std::vector<std::uint32_t> generated_subgroup(const FiniteGroup& g,
                                              std::span<const std::uint32_t> generators);

/// All subgroups of a finite table group, each as a sorted index list,
/// ordered by size and then lexicographically.
std::vector<std::vector<std::uint32_t>> all_subgroups(const FiniteGroup& g);

/// Exhaustive associativity, identity and inverse check.
bool verify_group_axioms(const FiniteGroup& g);

/// Group axioms on every triple of a sample (for infinite groups).
bool verify_group_axioms_sampled(const Group& g, std::span<const Element> sample);

// Built-in groups.
std::shared_ptr<const FiniteGroup> cyclic_group(std::uint32_t n);
std::shared_ptr<const FiniteGroup> permutation_group(
    std::string label, std::uint32_t degree, const std::vector<std::vector<std::uint32_t>>& generators);
std::shared_ptr<const FiniteGroup> dihedral_group(std::uint32_t n);       // order 2n
std::shared_ptr<const FiniteGroup> dicyclic_group(std::uint32_t n);       // order 4n
std::shared_ptr<const FiniteGroup> direct_product_table(const FiniteGroup& a, const FiniteGroup& b);
std::shared_ptr<const FiniteGroup> catalog_group(std::string_view name);
/// Names accepted by catalog_group, in a fixed order.
std::vector<std::string> catalog_names();

}  // namespace algclosure
