#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "algclosure/group.hpp"
#include "algclosure/words.hpp"

namespace algclosure {

/// A construction invariant failed to hold.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class SearchStrategy { automatic, paired_bfs, abelian };

struct StagePolicy {
  std::size_t state_cap = 5'000'000;            // states per separating search
  std::size_t scan_budget = 1'000'000;          // candidates from A per stage
  std::size_t enumeration_budget = 20'000'000;  // numbering cursor steps
  SearchStrategy strategy = SearchStrategy::automatic;
};

/// Outcome of "is x in B_j": a function phi with phi(fixed, x) = 1 and
/// phi(fixed, 1) != 1, minimal in length and then lexicographic, or proof
/// by exhaustion that none exists within the length bound.
struct Separation {
  bool member = false;
  std::optional<MultiplicativeFunction> witness;
  std::size_t states = 0;
};

/// Breadth-first search over pairs (phi(fixed, x), phi(fixed, 1)). Arguments
/// 1..m-1 are `fixed`, argument m is `x`. Throws BudgetExceeded past
/// `state_cap` states.
Separation paired_search(const Group& g, std::span<const Element> fixed, const Element& x, std::size_t max_len,
                         std::size_t state_cap);

/// Same question for abelian groups: one breadth-first search over the
/// values of the fixed arguments, then each x is answered by checking
/// whether x^-e is reachable with |e| letters to spare. Returns the same
/// witness as paired_search.
class AbelianSeparator {
 public:
  AbelianSeparator(const Group& g, std::vector<Element> fixed, std::size_t max_len, std::size_t state_cap);
  Separation test(const Element& x) const;
  std::size_t reachable() const { return nodes_.size(); }

 private:
  struct Node {
    std::uint32_t depth;
    std::int64_t parent;
    std::uint32_t code;
  };
  std::vector<std::uint32_t> path(std::int64_t node) const;

  const Group* group_;
  std::vector<Element> fixed_;
  std::size_t max_len_;
  std::vector<Node> nodes_;
  std::unordered_map<Element, std::int64_t, ElementHash> index_;
};

/// Independent re-check of the invariant carried into stage j: no function
/// of length < 3j on 2(j-1) arguments vanishes at (a_1..a_{j-1},
/// x_1..x_{j-1}) without vanishing when x_{j-1} is replaced by 1.
struct TransferResult {
  bool holds = true;
  std::optional<MultiplicativeFunction> violation;
  std::size_t states = 0;
};
TransferResult check_transfer(const Group& g, std::span<const Element> a, std::span<const Element> x, std::uint32_t j,
                              std::size_t state_cap);

enum class Placement { already_occupied, reserved, filled_hole, relocated };
std::string_view to_string(Placement p);

struct StageRecord {
  std::uint32_t stage = 0;
  Element x;
  std::vector<Index> alpha;  // alpha_1..alpha_{n_j}
  Placement placement = Placement::already_occupied;
  std::optional<std::uint64_t> relocated_from;
  std::optional<std::uint64_t> free_index_taken;  // index removed from the free sequence
  std::size_t scanned = 0;
};

/// Witness that 1 is outside the closure of a finite A: every element of A
/// solves some listed phi(a_1..a_j, x_1..x_{j-1}, .) = 1 while every listed
/// phi is non-trivial at the identity.
struct ClosureRefutation {
  std::uint32_t stage = 0;
  std::vector<Element> a;  // a_1..a_j
  std::vector<Element> x;  // x_1..x_{j-1}
  std::vector<MultiplicativeFunction> functions;
  std::vector<std::pair<Element, std::size_t>> cover;  // member of A -> function index
};

struct Inconclusive {
  std::uint32_t stage = 0;
  std::size_t scanned = 0;
  std::string reason;
};

using StageOutcome = std::variant<StageRecord, ClosureRefutation, Inconclusive>;

/// Evaluation-only re-check of a refutation against a finite A.
bool verify_refutation(const Group& g, const ClosureRefutation& r, const SetSpec& a, std::string* why = nullptr);

/// State of the staged construction after j stages: the numbering
/// i |-> a_i (a_0 = 1), the chosen x_1..x_j, and the support indices
/// alpha_1..alpha_{n_j}.
///
/// Numbering policy: at stage j, position j+1 is given to x_j when free
/// (moving x_j there if it already had a larger number, which leaves a
/// hole); the elements of H inside the new sub-product that were not
/// covered before then take every second remaining free number in
/// ascending order. Numbers are resolved lazily from per-stage cursors.
class Construction {
 public:
  /// a_1 is the first non-identity element of H's enumeration. Throws
  /// GroupError when 1 is in A or H is trivial.
  Construction(SubgroupSpec h, SetSpec a, StagePolicy policy = {});
  Construction(const Construction& other);
  Construction& operator=(const Construction& other);
  Construction(Construction&&) noexcept;
  Construction& operator=(Construction&&) noexcept;
  ~Construction();

  const SubgroupSpec& subgroup() const { return h_; }
  const SetSpec& set() const { return a_; }
  const Group& group() const { return h_.ambient(); }
  const StagePolicy& policy() const { return policy_; }
  std::uint32_t stage() const { return static_cast<std::uint32_t>(records_.size()); }
  const std::vector<StageRecord>& records() const { return records_; }

  const Element& a1() const { return a1_; }
  /// a_i, or nullopt when position i is unoccupied.
  std::optional<Element> numbered(std::uint64_t position) const;
  /// Throws InvariantViolation when the position is unoccupied.
  Element a(std::uint64_t position) const;
  std::optional<std::uint64_t> position_of(const Element& e) const;
  Element x(std::uint32_t i) const;  // x_i, 1-based
  std::vector<Element> xs() const;
  const std::vector<Index>& alpha() const;

  /// Membership of `x` in B_j for j <= stage() + 1.
  Separation membership_B(std::uint32_t j, const Element& x) const;
  /// Runs stage stage()+1.
  StageOutcome advance();
  /// check_transfer for this state's sequences; valid for j <= stage() + 1.
  TransferResult transfer_check(std::uint32_t j) const;
  /// First `bound` numbered elements of G*, in numbering order.
  std::vector<std::pair<std::uint64_t, Element>> materialize(std::size_t bound) const;

  nlohmann::ordered_json snapshot() const;
  /// Rebuilds a state saved by snapshot(); H and A must be the ones it was
  /// built from.
  static Construction resume(SubgroupSpec h, SetSpec a, StagePolicy policy, const nlohmann::ordered_json& snap);

 private:
  struct Cache;

  std::vector<Element> fixed_arguments(std::uint32_t j) const;
  bool covered_by(const Element& e, const std::vector<Index>& alpha) const;
  bool new_at_stage(const Element& e, std::uint32_t j) const;
  void open_cursors() const;  // caller holds the cache lock
  std::optional<Element> structural(std::uint64_t position) const;
  std::optional<std::uint64_t> structural_position(const Element& e) const;
  std::optional<std::uint64_t> free_index(std::uint64_t position) const;  // in the free sequence after stage()
  void apply_placement(const StageRecord& r);
  void check_stage(const StageRecord& r) const;

  SubgroupSpec h_;
  SetSpec a_;
  StagePolicy policy_;
  Element a1_;
  std::vector<Index> alpha0_;
  std::vector<StageRecord> records_;
  std::map<std::uint64_t, Element> placed_;
  std::unordered_map<Element, std::uint64_t, ElementHash> placed_rev_;
  std::set<std::uint64_t> holes_;
  std::unique_ptr<Cache> cache_;
};

}  // namespace algclosure
