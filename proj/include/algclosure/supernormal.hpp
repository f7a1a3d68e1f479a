#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "algclosure/group.hpp"

namespace algclosure {

/// y in H' inducing the same conjugation on H as x.
struct ConjugationMatch {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
};

/// x with no matching y: for every y in H' an h with x^-1 h x != y^-1 h y.
struct ConjugationMismatch {
  std::uint32_t x = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> refutations;  // (y, h)
};

struct SupernormalityReport {
  bool supernormal = true;
  std::vector<ConjugationMatch> matches;
  std::vector<ConjugationMismatch> mismatches;
};

/// Brute force over every x in H (all of the table group) and y in `sub`.
/// Throws GroupError when `sub` is not a subgroup.
SupernormalityReport is_supernormal_finite(const FiniteGroup& h, std::span<const std::uint32_t> sub);
SupernormalityReport is_supernormal_finite(const FiniteGroup& h, const SubgroupSpec& sub);

/// Re-checks every match and refutation of a report by direct computation.
bool verify_supernormality(const FiniteGroup& h, std::span<const std::uint32_t> sub, const SupernormalityReport& r);

std::vector<std::uint32_t> center(const FiniteGroup& h);

/// x and y conjugate alike iff x y^-1 is central, so the pair is
/// supernormal iff H' Z(H) = H.
bool supernormal_center_oracle(const FiniteGroup& h, std::span<const std::uint32_t> sub);

/// Result of a check on declared samples only; never a proof for infinite H.
struct SampledSupernormality {
  bool consistent = true;
  std::size_t xs_tested = 0;
  std::vector<std::pair<Element, Element>> matches;  // (x, y)
  std::optional<Element> unmatched_x;
};

/// For each sampled x in H, looks for y among `candidates` (members of H')
/// agreeing with x on every sampled h.
SampledSupernormality is_supernormal_sampled(const Group& g, std::span<const Element> xs,
                                             std::span<const Element> candidates, std::span<const Element> hs);

struct ProjectionWitness {
  bool ok = true;
  bool exhaustive = false;  // every h in H was checked
  Element y;
  std::optional<Element> violating_h;
  std::size_t checked = 0;
};

/// y = project(x, keep), checked against x^-1 h x = y^-1 h y for every h of
/// H when its ambient group is finite, otherwise on `samples`.
ProjectionWitness conjugation_witness(const SubgroupSpec& h, const Element& x, std::span<const Index> keep,
                                      std::span<const Element> samples = {});

}  // namespace algclosure
