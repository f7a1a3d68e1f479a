#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "algclosure/group.hpp"
#include "algclosure/seminorm.hpp"
#include "algclosure/stagewise.hpp"

namespace algclosure {

/// Malformed or unresolvable scenario input.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EngineConfig {
  StagePolicy policy;
  SeminormOptions seminorm;
  std::size_t closure_cap = 1'000'000;  // word-function maps per finite group
  std::uint32_t stages = 3;
  std::uint32_t truncation = 3;
  std::size_t materialize = 12;
  std::size_t samples = 200;
};

struct ClosureParams {
  std::string group;
  std::string set;
};

struct ConstructParams {
  std::string set;
  std::optional<std::string> subgroup;  // whole group of the set when absent
  std::optional<std::uint32_t> stages;
};

struct VerifyParams {
  std::vector<std::uint64_t> p{0};
  std::vector<std::uint32_t> q{1};
  std::optional<std::uint32_t> truncation;
  std::vector<std::uint64_t> second_p{0};
  std::vector<std::uint32_t> second_q{1};
};

struct SupernormalParams {
  std::string group;
  std::string subgroup = "all";  // or a [subgroups] name
  std::string mode = "finite";   // or "sampled"
  std::vector<Index> keep;       // projection witness indices (sampled mode)
  std::vector<std::string> elements;
};

/// A parsed scenario file: named groups, sets and subgroups, engine
/// budgets, and per-command parameters. Names resolve lazily; groups that
/// are not defined in the file fall back to "Z" and the catalog.
///
/// Set DSL (one [sets.NAME] table):
///   group = "..."                      required
///   elements = ["2", "4"]              finite list, or
///   builtin = "positives" | "basis-vectors" | "nonidentity" | "all"
///   where = [{coordinate = 1, sign = "positive"}, {support_max = 2}]
///   finite = true                      declares the enumeration finite
/// Conditions: coordinate with sign ("positive", "negative", "zero",
/// "nonzero"), min, max, odd, even; support_min, support_max,
/// support_within, support_contains; not = [...] negates a condition list.
class Scenario {
 public:
  static Scenario load(const std::string& path);
  static Scenario parse(const std::string& text, const std::string& source = "<scenario>");

  /// sha256 of the raw scenario bytes, hex.
  const std::string& digest() const { return digest_; }
  std::int64_t version() const { return version_; }
  const EngineConfig& engine() const { return engine_; }
  EngineConfig& engine() { return engine_; }

  GroupHandle group(const std::string& name) const;
  SetSpec set(const std::string& name) const;
  /// "whole:<group>" names the whole group.
  SubgroupSpec subgroup(const std::string& name) const;
  std::string set_group(const std::string& set_name) const;
  std::string subgroup_group(const std::string& name) const;

  const std::optional<ClosureParams>& closure() const { return closure_; }
  const std::optional<ConstructParams>& construct() const { return construct_; }
  const std::optional<VerifyParams>& verify() const { return verify_; }
  const std::optional<SupernormalParams>& supernormal() const { return supernormal_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::string digest_;
  std::int64_t version_ = 1;
  EngineConfig engine_;
  std::optional<ClosureParams> closure_;
  std::optional<ConstructParams> construct_;
  std::optional<VerifyParams> verify_;
  std::optional<SupernormalParams> supernormal_;
};

std::string sha256_hex(const std::string& bytes);

/// Up to `limit` members of H in enumeration order, giving up after
/// `max_steps` elements of the ambient enumeration.
std::vector<Element> sample_members(const SubgroupSpec& h, std::size_t limit, std::size_t max_steps = 200'000);

/// Integer value of coordinate k of an element: the integer itself, the
/// k-th coordinate of a finitely generated abelian group, the table index,
/// or the (single-word) component encoding inside a product.
std::int64_t coordinate_value(const Group& g, const Element& e, Index k);

}  // namespace algclosure
