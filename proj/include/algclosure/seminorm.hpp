#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algclosure/stagewise.hpp"

namespace algclosure {

struct Generator {
  Element element;
  Rational weight;
  std::string label;  // e.g. "a_2^-1 x_3 a_2"
};

/// The truncated generator set of N_j: (1, 0), (a_j, 1) and
/// (a_k^-1 x_i a_k, 1/i) for j <= i <= T, 0 <= k <= i.
struct WeightedGeneratorSet {
  std::uint32_t stage = 0;
  std::uint32_t truncation = 0;
  std::vector<Generator> generators;

  std::optional<Rational> weight_of(const Element& e) const;
};

/// Throws InvariantViolation when one element is listed with two weights,
/// GroupError when stage T is not completed or j is not in 1..T.
WeightedGeneratorSet build_generators(const Construction& s, std::uint32_t j, std::uint32_t truncation);

struct SeminormOptions {
  std::size_t node_cap = 2'000'000;
  /// Report min(N, ceiling) instead of N; the search stops at the ceiling.
  std::optional<Rational> ceiling;
};

struct FactorStep {
  std::uint32_t generator = 0;  // index into WeightedGeneratorSet::generators
  int sign = 1;
};

struct SeminormValue {
  enum class Kind { exact, capped, infinite };
  Kind kind = Kind::exact;
  Rational value{0};                       // the ceiling when capped
  std::vector<FactorStep> factorization;  // for exact values

  bool finite() const { return kind != Kind::infinite; }
};

std::string to_string(SeminormValue::Kind k);

/// N(x) = inf over factorizations x = s_1 ... s_m into generators and their
/// inverses of the weight sum. Computed by Dijkstra from the identity over
/// one ball shared by all queries; among minimal-weight factorizations the
/// fewest factors win, then the lexicographically least.
class Seminorm {
 public:
  Seminorm(GroupHandle g, WeightedGeneratorSet gens, SeminormOptions opts = {});

  SeminormValue value(const Element& x) const;
  const WeightedGeneratorSet& generators() const { return gens_; }
  const Group& group() const { return *group_; }
  /// Replays a factorization: its product must be x and its weight sum the value.
  bool verify(const Element& x, const SeminormValue& v) const;
  std::string format_factorization(const SeminormValue& v) const;

 private:
  struct Ball;
  GroupHandle group_;
  WeightedGeneratorSet gens_;
  SeminormOptions opts_;
  std::shared_ptr<Ball> ball_;
};

/// N^{p_1..p_n}_{q_1..q_n}(x) = sum_k N_{q_k}(a_{p_k}^-1 x a_{p_k}) at truncation T.
struct SeminormSpec {
  std::vector<std::uint64_t> p;
  std::vector<std::uint32_t> q;
  std::uint32_t truncation = 1;

  std::size_t n() const { return p.size(); }
  /// Throws GroupError on mismatched lengths, empty lists or q = 0.
  void validate() const;
  std::string describe() const;
};

/// p- and q-lists concatenated; truncations must agree.
SeminormSpec concatenate(const SeminormSpec& a, const SeminormSpec& b);

struct CompositeTerm {
  std::uint64_t p = 0;
  std::uint32_t q = 0;
  Element conjugated;  // a_p^-1 x a_p
  SeminormValue value;
};

struct CompositeValue {
  SeminormValue::Kind kind = SeminormValue::Kind::exact;
  Rational total{0};
  std::vector<CompositeTerm> terms;
};

/// The base seminorms N_1..N_T of one construction at one truncation, built
/// on first use.
class SeminormFamily {
 public:
  SeminormFamily(const Construction& s, std::uint32_t truncation, SeminormOptions opts = {});

  const Construction& construction() const { return *s_; }
  std::uint32_t truncation() const { return truncation_; }
  const Seminorm& base(std::uint32_t q) const;

 private:
  const Construction* s_;
  std::uint32_t truncation_;
  SeminormOptions opts_;
  mutable std::map<std::uint32_t, std::unique_ptr<Seminorm>> bases_;
};

/// Throws GroupError when spec.truncation differs from the family's or a
/// referenced a_p is unnumbered.
CompositeValue composite_value(const SeminormFamily& f, const SeminormSpec& spec, const Element& x);

struct MembershipResult {
  bool certified = false;  // value < 1 with replayable factorizations; otherwise unknown
  CompositeValue value;
};

MembershipResult in_UN(const SeminormFamily& f, const SeminormSpec& spec, const Element& x);

/// x_s for the least s > max(n, p_k, q_k): each term has the single
/// generator a_{p_k}^-1 x_s a_{p_k} of N_{q_k} with weight 1/s, so the
/// composite value is at most n/s < 1, while x_s is in A.
struct ClosureWitness {
  std::uint32_t s = 0;
  Element x;
  Rational bound{0};  // n/s
  std::vector<std::pair<std::string, Rational>> single_generator_proof;  // per term
  CompositeValue computed;  // at truncation max(T, s)
  bool in_A = false;
  bool certified = false;  // computed <= bound < 1, proofs re-verified
};

/// Throws GroupError naming the required s when too few stages are done.
ClosureWitness closure_witness(const Construction& s, const SeminormSpec& spec, SeminormOptions opts = {});

struct CheckReport {
  bool ok = true;
  std::size_t checked = 0;
  std::string failure;
};

/// value(1) = 0, value(x^-1) = value(x), value(xy) <= value(x) + value(y)
/// on all pairs of the sample.
CheckReport check_seminorm_axioms(const Seminorm& n, std::span<const Element> sample);

/// value(spec1 ++ spec2, x) = value(spec1, x) + value(spec2, x) exactly, and
/// U of the concatenation lies in both constituents, on every sample.
CheckReport filterbase_check(const SeminormFamily& f, const SeminormSpec& a, const SeminormSpec& b,
                             std::span<const Element> samples);

}  // namespace algclosure
