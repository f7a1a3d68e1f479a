#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "algclosure/group.hpp"

namespace algclosure {

/// Syntax or resolution failure; `offset` is a byte offset into the input.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Constant {
  Element value;
  friend bool operator==(const Constant&, const Constant&) = default;
};

struct Variable {
  int sign = 1;  // +1 for x, -1 for x^-1
  friend bool operator==(const Variable&, const Variable&) = default;
};

using Letter = std::variant<Constant, Variable>;

/// One-variable word over G and {x, x^-1}. Kept unreduced: the length is the
/// literal letter count.
struct Word {
  std::vector<Letter> letters;

  std::size_t length() const { return letters.size(); }
  friend bool operator==(const Word&, const Word&) = default;
};

struct MfLetter {
  std::uint32_t index = 1;  // 1-based argument slot
  int sign = 1;
  friend bool operator==(const MfLetter&, const MfLetter&) = default;
  friend auto operator<=>(const MfLetter& a, const MfLetter& b) {
    // Alphabet order: (1,+1) < (1,-1) < (2,+1) < ...
    if (a.index != b.index) return a.index <=> b.index;
    return b.sign <=> a.sign;
  }
};

/// Constant-free word over signed argument slots 1..arity.
class MultiplicativeFunction {
 public:
  MultiplicativeFunction() = default;
  MultiplicativeFunction(std::uint32_t arity, std::vector<MfLetter> letters);

  std::uint32_t arity() const { return arity_; }
  std::size_t length() const { return letters_.size(); }
  const std::vector<MfLetter>& letters() const { return letters_; }

  friend bool operator==(const MultiplicativeFunction&, const MultiplicativeFunction&) = default;
  /// Length first, then lexicographic in the alphabet order.
  friend bool operator<(const MultiplicativeFunction& a, const MultiplicativeFunction& b);

 private:
  std::uint32_t arity_ = 1;
  std::vector<MfLetter> letters_;
};

/// Left-to-right product, x^{+-1} substituted for the variable letters.
Element evaluate_word(const Word& w, const Group& g, const Element& x);

/// prod_i args[j_i]^{e_i}, left to right. Throws GroupError when args.size()
/// differs from the arity.
Element evaluate_mf(const MultiplicativeFunction& phi, const Group& g, std::span<const Element> args);

/// Binds slots 1..arity-1 to `fixed` as constants and keeps the last slot as
/// the variable, so {x : word(x) = 1} = {x : phi(fixed, x) = 1}.
Word bind_prefix(const MultiplicativeFunction& phi, const Group& g, std::span<const Element> fixed);

/// Number of functions of length <= max_len over m slots: sum (2m)^L.
std::uint64_t count_mfs(std::uint32_t m, std::uint32_t max_len);

/// All functions of length 0..max_len, length first then lexicographic.
class MfEnumerator {
 public:
  MfEnumerator(std::uint32_t m, std::uint32_t max_len);
  std::optional<MultiplicativeFunction> next();

 private:
  std::uint32_t m_;
  std::uint32_t max_len_;
  std::vector<std::uint32_t> digits_;  // letter codes, 0..2m-1
  bool started_ = false;
  bool done_ = false;
};

MultiplicativeFunction mf_from_codes(std::uint32_t m, std::span<const std::uint32_t> codes);
std::uint32_t mf_letter_code(const MfLetter& l);

using ConstantResolver = std::function<std::optional<Element>(std::string_view)>;

/// Grammar: whitespace-separated letters; `x` or `x^-1` for the variable,
/// other tokens (optionally suffixed `^-1`) name constants. `^1` is accepted.
/// Constant names go through `resolve` first, then Group::parse.
Word parse_word(std::string_view text, const Group& g, const ConstantResolver& resolve);
Word parse_word(std::string_view text, const Group& g);
std::string format_word(const Word& w, const Group& g);

/// Grammar: whitespace-separated `#k` or `#k^-1`. The arity defaults to the
/// largest index used (at least 1).
MultiplicativeFunction parse_mf(std::string_view text, std::optional<std::uint32_t> arity = std::nullopt);
std::string format_mf(const MultiplicativeFunction& phi);

}  // namespace algclosure
