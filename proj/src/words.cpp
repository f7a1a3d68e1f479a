#include "algclosure/words.hpp"

#include <cctype>
#include <charconv>

namespace algclosure {

namespace {

struct Token {
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    auto start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    out.push_back({text.substr(start, i - start), start});
  }
  return out;
}

// Splits "base^e" into base and exponent sign; exponent must be 1 or -1.
std::pair<std::string_view, int> split_exponent(const Token& tok) {
  auto caret = tok.text.find('^');
  if (caret == std::string_view::npos) return {tok.text, 1};
  if (caret == 0) throw ParseError("missing base before '^'", tok.offset);
  auto exp = tok.text.substr(caret + 1);
  if (exp == "-1") return {tok.text.substr(0, caret), -1};
  if (exp == "1" || exp == "+1") return {tok.text.substr(0, caret), 1};
  throw ParseError("malformed exponent (expected ^-1 or ^1)", tok.offset + caret);
}

}  // namespace

MultiplicativeFunction::MultiplicativeFunction(std::uint32_t arity, std::vector<MfLetter> letters)
    : arity_(arity), letters_(std::move(letters)) {
  if (arity_ == 0) throw GroupError("multiplicative function needs at least one argument");
  for (const auto& l : letters_) {
    if (l.index < 1 || l.index > arity_) throw GroupError("argument index " + std::to_string(l.index) + " out of range 1.." + std::to_string(arity_));
    if (l.sign != 1 && l.sign != -1) throw GroupError("letter sign must be +1 or -1");
  }
}

bool operator<(const MultiplicativeFunction& a, const MultiplicativeFunction& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.letters_ < b.letters_;
}

Element evaluate_word(const Word& w, const Group& g, const Element& x) {
  if (!g.is_valid(x)) throw GroupError("evaluation point is not an element of " + g.describe());
  auto xinv = g.invert_unchecked(x);
  auto acc = g.identity();
  for (const auto& letter : w.letters) {
    if (const auto* c = std::get_if<Constant>(&letter)) {
      if (!g.is_valid(c->value)) throw GroupError("word constant is not an element of " + g.describe());
      acc = g.multiply_unchecked(acc, c->value);
    } else {
      acc = g.multiply_unchecked(acc, std::get<Variable>(letter).sign > 0 ? x : xinv);
    }
  }
  return acc;
}

Element evaluate_mf(const MultiplicativeFunction& phi, const Group& g, std::span<const Element> args) {
  if (args.size() != phi.arity()) {
    throw GroupError("multiplicative function of " + std::to_string(phi.arity()) + " arguments evaluated at " +
                     std::to_string(args.size()));
  }
  for (const auto& a : args)
    if (!g.is_valid(a)) throw GroupError("argument is not an element of " + g.describe());
  auto acc = g.identity();
  for (const auto& l : phi.letters()) {
    const auto& v = args[l.index - 1];
    acc = g.multiply_unchecked(acc, l.sign > 0 ? v : g.invert_unchecked(v));
  }
  return acc;
}

Word bind_prefix(const MultiplicativeFunction& phi, const Group& g, std::span<const Element> fixed) {
  if (fixed.size() + 1 != phi.arity()) throw GroupError("bind_prefix needs arity-1 fixed arguments");
  Word w;
  for (const auto& l : phi.letters()) {
    if (l.index == phi.arity()) {
      w.letters.emplace_back(Variable{l.sign});
    } else {
      const auto& v = fixed[l.index - 1];
      w.letters.emplace_back(Constant{l.sign > 0 ? v : g.invert(v)});
    }
  }
  return w;
}

std::uint64_t count_mfs(std::uint32_t m, std::uint32_t max_len) {
  std::uint64_t total = 0, term = 1;
  for (std::uint32_t len = 0; len <= max_len; ++len) {
    total += term;
    term *= 2ULL * m;
  }
  return total;
}

std::uint32_t mf_letter_code(const MfLetter& l) { return 2 * (l.index - 1) + (l.sign > 0 ? 0 : 1); }

MultiplicativeFunction mf_from_codes(std::uint32_t m, std::span<const std::uint32_t> codes) {
  std::vector<MfLetter> letters;
  letters.reserve(codes.size());
  for (auto c : codes) letters.push_back({c / 2 + 1, (c % 2) ? -1 : 1});
  return MultiplicativeFunction(m, std::move(letters));
}

MfEnumerator::MfEnumerator(std::uint32_t m, std::uint32_t max_len) : m_(m), max_len_(max_len) {
  if (m == 0) throw GroupError("enumerate_mfs needs m >= 1");
}

std::optional<MultiplicativeFunction> MfEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    return MultiplicativeFunction(m_, {});
  }
  // Odometer increment; grow the length on overflow.
  const std::uint32_t base = 2 * m_;
  std::size_t i = digits_.size();
  while (i > 0) {
    --i;
    if (++digits_[i] < base) return mf_from_codes(m_, digits_);
    digits_[i] = 0;
  }
  if (digits_.size() >= max_len_) {
    done_ = true;
    return std::nullopt;
  }
  digits_.assign(digits_.size() + 1, 0);
  return mf_from_codes(m_, digits_);
}

Word parse_word(std::string_view text, const Group& g, const ConstantResolver& resolve) {
  Word w;
  for (const auto& tok : tokenize(text)) {
    auto [base, sign] = split_exponent(tok);
    if (base == "x") {
      w.letters.emplace_back(Variable{sign});
      continue;
    }
    std::optional<Element> value;
    std::string reason;
    if (resolve) value = resolve(base);
    if (!value) {
      try {
        value = g.parse(base);
      } catch (const GroupError& e) {
        reason = e.what();
      }
    }
    if (!value) throw ParseError("unknown constant '" + std::string(base) + "' (" + reason + ")", tok.offset);
    w.letters.emplace_back(Constant{sign > 0 ? *value : g.invert_unchecked(*value)});
  }
  return w;
}

Word parse_word(std::string_view text, const Group& g) { return parse_word(text, g, nullptr); }

std::string format_word(const Word& w, const Group& g) {
  std::string out;
  for (const auto& letter : w.letters) {
    if (!out.empty()) out += ' ';
    if (const auto* c = std::get_if<Constant>(&letter)) {
      out += g.format(c->value);
    } else {
      out += std::get<Variable>(letter).sign > 0 ? "x" : "x^-1";
    }
  }
  return out;
}

MultiplicativeFunction parse_mf(std::string_view text, std::optional<std::uint32_t> arity) {
  std::vector<MfLetter> letters;
  std::uint32_t max_index = 1;
  for (const auto& tok : tokenize(text)) {
    auto [base, sign] = split_exponent(tok);
    if (base.size() < 2 || base[0] != '#') throw ParseError("expected #k", tok.offset);
    std::uint32_t k = 0;
    auto [ptr, ec] = std::from_chars(base.data() + 1, base.data() + base.size(), k);
    if (ec != std::errc{} || ptr != base.data() + base.size() || k == 0) {
      throw ParseError("bad argument index", tok.offset + 1);
    }
    if (arity && k > *arity) throw ParseError("argument index exceeds arity", tok.offset + 1);
    max_index = std::max(max_index, k);
    letters.push_back({k, sign});
  }
  return MultiplicativeFunction(arity.value_or(max_index), std::move(letters));
}

std::string format_mf(const MultiplicativeFunction& phi) {
  std::string out;
  for (const auto& l : phi.letters()) {
    if (!out.empty()) out += ' ';
    out += "#" + std::to_string(l.index);
    if (l.sign < 0) out += "^-1";
  }
  return out;
}

}  // namespace algclosure
