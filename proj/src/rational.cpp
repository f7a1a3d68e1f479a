#include <charconv>
#include <string>

#include "algclosure/element.hpp"

namespace algclosure {

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  auto read = [&](std::string_view part) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
      throw std::invalid_argument("not a rational: '" + text + "'");
    }
    return v;
  };
  std::string_view s(text);
  if (slash == std::string::npos) return Rational(read(s));
  auto den = read(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return Rational(read(s.substr(0, slash)), den);
}

}  // namespace algclosure
