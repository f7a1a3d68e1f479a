#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/rational.hpp>

namespace algclosure {

using Rational = boost::rational<std::int64_t>;

/// "num/den" with a positive denominator; integers keep the "/1".
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& text);

/// Opaque group element. The encoding belongs to the group that produced it:
/// a table index, an integer, a coordinate vector, or a sparse list of
/// (index, component encoding) blocks for restricted products.
class Element {
 public:
  using Storage = boost::container::small_vector<std::int64_t, 4>;

  Element() = default;
  Element(std::initializer_list<std::int64_t> words) : data_(words) {}
  explicit Element(Storage data) : data_(std::move(data)) {}

  std::span<const std::int64_t> data() const { return {data_.data(), data_.size()}; }
  Storage& storage() { return data_; }
  const Storage& storage() const { return data_; }
  std::size_t size() const { return data_.size(); }
  std::int64_t operator[](std::size_t i) const { return data_[i]; }

  std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ULL ^ data_.size();
    for (auto w : data_) {
      h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  friend bool operator==(const Element& a, const Element& b) { return a.data_ == b.data_; }
  friend bool operator<(const Element& a, const Element& b) {
    return std::lexicographical_compare(a.data_.begin(), a.data_.end(), b.data_.begin(),
                                        b.data_.end());
  }

 private:
  Storage data_;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const { return e.hash(); }
};

struct ElementPairHash {
  std::size_t operator()(const std::pair<Element, Element>& p) const {
    return p.first.hash() * 0x100000001b3ULL ^ p.second.hash();
  }
};

/// Coordinate index of a (restricted) direct product; 1-based.
using Index = std::uint32_t;

class GroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a configured search or enumeration budget runs out.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-owner cursor over a (possibly infinite) sequence of elements.
class ElementStream {
 public:
  using Generator = std::function<std::optional<Element>()>;

  ElementStream() : gen_([] { return std::optional<Element>{}; }) {}
  explicit ElementStream(Generator gen) : gen_(std::move(gen)) {}

  std::optional<Element> next() { return gen_(); }

  std::vector<Element> take(std::size_t n) {
    std::vector<Element> out;
    while (out.size() < n) {
      auto e = next();
      if (!e) break;
      out.push_back(std::move(*e));
    }
    return out;
  }

 private:
  Generator gen_;
};

}  // namespace algclosure
