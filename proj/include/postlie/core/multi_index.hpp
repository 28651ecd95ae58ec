#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace postlie {

/// Element of N^{d+1}: node and edge decorations of trees.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t length) : entries_(length, 0) {}
  MultiIndex(std::initializer_list<int> values) : entries_(values) { validate(); }
  explicit MultiIndex(const std::vector<int>& values) : entries_(values.begin(), values.end()) { validate(); }

  static MultiIndex unit(std::size_t length, std::size_t i) {
    MultiIndex e(length);
    e.entries_.at(i) = 1;
    return e;
  }

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  std::vector<int> entries() const { return {entries_.begin(), entries_.end()}; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool is_zero() const {
    for (int v : entries_)
      if (v != 0) return false;
    return true;
  }

  /// Unscaled length sum_i n_i.
  int length() const {
    int s = 0;
    for (int v : entries_) s += v;
    return s;
  }

  /// Componentwise n <= m.
  bool leq(const MultiIndex& other) const {
    require_same(other);
    for (std::size_t i = 0; i < size(); ++i)
      if (entries_[i] > other.entries_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    require_same(other);
    MultiIndex r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.entries_[i] += other.entries_[i];
    return r;
  }

  /// Componentwise difference; nullopt when some entry would go negative.
  std::optional<MultiIndex> checked_sub(const MultiIndex& other) const {
    require_same(other);
    MultiIndex r = *this;
    for (std::size_t i = 0; i < size(); ++i) {
      r.entries_[i] -= other.entries_[i];
      if (r.entries_[i] < 0) return std::nullopt;
    }
    return r;
  }

  /// Shift by a signed offset; nullopt when the result leaves N^{d+1}.
  std::optional<MultiIndex> shifted(const std::vector<int>& delta) const {
    if (delta.size() != size()) throw std::invalid_argument("multi-index length mismatch");
    MultiIndex r = *this;
    for (std::size_t i = 0; i < size(); ++i) {
      r.entries_[i] += delta[i];
      if (r.entries_[i] < 0) return std::nullopt;
    }
    return r;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) s += ",";
      s += std::to_string(entries_[i]);
    }
    return s + ")";
  }

  bool operator==(const MultiIndex& o) const { return entries_ == o.entries_; }
  std::strong_ordering operator<=>(const MultiIndex& o) const {
    return std::lexicographical_compare_three_way(entries_.begin(), entries_.end(), o.entries_.begin(),
                                                  o.entries_.end());
  }

 private:
  void validate() const {
    for (int v : entries_)
      if (v < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
  }
  void require_same(const MultiIndex& other) const {
    if (other.size() != size()) throw std::invalid_argument("multi-index length mismatch");
  }

  // inline storage covers d <= 3 without heap traffic
  boost::container::small_vector<int, 4> entries_;
};

/// All multi-indices below `top` componentwise (inclusive).
inline std::vector<MultiIndex> multi_indices_below(const MultiIndex& top) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(top.size(), 0);
  while (true) {
    out.emplace_back(cur);
    std::size_t pos = top.size();
    bool advanced = false;
    while (pos > 0) {
      --pos;
      if (cur[pos] < top[pos]) {
        ++cur[pos];
        for (std::size_t q = pos + 1; q < top.size(); ++q) cur[q] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) return out;
  }
}

/// All multi-indices of the given length with entries in [0, bound].
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t length, int bound) {
  return multi_indices_below(MultiIndex(std::vector<int>(length, bound)));
}

}  // namespace postlie
