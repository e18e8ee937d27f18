#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jetflag {

/// Element of the additive monoid N_0^d, written multiplicatively: the
/// product of two indices adds their exponents. The length d is fixed at
/// construction and never padded; mixing lengths is an error.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t length) : exponents_(length, 0) {}
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(std::size_t length) { return MultiIndex(length); }
  /// The index with a single 1 in (1-based) slot `axis`.
  static MultiIndex unit(std::size_t length, int axis);
  /// Parses the dot-separated form `2.0.1`; the empty string is the
  /// zero index of length 0.
  static MultiIndex parse(std::string_view text);

  std::size_t length() const { return exponents_.size(); }
  int order() const;
  int operator[](std::size_t i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const { return exponents_; }
  bool is_zero() const { return order() == 0; }

  /// A·a: the exponent of the (1-based) axis raised by one.
  MultiIndex bump(int axis) const;
  /// Inverse of bump; throws when that exponent is already zero.
  MultiIndex drop(int axis) const;
  /// Smallest axis with a nonzero exponent, 0 for the zero index.
  int lowest_axis() const;

  /// Axis labels of every derivative position, ascending: (2,0,1) -> {1,1,3}.
  std::vector<int> positions() const;

  std::string str() const;

  friend MultiIndex operator*(const MultiIndex& a, const MultiIndex& b);
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
};

inline int order(const MultiIndex& a) { return a.order(); }
inline MultiIndex mul(const MultiIndex& a, const MultiIndex& b) { return a * b; }
inline MultiIndex bump(const MultiIndex& a, int axis) { return a.bump(axis); }

/// Pair (A, l): spatial index A and a count l of normal derivatives.
struct FullIndex {
  MultiIndex spatial;
  int normal = 0;

  int order() const { return spatial.order() + normal; }
  friend auto operator<=>(const FullIndex&, const FullIndex&) = default;
  friend bool operator==(const FullIndex&, const FullIndex&) = default;
};

/// One term of the position-partition expansion of a multi-index B:
/// B = blocks[0]·…·blocks[s-1]·remainder, with `multiplicity` counting the
/// set partitions of the |B| derivative positions that have this shape.
struct BlockPartition {
  std::vector<MultiIndex> blocks;  // sorted, each nonzero
  MultiIndex remainder;
  std::int64_t multiplicity = 1;

  std::size_t size() const { return blocks.size(); }
  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

/// Every way to split the derivative positions of B into an unordered family
/// of s >= 0 nonempty blocks plus a possibly empty remainder, grouped by
/// shape. Ordered by block count, then blocks, then remainder.
std::vector<BlockPartition> block_partitions(const MultiIndex& b);

/// All indices of the given length and exact order, in descending
/// lexicographic order: (2,0), (1,1), (0,2).
std::vector<MultiIndex> indices_of_order(std::size_t length, int order);
/// All indices with order <= max_order, by ascending order.
std::vector<MultiIndex> indices_up_to(std::size_t length, int max_order);

std::int64_t binomial(int n, int k);

}  // namespace jetflag
