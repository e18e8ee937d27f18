#include "jetflag/multiindex.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <numeric>

#include "jetflag/error.hpp"

namespace jetflag {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw Error(ErrorCode::invalid_argument, "multi-index exponents must be non-negative");
  }
}

MultiIndex MultiIndex::unit(std::size_t length, int axis) { return MultiIndex(length).bump(axis); }

MultiIndex MultiIndex::parse(std::string_view text) {
  std::vector<int> exps;
  if (text.empty()) return MultiIndex(std::move(exps));
  std::size_t start = 0;
  while (true) {
    std::size_t dot = text.find('.', start);
    std::string_view piece = text.substr(start, dot == std::string_view::npos ? text.size() - start : dot - start);
    int value = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size()) {
      throw ParseError(start, "malformed multi-index '" + std::string(text) + "'");
    }
    exps.push_back(value);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return MultiIndex(std::move(exps));
}

int MultiIndex::order() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

MultiIndex MultiIndex::bump(int axis) const {
  if (axis < 1 || static_cast<std::size_t>(axis) > exponents_.size()) {
    throw Error(ErrorCode::axis_out_of_range,
                "axis " + std::to_string(axis) + " outside 1.." + std::to_string(exponents_.size()));
  }
  MultiIndex out = *this;
  ++out.exponents_[axis - 1];
  return out;
}

MultiIndex MultiIndex::drop(int axis) const {
  if (axis < 1 || static_cast<std::size_t>(axis) > exponents_.size()) {
    throw Error(ErrorCode::axis_out_of_range,
                "axis " + std::to_string(axis) + " outside 1.." + std::to_string(exponents_.size()));
  }
  if (exponents_[axis - 1] == 0) throw Error(ErrorCode::invalid_argument, "cannot lower a zero exponent");
  MultiIndex out = *this;
  --out.exponents_[axis - 1];
  return out;
}

int MultiIndex::lowest_axis() const {
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] > 0) return static_cast<int>(i) + 1;
  }
  return 0;
}

std::vector<int> MultiIndex::positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    out.insert(out.end(), exponents_[i], static_cast<int>(i) + 1);
  }
  return out;
}

std::string MultiIndex::str() const {
  std::string out;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(exponents_[i]);
  }
  return out;
}

MultiIndex operator*(const MultiIndex& a, const MultiIndex& b) {
  if (a.length() != b.length()) {
    throw Error(ErrorCode::dimension_mismatch, "multi-index lengths differ: " + std::to_string(a.length()) +
                                                   " vs " + std::to_string(b.length()));
  }
  MultiIndex out = a;
  for (std::size_t i = 0; i < a.length(); ++i) out.exponents_[i] += b.exponents_[i];
  return out;
}

std::vector<BlockPartition> block_partitions(const MultiIndex& b) {
  const std::vector<int> pos = b.positions();
  const std::size_t len = b.length();

  using Shape = std::pair<std::vector<MultiIndex>, MultiIndex>;
  std::map<Shape, std::int64_t> shapes;

  // Walk the set partitions of the positions: each one goes to the remainder,
  // to an already opened block, or opens a new block.
  std::vector<MultiIndex> blocks;
  MultiIndex remainder(len);
  std::function<void(std::size_t)> place = [&](std::size_t i) {
    if (i == pos.size()) {
      std::vector<MultiIndex> sorted = blocks;
      std::sort(sorted.begin(), sorted.end());
      ++shapes[{std::move(sorted), remainder}];
      return;
    }
    const int axis = pos[i];
    remainder = remainder.bump(axis);
    place(i + 1);
    remainder = remainder.drop(axis);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      blocks[j] = blocks[j].bump(axis);
      place(i + 1);
      blocks[j] = blocks[j].drop(axis);
    }
    blocks.push_back(MultiIndex::unit(len, axis));
    place(i + 1);
    blocks.pop_back();
  };
  place(0);

  std::vector<BlockPartition> out;
  out.reserve(shapes.size());
  for (auto& [shape, count] : shapes) out.push_back({shape.first, shape.second, count});
  std::stable_sort(out.begin(), out.end(),
                   [](const BlockPartition& x, const BlockPartition& y) { return x.size() < y.size(); });
  return out;
}

std::vector<MultiIndex> indices_of_order(std::size_t length, int order) {
  std::vector<MultiIndex> out;
  if (length == 0) {
    if (order == 0) out.emplace_back(0);
    return out;
  }
  std::vector<int> exps(length, 0);
  std::function<void(std::size_t, int)> fill = [&](std::size_t slot, int left) {
    if (slot + 1 == length) {
      exps[slot] = left;
      out.emplace_back(exps);
      return;
    }
    for (int e = left; e >= 0; --e) {
      exps[slot] = e;
      fill(slot + 1, left - e);
    }
  };
  fill(0, order);
  return out;
}

std::vector<MultiIndex> indices_up_to(std::size_t length, int max_order) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_order; ++k) {
    auto level = indices_of_order(length, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace jetflag
