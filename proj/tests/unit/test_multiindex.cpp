#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "jetflag/error.hpp"
#include "jetflag/multiindex.hpp"

using jetflag::BlockPartition;
using jetflag::Error;
using jetflag::ErrorCode;
using jetflag::MultiIndex;

TEST_CASE("order and product") {
  CHECK(MultiIndex(3).order() == 0);
  CHECK(MultiIndex(std::vector<int>{2, 0, 1}).order() == 3);
  const MultiIndex a({1, 0}), b({0, 2});
  CHECK(a * b == MultiIndex(std::vector<int>{1, 2}));
  CHECK((a * b).order() == 3);
  CHECK(a * MultiIndex(2) == a);
  CHECK(MultiIndex(std::vector<int>{1, 1}) * MultiIndex(std::vector<int>{1, 1}) == MultiIndex(std::vector<int>{2, 2}));
  CHECK_THROWS_AS(MultiIndex(2) * MultiIndex(3), Error);
  CHECK_THROWS_AS(MultiIndex(std::vector<int>{1, -1}), Error);
}

TEST_CASE("monoid laws on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> e(0, 3);
  for (int i = 0; i < 100; ++i) {
    MultiIndex a({e(rng), e(rng), e(rng)}), b({e(rng), e(rng), e(rng)}), c({e(rng), e(rng), e(rng)});
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(MultiIndex(3) * a == a);
  }
}

TEST_CASE("bump") {
  CHECK(MultiIndex(2).bump(1) == MultiIndex(std::vector<int>{1, 0}));
  CHECK(MultiIndex(std::vector<int>{2, 1}).bump(2) == MultiIndex(std::vector<int>{2, 2}));
  CHECK(MultiIndex(std::vector<int>{3, 0}).bump(1).order() == 4);
  try {
    (void)MultiIndex(2).bump(3);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::axis_out_of_range);
  }
  CHECK_THROWS_AS((void)MultiIndex(2).bump(0), Error);
}

TEST_CASE("text form") {
  CHECK(MultiIndex::parse("2.0.1") == MultiIndex(std::vector<int>{2, 0, 1}));
  CHECK(MultiIndex(std::vector<int>{0, 0, 0}).str() == "0.0.0");
  CHECK(MultiIndex::parse("").length() == 0);
  CHECK_THROWS_AS(MultiIndex::parse("1.x"), Error);
}

TEST_CASE("block partitions of small indices") {
  auto zero = jetflag::block_partitions(MultiIndex(2));
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].blocks.empty());
  CHECK(zero[0].multiplicity == 1);

  auto one = jetflag::block_partitions(MultiIndex(std::vector<int>{1}));
  REQUIRE(one.size() == 2);
  CHECK(one[0].blocks.empty());
  CHECK(one[0].remainder == MultiIndex(std::vector<int>{1}));
  CHECK(one[1].blocks == std::vector<MultiIndex>{MultiIndex(std::vector<int>{1})});
  CHECK(one[1].remainder == MultiIndex(std::vector<int>{0}));

  // (aa): remainder aa; {a} with remainder a twice; {aa}; {a, a}.
  auto two = jetflag::block_partitions(MultiIndex(std::vector<int>{2}));
  REQUIRE(two.size() == 4);
  std::map<std::pair<std::vector<MultiIndex>, MultiIndex>, std::int64_t> got;
  for (const auto& bp : two) got[{bp.blocks, bp.remainder}] = bp.multiplicity;
  CHECK(got.at({{}, MultiIndex(std::vector<int>{2})}) == 1);
  CHECK(got.at({{MultiIndex(std::vector<int>{1})}, MultiIndex(std::vector<int>{1})}) == 2);
  CHECK(got.at({{MultiIndex(std::vector<int>{2})}, MultiIndex(std::vector<int>{0})}) == 1);
  CHECK(got.at({{MultiIndex(std::vector<int>{1}), MultiIndex(std::vector<int>{1})}, MultiIndex(std::vector<int>{0})}) == 1);
}

TEST_CASE("block partitions reassemble B and count set partitions") {
  for (std::size_t len = 1; len <= 3; ++len) {
    for (const auto& b : jetflag::indices_up_to(len, 4)) {
      long total = 0;
      for (const auto& bp : jetflag::block_partitions(b)) {
        MultiIndex prod = bp.remainder;
        for (const auto& blk : bp.blocks) {
          CHECK_FALSE(blk.is_zero());
          prod = prod * blk;
        }
        CHECK(prod == b);
        CHECK(bp.multiplicity >= 1);
        total += bp.multiplicity;
      }
      CHECK(total == oracle::count_block_remainder_partitions(b.order()));
    }
  }
}

TEST_CASE("index enumeration") {
  auto lvl = jetflag::indices_of_order(2, 2);
  REQUIRE(lvl.size() == 3);
  CHECK(lvl[0] == MultiIndex(std::vector<int>{2, 0}));
  CHECK(lvl[1] == MultiIndex(std::vector<int>{1, 1}));
  CHECK(lvl[2] == MultiIndex(std::vector<int>{0, 2}));
  CHECK(jetflag::indices_up_to(3, 2).size() == 10);
  CHECK(jetflag::binomial(5, 2) == 10);
}
