#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <random>
#include <vector>

#include "qsig/hash.hpp"
#include "qsig/merkle.hpp"
#include "qsig/testkit.hpp"
#include "qsig/tokenizer.hpp"

using qsig::build_skeleton;
using qsig::build_tree;
using qsig::counting_hash;
using qsig::error;
using qsig::leaf_hash;
using qsig::merkle_tree;
using qsig::node_hash;
using qsig::sha256_hash;
using qsig::split_point;
using qsig::token_sequence;
using qsig::tokenize;

namespace {

const token_sequence& sample_message() {
  static const token_sequence tokens =
      tokenize("The quick brown fox jumps over the dog");
  return tokens;
}

// Leaf depths a tree over n tokens must have: with L = ceil(log2 n), either
// every leaf sits at depth L (n a power of two) or the first 2*(n - 2^(L-1))
// leaves sit at depth L and the rest one level higher.
std::vector<std::size_t> expected_depths(std::size_t n) {
  const std::size_t levels = std::bit_width(n - 1);  // ceil(log2 n) for n >= 1
  std::vector<std::size_t> depths(n, levels);
  if (!std::has_single_bit(n)) {
    const std::size_t deep = 2 * (n - (std::size_t{1} << (levels - 1)));
    std::fill(depths.begin() + deep, depths.end(), levels - 1);
  }
  return depths;
}

}  // namespace

TEST_CASE("split_point balances toward the nearer power of two") {
  CHECK(split_point(2) == 1);
  CHECK(split_point(3) == 2);
  CHECK(split_point(4) == 2);
  CHECK(split_point(5) == 3);
  CHECK(split_point(6) == 4);  // equidistant: right child kept complete
  CHECK(split_point(7) == 4);
  CHECK(split_point(8) == 4);
  CHECK(split_point(12) == 8);
  CHECK_THROWS_AS(split_point(1), error);
  CHECK_THROWS_AS(split_point(0), error);
}

TEST_CASE("split_point yields a full or complete child at every size") {
  for (std::size_t l = 2; l <= 4096; ++l) {
    const std::size_t left = split_point(l);
    const std::size_t right = l - left;
    CAPTURE(l, left, right);
    REQUIRE(left >= right);
    REQUIRE(right >= 1);

    const std::size_t floor_pow = std::bit_floor(l);
    if (std::has_single_bit(l)) {
      CHECK(left == l / 2);
    } else if (2 * floor_pow - l < l - floor_pow) {
      // Nearer the power above: the left child is full.
      CHECK(left == floor_pow);
    } else {
      // Nearer the power below, or equidistant: the right child stays a
      // complete tree of half the floor power.
      CHECK(right == floor_pow / 2);
    }
  }
}

TEST_CASE("skeletons have heap shape at every size") {
  for (std::size_t n = 1; n <= 4096; ++n) {
    const merkle_tree tree = build_skeleton(n);
    CAPTURE(n);
    REQUIRE(tree.size() == 2 * n - 1);
    REQUIRE(tree.leaf_count() == n);
    REQUIRE(qsig::testkit::leaf_depths(tree) == expected_depths(n));
  }
}

TEST_CASE("node spans tile the token range") {
  for (std::size_t n : {1u, 2u, 5u, 6u, 8u, 33u, 100u}) {
    const merkle_tree tree = build_skeleton(n);
    CHECK(tree.node(tree.root()).span_begin == 0);
    CHECK(tree.node(tree.root()).span_end == n);
    for (std::size_t id = 0; id < tree.size(); ++id) {
      const auto& node = tree.node(id);
      if (node.leaf()) {
        CHECK(node.span_end == node.span_begin + 1);
        CHECK(tree.leaf_of(node.span_begin) == id);
      } else {
        const auto& left = tree.node(node.left);
        const auto& right = tree.node(node.right);
        CHECK(left.span_begin == node.span_begin);
        CHECK(left.span_end == right.span_begin);
        CHECK(right.span_end == node.span_end);
        CHECK(tree.node(node.left).parent == id);
        CHECK(tree.node(node.right).parent == id);
      }
    }
  }
}

TEST_CASE("a five token tree splits three against two") {
  const auto depths = qsig::testkit::leaf_depths(build_skeleton(5));
  CHECK(depths == std::vector<std::size_t>{3, 3, 2, 2, 2});

  const merkle_tree six = build_skeleton(6);
  const auto& root = six.node(six.root());
  CHECK(six.node(root.left).span_end == 4);
}

TEST_CASE("leaf hashes are domain separated and frozen") {
  const sha256_hash h;
  CHECK(leaf_hash("The", h).hex() ==
        "0cb738e14b3027b74a23294c9298d1e1593bf39127576b780b2b672fde8a7446");
  CHECK(leaf_hash("The", h).hex() == leaf_hash("The", h).hex());
  CHECK(leaf_hash("the", h).hex() != leaf_hash("dog", h).hex());
  // The leaf prefix byte keeps leaves distinct from the bare digest.
  CHECK(leaf_hash("The", h).hex() != h.hash("The").hex());
}

TEST_CASE("node hashes depend on child order") {
  const sha256_hash h;
  const auto a = leaf_hash("a", h);
  const auto b = leaf_hash("b", h);
  CHECK(node_hash(a, b, h).hex() != node_hash(b, a, h).hex());
}

TEST_CASE("interior nodes cannot be forged from a crafted leaf") {
  const sha256_hash h;
  const auto the = leaf_hash("the", h);
  const auto dog = leaf_hash("dog", h);
  // Token whose bytes are the two bare token digests laid end to end.
  const std::string crafted = h.hash("the").bytes + h.hash("dog").bytes;
  CHECK(node_hash(the, dog, h).hex() != leaf_hash(crafted, h).hex());
}

TEST_CASE("the eight token sample root is frozen") {
  const sha256_hash h;
  const merkle_tree tree = build_tree(sample_message(), h);
  CHECK(qsig::root_digest(tree).hex() ==
        "79b11af19619714b876c38da2cf1e120156070234ba1fd3c39378605c80f9bea");
  CHECK(qsig::testkit::leaf_depths(tree) ==
        std::vector<std::size_t>(8, 3));
}

TEST_CASE("building over n tokens costs exactly 2n-1 hashes") {
  const sha256_hash inner;
  for (std::size_t n : {1u, 2u, 3u, 8u, 33u}) {
    counting_hash h(inner);
    std::mt19937_64 rng(n);
    build_tree(qsig::testkit::random_message(rng, n), h);
    CHECK(h.count() == 2 * n - 1);
  }
}

TEST_CASE("a single token is its own root") {
  const sha256_hash h;
  const merkle_tree tree = build_tree({"solo"}, h);
  CHECK(tree.size() == 1);
  CHECK(qsig::root_digest(tree).hex() == leaf_hash("solo", h).hex());
}

TEST_CASE("roots are deterministic and order sensitive") {
  const sha256_hash h;
  const auto root1 = qsig::root_digest(build_tree(sample_message(), h));
  const auto root2 = qsig::root_digest(build_tree(sample_message(), h));
  CHECK(root1.hex() == root2.hex());

  token_sequence swapped = sample_message();
  std::swap(swapped[2], swapped[3]);
  CHECK(qsig::root_digest(build_tree(swapped, h)).hex() != root1.hex());
}

TEST_CASE("skeletons carry no labels") {
  const merkle_tree tree = build_skeleton(4);
  for (std::size_t id = 0; id < tree.size(); ++id) {
    CHECK(!tree.node(id).label.has_value());
  }
  CHECK_THROWS_AS(qsig::root_digest(tree), error);
}

TEST_CASE("inorder walk visits leaves in token order") {
  const merkle_tree tree = build_skeleton(11);
  std::vector<std::size_t> leaf_positions;
  qsig::inorder_walk(tree, [&](std::size_t id) {
    if (tree.node(id).leaf()) leaf_positions.push_back(tree.node(id).span_begin);
  });
  std::vector<std::size_t> expected(11);
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = i;
  CHECK(leaf_positions == expected);
}
