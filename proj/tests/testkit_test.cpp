#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "qsig/hash.hpp"
#include "qsig/merkle.hpp"
#include "qsig/testkit.hpp"
#include "qsig/tokenizer.hpp"

using qsig::build_tree;
using qsig::counting_hash;
using qsig::merkle_tree;
using qsig::sha256_hash;
using qsig::token_sequence;
using qsig::tokenize;
using qsig::testkit::build_tree_untagged;
using qsig::testkit::coordinate_of;
using qsig::testkit::node_at;
using qsig::testkit::node_coordinate;
using qsig::testkit::nodes_by_level;

namespace {

const token_sequence& sample_message() {
  static const token_sequence tokens =
      tokenize("The quick brown fox jumps over the dog");
  return tokens;
}

// Seven tokens whose last one packs the two bare digests of "the" and "dog"
// into a single token. Against untagged hashing, its leaf digest equals the
// interior digest over those two words, so this shorter message collides
// with the eight token sample.
token_sequence spliced_message() {
  const sha256_hash h;
  token_sequence tokens(sample_message().begin(), sample_message().end() - 2);
  tokens.push_back(h.hash("the").bytes + h.hash("dog").bytes);
  return tokens;
}

}  // namespace

TEST_CASE("untagged hashing lets a crafted token impersonate a subtree") {
  const sha256_hash h;
  const auto original = build_tree_untagged(sample_message(), h);
  const auto spliced = build_tree_untagged(spliced_message(), h);

  const std::string collided =
      "bdf476027721e4116f6f9b07ea8db1186bd4a6238ee4583c2ec3c8d20780a58c";
  CHECK(qsig::root_digest(original).hex() == collided);
  CHECK(qsig::root_digest(spliced).hex() == collided);
}

TEST_CASE("tagged hashing separates the spliced message from the original") {
  const sha256_hash h;
  CHECK(qsig::root_digest(build_tree(sample_message(), h)).hex() ==
        "79b11af19619714b876c38da2cf1e120156070234ba1fd3c39378605c80f9bea");
  CHECK(qsig::root_digest(build_tree(spliced_message(), h)).hex() ==
        "a2de87cff6ca58b0394c16f51656e1249496a8af0b6a4730a17ddcf48e3a5d8a");
}

TEST_CASE("level order addressing matches tree structure") {
  const merkle_tree tree = qsig::build_skeleton(8);
  const auto levels = nodes_by_level(tree);
  REQUIRE(levels.size() == 4);
  CHECK(levels[0].size() == 1);
  CHECK(levels[1].size() == 2);
  CHECK(levels[2].size() == 4);
  CHECK(levels[3].size() == 8);

  CHECK(node_at(tree, {0, 0}) == tree.root());
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(node_at(tree, {3, k}) == tree.leaf_of(k));
  }
  for (std::size_t id = 0; id < tree.size(); ++id) {
    CHECK(node_at(tree, coordinate_of(tree, id)) == id);
  }
  CHECK_THROWS_AS(node_at(tree, {9, 0}), qsig::error);
  CHECK_THROWS_AS(node_at(tree, {1, 2}), qsig::error);
}

TEST_CASE("leaf depths read off the skeleton") {
  CHECK(qsig::testkit::leaf_depths(qsig::build_skeleton(5)) ==
        std::vector<std::size_t>{3, 3, 2, 2, 2});
  CHECK(qsig::testkit::leaf_depths(qsig::build_skeleton(1)) ==
        std::vector<std::size_t>{0});
}

TEST_CASE("generators are deterministic per seed") {
  std::mt19937_64 a(99), b(99);
  CHECK(qsig::testkit::random_message(a, 12) == qsig::testkit::random_message(b, 12));
  CHECK(qsig::testkit::random_index_set(a, 30, 7) ==
        qsig::testkit::random_index_set(b, 30, 7));
  CHECK(qsig::testkit::random_contiguous_set(a, 30, 7) ==
        qsig::testkit::random_contiguous_set(b, 30, 7));
}

TEST_CASE("random index sets hit the requested shape") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const std::size_t t = 1 + rng() % n;
    const auto s = qsig::testkit::random_index_set(rng, n, t);
    CHECK(s.count() == t);
    CHECK(s.max_index() < n);

    const auto w = qsig::testkit::random_contiguous_set(rng, n, t);
    CHECK(w.count() == t);
    CHECK(w.contiguous());
    CHECK(w.max_index() < n);
  }
  CHECK_THROWS_AS(qsig::testkit::random_index_set(rng, 5, 6), qsig::error);
  CHECK_THROWS_AS(qsig::testkit::random_contiguous_set(rng, 5, 0), qsig::error);
}

TEST_CASE("random tokens stay in the whitespace-free alphabet") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = qsig::testkit::random_token(rng);
    CHECK(!t.empty());
    CHECK(t.size() <= 8);
    CHECK(tokenize(t) == token_sequence{t});
  }
}

TEST_CASE("counting_hash counts and resets") {
  const sha256_hash inner;
  counting_hash h(inner);
  CHECK(h.count() == 0);
  h.hash("a");
  h.hash("b");
  CHECK(h.count() == 2);
  CHECK(h.hash("a") == inner.hash("a"));
  CHECK(h.count() == 3);
  h.reset();
  CHECK(h.count() == 0);
  CHECK(h.digest_size() == 32);
  CHECK(h.id() == "sha-256");
}
