#pragma once

// Support code for exercising the library: deterministic generators, an
// untagged tree variant, and level/position addressing of tree nodes. Ships
// as a header so test binaries and external experiments can share it; nothing
// here is needed on a production signing or verifying path.

#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/merkle.hpp"
#include "qsig/tokenizer.hpp"

namespace qsig::testkit {

// Tree built without the leaf and interior tag bytes. Exists to demonstrate
// the splice the tags prevent: without them, a crafted token whose bytes are
// two concatenated child digests hashes to the same value as the interior
// node above those children.
inline merkle_tree build_tree_untagged(const token_sequence& tokens,
                                       const hash_function& h) {
  return detail::build_tree_tagged(tokens, h, std::nullopt, std::nullopt);
}

// (level, position): root is (0, 0), a node's children are one level down,
// positions count left to right within a level.
struct node_coordinate {
  std::size_t level = 0;
  std::size_t position = 0;
  friend bool operator==(const node_coordinate&, const node_coordinate&) = default;
};

// Level-order ids, outer index is the level. Children are visited left then
// right, so position order within a level matches left-to-right tree order.
inline std::vector<std::vector<std::size_t>> nodes_by_level(const merkle_tree& tree) {
  std::vector<std::vector<std::size_t>> levels;
  std::queue<std::pair<std::size_t, std::size_t>> frontier;  // (id, level)
  frontier.push({tree.root(), 0});
  while (!frontier.empty()) {
    const auto [id, level] = frontier.front();
    frontier.pop();
    if (levels.size() <= level) levels.resize(level + 1);
    levels[level].push_back(id);
    const tree_node& node = tree.node(id);
    if (!node.leaf()) {
      frontier.push({node.left, level + 1});
      frontier.push({node.right, level + 1});
    }
  }
  return levels;
}

inline std::size_t node_at(const merkle_tree& tree, node_coordinate where) {
  const auto levels = nodes_by_level(tree);
  if (where.level >= levels.size() || where.position >= levels[where.level].size()) {
    throw error(errc::bad_argument, "no node at that coordinate");
  }
  return levels[where.level][where.position];
}

inline node_coordinate coordinate_of(const merkle_tree& tree, std::size_t id) {
  const auto levels = nodes_by_level(tree);
  for (std::size_t level = 0; level < levels.size(); ++level) {
    for (std::size_t pos = 0; pos < levels[level].size(); ++pos) {
      if (levels[level][pos] == id) return {level, pos};
    }
  }
  throw error(errc::bad_argument, "node not in tree");
}

inline std::vector<std::size_t> leaf_depths(const merkle_tree& tree) {
  std::vector<std::size_t> depths;
  depths.reserve(tree.leaf_count());
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    depths.push_back(tree.depth(tree.leaf_of(i)));
  }
  return depths;
}

// Tokens of 1 to 8 characters over a whitespace-free alphabet. Deterministic
// for a given generator state, which is how test runs stay reproducible.
inline token random_token(std::mt19937_64& rng) {
  static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> length_dist(1, 8);
  std::uniform_int_distribution<std::size_t> char_dist(0, sizeof(alphabet) - 2);
  token t;
  const std::size_t length = length_dist(rng);
  t.reserve(length);
  for (std::size_t i = 0; i < length; ++i) t.push_back(alphabet[char_dist(rng)]);
  return t;
}

inline token_sequence random_message(std::mt19937_64& rng, std::size_t n) {
  token_sequence tokens;
  tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tokens.push_back(random_token(rng));
  return tokens;
}

// Uniformly sized, uniformly placed quote of exactly t of n tokens.
inline index_set random_index_set(std::mt19937_64& rng, std::size_t n, std::size_t t) {
  if (t < 1 || t > n) throw error(errc::bad_argument, "need 1 <= t <= n");
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < t; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, n - 1);
    std::swap(all[i], all[dist(rng)]);
  }
  all.resize(t);
  return index_set::from_indices(all);
}

inline index_set random_index_set(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> size_dist(1, n);
  return random_index_set(rng, n, size_dist(rng));
}

// Uniformly placed window of exactly t consecutive tokens.
inline index_set random_contiguous_set(std::mt19937_64& rng, std::size_t n,
                                       std::size_t t) {
  if (t < 1 || t > n) throw error(errc::bad_argument, "need 1 <= t <= n");
  std::uniform_int_distribution<std::size_t> start_dist(0, n - t);
  const std::size_t begin = start_dist(rng);
  return index_set::from_ranges({{begin, begin + t}});
}

}  // namespace qsig::testkit
