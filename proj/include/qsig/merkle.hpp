#pragma once

#include <bit>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/hash.hpp"
#include "qsig/tokenizer.hpp"

namespace qsig {

inline constexpr std::size_t no_node = static_cast<std::size_t>(-1);

struct tree_node {
  std::size_t left = no_node;
  std::size_t right = no_node;
  std::size_t parent = no_node;
  // Token range [span_begin, span_end) covered by this node.
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  std::optional<digest> label;

  bool leaf() const noexcept { return left == no_node; }
  std::size_t span_size() const noexcept { return span_end - span_begin; }
};

class merkle_tree;
inline merkle_tree build_skeleton(std::size_t n);

// Binary hash tree over n tokens with heap shape: every level full except
// possibly the deepest, which is filled from the left. Exactly 2n-1 nodes,
// one leaf per token; for n == 1 the root is itself the leaf. Nodes sit in
// preorder, so the root is index 0. Labels are optional because the same
// structure serves fully hashed trees and bare skeletons rebuilt from
// (n, indices) alone, which verifiers label incrementally.
class merkle_tree {
 public:
  std::size_t root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_by_token_.size(); }

  const tree_node& node(std::size_t id) const { return nodes_.at(id); }
  tree_node& node(std::size_t id) { return nodes_.at(id); }

  std::size_t leaf_of(std::size_t token_index) const {
    if (token_index >= leaf_by_token_.size()) {
      throw error(errc::index_out_of_range,
                  "token " + std::to_string(token_index) + " of " +
                      std::to_string(leaf_by_token_.size()));
    }
    return leaf_by_token_[token_index];
  }

  std::size_t sibling(std::size_t id) const {
    const std::size_t p = node(id).parent;
    if (p == no_node) throw error(errc::internal, "root has no sibling");
    const tree_node& parent = node(p);
    return parent.left == id ? parent.right : parent.left;
  }

  std::size_t depth(std::size_t id) const {
    std::size_t d = 0;
    for (std::size_t cur = id; node(cur).parent != no_node; cur = node(cur).parent) ++d;
    return d;
  }

 private:
  merkle_tree() = default;
  friend merkle_tree build_skeleton(std::size_t n);

  std::vector<tree_node> nodes_;
  std::vector<std::size_t> leaf_by_token_;
};

// How many tokens go under the left child of a node spanning l of them. The
// subtree sizes are chosen so the whole tree keeps heap shape: pick the power
// of two nearest to l; when l is nearer the larger power the left child takes
// the largest full tree that fits, otherwise (including ties) the right child
// takes a complete tree of half the smaller power.
inline std::size_t split_point(std::size_t l) {
  if (l < 2) throw error(errc::bad_argument, "split needs at least two tokens");
  if (std::has_single_bit(l)) return l / 2;
  const std::size_t floor_pow = std::bit_floor(l);
  const std::size_t ceil_pow = floor_pow << 1;
  if (ceil_pow - l < l - floor_pow) return floor_pow;
  return l - floor_pow / 2;
}

// Unlabeled tree over n tokens. Shape depends only on n, which is what lets
// a verifier reproduce it from the envelope without seeing the message.
inline merkle_tree build_skeleton(std::size_t n) {
  if (n == 0) throw error(errc::empty_message, "no tokens to build a tree over");
  merkle_tree tree;
  tree.nodes_.reserve(2 * n - 1);
  tree.leaf_by_token_.assign(n, no_node);

  const auto add_node = [&tree](std::size_t begin, std::size_t end, std::size_t parent) {
    tree_node node;
    node.span_begin = begin;
    node.span_end = end;
    node.parent = parent;
    tree.nodes_.push_back(node);
    return tree.nodes_.size() - 1;
  };

  const auto build = [&](auto&& self, std::size_t begin, std::size_t end,
                         std::size_t parent) -> std::size_t {
    const std::size_t id = add_node(begin, end, parent);
    if (end - begin == 1) {
      tree.leaf_by_token_[begin] = id;
      return id;
    }
    const std::size_t left_size = split_point(end - begin);
    tree.nodes_[id].left = self(self, begin, begin + left_size, id);
    tree.nodes_[id].right = self(self, begin + left_size, end, id);
    return id;
  };
  build(build, 0, n, no_node);
  return tree;
}

namespace detail {

// Leaves and interior nodes hash under distinct one-byte tags. Without the
// tags an interior digest could be re-created as the "leaf" of a crafted
// token whose bytes are the concatenation of two child digests, letting a
// different message reuse a genuine root signature. Tags are parameters here
// solely so tests can build the untagged variant and show that splice.
inline digest tagged_hash(const hash_function& h, std::optional<char> tag,
                          std::string_view a, std::string_view b = {}) {
  std::string preimage;
  preimage.reserve((tag ? 1 : 0) + a.size() + b.size());
  if (tag) preimage.push_back(*tag);
  preimage.append(a);
  preimage.append(b);
  return h.hash(preimage);
}

inline merkle_tree build_tree_tagged(const token_sequence& tokens, const hash_function& h,
                                     std::optional<char> leaf_tag,
                                     std::optional<char> node_tag) {
  merkle_tree tree = build_skeleton(tokens.size());
  // Preorder puts children after parents, so walking backwards guarantees
  // both child labels exist before the parent needs them.
  for (std::size_t id = tree.size(); id-- > 0;) {
    tree_node& node = tree.node(id);
    if (node.leaf()) {
      node.label = tagged_hash(h, leaf_tag, tokens[node.span_begin]);
    } else {
      node.label = tagged_hash(h, node_tag, tree.node(node.left).label->bytes,
                               tree.node(node.right).label->bytes);
    }
  }
  return tree;
}

}  // namespace detail

inline constexpr char leaf_tag = 0x00;
inline constexpr char node_tag = 0x01;

inline digest leaf_hash(const token& t, const hash_function& h) {
  return detail::tagged_hash(h, leaf_tag, t);
}

inline digest node_hash(const digest& left, const digest& right, const hash_function& h) {
  return detail::tagged_hash(h, node_tag, left.bytes, right.bytes);
}

// Fully labeled tree: exactly 2n-1 hash evaluations, one per node.
inline merkle_tree build_tree(const token_sequence& tokens, const hash_function& h) {
  return detail::build_tree_tagged(tokens, h, leaf_tag, node_tag);
}

inline const digest& root_digest(const merkle_tree& tree) {
  const auto& label = tree.node(tree.root()).label;
  if (!label) throw error(errc::internal, "root label not computed");
  return *label;
}

// Inorder walk, left subtree before node before right subtree. Required
// hashes travel in this order, so quoter and verifier must agree on it.
template <typename Visit>
void inorder_walk(const merkle_tree& tree, Visit&& visit) {
  const auto walk = [&](auto&& self, std::size_t id) -> void {
    const tree_node& node = tree.node(id);
    if (!node.leaf()) self(self, node.left);
    visit(id);
    if (!node.leaf()) self(self, node.right);
  };
  walk(walk, tree.root());
}

}  // namespace qsig
