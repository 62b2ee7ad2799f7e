#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/merkle.hpp"
#include "qsig/sigscheme.hpp"
#include "qsig/tokenizer.hpp"

namespace qsig {

inline constexpr std::uint32_t envelope_version = 1;

// Everything a third party needs to check a quote: the signer's signature
// over the full-message tree root, the original token count (the tree shape
// follows from it), which tokens the quote keeps, and the off-path hashes
// that bridge from the quoted tokens back up to the root. No secret key is
// involved in producing one of these from an existing signature.
struct quote_signature {
  std::uint32_t version;
  std::string hash_id;
  std::string scheme_id;
  std::string tokenizer_id;
  std::uint64_t n;
  index_set indices;
  std::vector<digest> path;
  root_signature root_sig;

  bool full_message() const noexcept { return indices.covers_all(n); }

  friend bool operator==(const quote_signature&, const quote_signature&) = default;
};

// Per-node marks used while selecting the hashes a quote must carry.
// `deleted` is the initial state everywhere: nothing proven needed yet.
// `required` marks a node whose digest must be shipped in the path.
// `implicit` marks a node whose digest the verifier can compute, so an
// earlier `required` mark on it has been retracted.
enum class flag : unsigned char { deleted, required, implicit };

struct flag_assignment {
  std::vector<flag> flags;
  // Walks should terminate on a `required` mark before ever meeting an
  // `implicit` one when tokens are processed in increasing order. True here
  // means that assumption broke; kept visible so tests can pin it down.
  bool stopped_at_implicit = false;
};

// Walks from each quoted token's leaf toward the root, marking the siblings
// along the way as required. When a walk reaches a node some earlier walk
// already marked required, both that node and its sibling become computable
// from below, so they are downgraded to implicit and the walk stops: the
// earlier walk has already covered everything above. Tokens must be taken in
// increasing order for that stop rule to be sound, which to_indices gives us.
inline flag_assignment mark_flags(const merkle_tree& tree, const index_set& quoted) {
  if (quoted.max_index() >= tree.leaf_count()) {
    throw error(errc::index_out_of_range,
                "quote index " + std::to_string(quoted.max_index()) + " in a " +
                    std::to_string(tree.leaf_count()) + " token message");
  }
  flag_assignment out;
  out.flags.assign(tree.size(), flag::deleted);
  if (tree.size() == 1) return out;  // single token: root is the leaf, no path

  const std::size_t root = tree.root();
  for (std::size_t token_index : quoted.to_indices()) {
    std::size_t v = tree.leaf_of(token_index);
    while (v != root) {
      if (out.flags[v] == flag::deleted) {
        out.flags[tree.sibling(v)] = flag::required;
        v = tree.node(v).parent;
      } else if (out.flags[v] == flag::required) {
        out.flags[v] = flag::implicit;
        out.flags[tree.sibling(v)] = flag::implicit;
        break;
      } else {
        out.stopped_at_implicit = true;
        break;
      }
    }
  }
  return out;
}

// Required nodes in inorder position. Producer and consumer of a path must
// agree on one order; inorder is it.
inline std::vector<std::size_t> required_nodes_inorder(const merkle_tree& tree,
                                                       const flag_assignment& fa) {
  std::vector<std::size_t> out;
  inorder_walk(tree, [&](std::size_t id) {
    if (fa.flags[id] == flag::required) out.push_back(id);
  });
  return out;
}

inline std::vector<digest> collect_required(const merkle_tree& tree,
                                            const flag_assignment& fa) {
  std::vector<digest> out;
  for (std::size_t id : required_nodes_inorder(tree, fa)) {
    const auto& label = tree.node(id).label;
    if (!label) throw error(errc::internal, "required node has no computed digest");
    out.push_back(*label);
  }
  return out;
}

namespace detail {

// Bytes the classical signature actually covers: the root digest, then the
// token count, big-endian. The count has to be in there. A path digest is
// opaque (nothing says whether it closed a leaf or an interior node), so the
// digest of a lone deepest leaf replays verbatim as the closed right subtree
// of a message one token longer; the two roots' preimages coincide and only
// the signed bytes can separate the claims.
inline digest signed_payload(const digest& root, std::uint64_t n) {
  std::string bytes = root.bytes;
  for (int shift = 56; shift >= 0; shift -= 8) {
    bytes.push_back(static_cast<char>((n >> shift) & 0xff));
  }
  return digest{std::move(bytes)};
}

}  // namespace detail

inline quote_signature sign_message(const token_sequence& tokens, const secret_key& key,
                                    const hash_function& h,
                                    std::string_view tokenizer_id = default_tokenizer_id) {
  if (tokens.empty()) throw error(errc::empty_message, "nothing to sign");
  merkle_tree tree = build_tree(tokens, h);
  root_signature sig =
      sign_digest(detail::signed_payload(root_digest(tree), tokens.size()), key);
  return quote_signature{envelope_version,
                         std::string(h.id()),
                         key.scheme_id,
                         std::string(tokenizer_id),
                         tokens.size(),
                         index_set::full(tokens.size()),
                         {},
                         std::move(sig)};
}

inline quote_signature sign_message(const token_sequence& tokens, const secret_key& key) {
  sha256_hash h;
  return sign_message(tokens, key, h);
}

// Derives a quote signature from a signature over the complete message. Needs
// the complete token sequence to rebuild the tree, but not the secret key:
// the root signature is reused verbatim.
inline quote_signature quote(const token_sequence& message, const index_set& quoted,
                             const quote_signature& message_sig, const hash_function& h) {
  if (!message_sig.full_message()) {
    throw error(errc::not_full_message, "quoting needs a signature over the whole message");
  }
  if (h.id() != message_sig.hash_id) {
    throw error(errc::bad_argument, "hash function does not match signature hash_id");
  }
  if (message.size() != message_sig.n) {
    throw error(errc::token_count_mismatch,
                std::to_string(message.size()) + " tokens given, signature covers " +
                    std::to_string(message_sig.n));
  }
  merkle_tree tree = build_tree(message, h);
  flag_assignment fa = mark_flags(tree, quoted);
  return quote_signature{message_sig.version, message_sig.hash_id,
                         message_sig.scheme_id, message_sig.tokenizer_id,
                         message_sig.n,        quoted,
                         collect_required(tree, fa), message_sig.root_sig};
}

inline quote_signature quote(const token_sequence& message, const index_set& quoted,
                             const quote_signature& message_sig) {
  auto h = make_hash(message_sig.hash_id);
  return quote(message, quoted, message_sig, *h);
}

namespace detail {

// Shared reconstruction step: rebuild the tree shape from n, replay the flag
// marking from the index set, lay the supplied path digests onto the required
// nodes in inorder position, hash the quoted tokens into their leaves, then
// fill in every digest derivable from those. Both verification and
// sub-quoting start exactly this way; verification then checks the root
// label, sub-quoting collects a new path from the other labels.
inline merkle_tree rebuild_labeled_tree(const token_sequence& quote_tokens,
                                        std::uint64_t n, const index_set& quoted,
                                        const std::vector<digest>& path,
                                        const hash_function& h) {
  if (quote_tokens.size() != quoted.count()) {
    throw error(errc::token_count_mismatch,
                std::to_string(quote_tokens.size()) + " tokens for " +
                    std::to_string(quoted.count()) + " quoted indices");
  }
  for (const digest& d : path) {
    if (d.bytes.size() != h.digest_size()) {
      throw error(errc::envelope_digest_length, "path digest has wrong length");
    }
  }
  merkle_tree tree = build_skeleton(n);
  flag_assignment fa = mark_flags(tree, quoted);

  const std::vector<std::size_t> required = required_nodes_inorder(tree, fa);
  if (path.size() < required.size()) {
    throw error(errc::path_too_short,
                "need " + std::to_string(required.size()) + " digests, have " +
                    std::to_string(path.size()));
  }
  if (path.size() > required.size()) {
    throw error(errc::path_too_long,
                "need " + std::to_string(required.size()) + " digests, have " +
                    std::to_string(path.size()));
  }
  for (std::size_t i = 0; i < required.size(); ++i) tree.node(required[i]).label = path[i];

  const std::vector<std::size_t> positions = quoted.to_indices();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    tree.node(tree.leaf_of(positions[i])).label = leaf_hash(quote_tokens[i], h);
  }

  const auto compute = [&](auto&& self, std::size_t id) -> const digest& {
    tree_node& node = tree.node(id);
    if (node.label) return *node.label;
    if (node.leaf()) {
      // Unreachable on well-formed input: an unquoted leaf always sits under
      // some required node, and path placement above labeled all of those.
      throw error(errc::internal, "reconstruction reached an unlabeled leaf");
    }
    node.label = node_hash(self(self, node.left), self(self, node.right), h);
    return *node.label;
  };
  compute(compute, tree.root());
  return tree;
}

}  // namespace detail

// Narrows an existing quote to a subset of its tokens. `positions` selects by
// position within the quote (0 is the first quoted token), not by original
// message index; the result carries the translated original indices. Works on
// any verifiable quote signature, full or already narrowed, and again needs
// no key: every digest the narrower quote must ship is either carried by the
// parent's path or computable from the parent's tokens.
inline quote_signature subquote(const token_sequence& quote_tokens,
                                const quote_signature& parent, const index_set& positions,
                                const hash_function& h) {
  if (h.id() != parent.hash_id) {
    throw error(errc::bad_argument, "hash function does not match signature hash_id");
  }
  const std::vector<std::size_t> parent_indices = parent.indices.to_indices();
  if (positions.max_index() >= parent_indices.size()) {
    throw error(errc::index_out_of_range,
                "position " + std::to_string(positions.max_index()) + " in a " +
                    std::to_string(parent_indices.size()) + " token quote");
  }
  std::vector<std::size_t> absolute;
  absolute.reserve(positions.count());
  for (std::size_t p : positions.to_indices()) absolute.push_back(parent_indices[p]);
  const index_set quoted = index_set::from_indices(absolute);

  merkle_tree tree =
      detail::rebuild_labeled_tree(quote_tokens, parent.n, parent.indices, parent.path, h);
  flag_assignment fa = mark_flags(tree, quoted);
  return quote_signature{parent.version, parent.hash_id,  parent.scheme_id,
                         parent.tokenizer_id, parent.n,   quoted,
                         collect_required(tree, fa), parent.root_sig};
}

inline quote_signature subquote(const token_sequence& quote_tokens,
                                const quote_signature& parent,
                                const index_set& positions) {
  auto h = make_hash(parent.hash_id);
  return subquote(quote_tokens, parent, positions, *h);
}

}  // namespace qsig
