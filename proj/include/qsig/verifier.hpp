#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/merkle.hpp"
#include "qsig/quoter.hpp"
#include "qsig/sigscheme.hpp"

namespace qsig {

// Outcome of checking one quote against one public key. `valid` is the only
// security-relevant bit; the rest is context for display. A false `valid`
// comes in two flavors distinguished by `failure`: a structural one (the
// envelope and tokens cannot even be assembled into a tree, failure code is
// one of the malformed class) or a cryptographic one (everything assembled,
// the root signature does not check out).
struct verification_report {
  bool valid = false;
  std::optional<errc> failure;
  std::string failure_detail;

  std::uint64_t n = 0;
  std::size_t quoted_tokens = 0;
  std::optional<index_set> indices;
  bool contiguous = false;
  std::vector<gap_descriptor> gaps;
  std::string hash_id;
  std::string scheme_id;
  std::string tokenizer_id;
  std::uint64_t hash_evaluations = 0;
};

// Checks that `quote_tokens` under `sig` trace back to a root the signer
// really signed. Reconstruction failures are reported, never thrown: a
// verifier's job includes saying "this input is garbage" gracefully.
inline verification_report verify(const token_sequence& quote_tokens,
                                  const quote_signature& sig, const public_key& key) {
  verification_report report;
  report.n = sig.n;
  report.quoted_tokens = quote_tokens.size();
  report.hash_id = sig.hash_id;
  report.scheme_id = sig.scheme_id;
  report.tokenizer_id = sig.tokenizer_id;
  report.indices = sig.indices;
  report.contiguous = sig.indices.contiguous();

  try {
    if (sig.version != envelope_version) {
      throw error(errc::envelope_unsupported_version, std::to_string(sig.version));
    }
    if (sig.n == 0 || sig.indices.max_index() >= sig.n) {
      throw error(errc::envelope_index_out_of_bounds, "indices exceed token count");
    }
    report.gaps = sig.indices.gaps(sig.n);

    const auto h = make_hash(sig.hash_id);
    counting_hash counter(*h);
    merkle_tree tree = detail::rebuild_labeled_tree(quote_tokens, sig.n, sig.indices,
                                                    sig.path, counter);
    report.hash_evaluations = counter.count();

    if (verify_digest(detail::signed_payload(root_digest(tree), sig.n), sig.root_sig,
                      key)) {
      report.valid = true;
    } else {
      report.failure = errc::signature_rejected;
      report.failure_detail = "root signature does not verify under the given key";
    }
  } catch (const error& e) {
    report.valid = false;
    report.failure = e.code();
    report.failure_detail = e.what();
  }
  return report;
}

// Reconstructs the root from a quote without checking any classical
// signature. Useful for consistency checks when no public key is at hand.
inline digest reconstruct_root(const token_sequence& quote_tokens, std::uint64_t n,
                               const index_set& quoted, const std::vector<digest>& path,
                               const hash_function& h) {
  return root_digest(detail::rebuild_labeled_tree(quote_tokens, n, quoted, path, h));
}

// Hash evaluations a verifier spends on a quote of this shape, computed from
// the shape alone: one per quoted token's leaf, one per interior node whose
// span touches a quoted token. Everything else arrives precomputed in the
// path. Agrees with the count measured during an actual verification.
inline std::uint64_t count_verify_hashes(std::uint64_t n, const index_set& quoted) {
  if (n == 0 || quoted.max_index() >= n) {
    throw error(errc::index_out_of_range, "indices exceed token count");
  }
  merkle_tree tree = build_skeleton(n);
  std::uint64_t count = 0;
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const tree_node& node = tree.node(id);
    if (node.leaf()) {
      count += quoted.contains(node.span_begin) ? 1 : 0;
    } else {
      count += quoted.intersects(node.span_begin, node.span_end) ? 1 : 0;
    }
  }
  return count;
}

// Plain-text rendering of a report, one `key: value` per line, gaps as
// repeated `gap:` lines. Stable order so scripts can scrape it.
inline std::string to_text(const verification_report& report) {
  std::string out;
  out += "valid: ";
  out += report.valid ? "true" : "false";
  out += '\n';
  out += "reason: ";
  out += report.failure ? std::string(to_string(*report.failure)) : "ok";
  out += '\n';
  if (!report.failure_detail.empty()) {
    out += "detail: " + report.failure_detail + '\n';
  }
  out += "scheme: " + report.scheme_id + '\n';
  out += "hash: " + report.hash_id + '\n';
  out += "tokenizer: " + report.tokenizer_id + '\n';
  out += "n: " + std::to_string(report.n) + '\n';
  out += "quoted: " + std::to_string(report.quoted_tokens) + '\n';
  if (report.indices) {
    out += "indices: " + to_string(*report.indices) + '\n';
    out += "contiguous: ";
    out += report.contiguous ? "true" : "false";
    out += '\n';
  }
  for (const auto& gap : report.gaps) {
    out += "gap: position=" + std::to_string(gap.position) +
           " missing=" + std::to_string(gap.missing) + '\n';
  }
  out += "hash-evaluations: " + std::to_string(report.hash_evaluations) + '\n';
  return out;
}

}  // namespace qsig
