#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/index_set.hpp"

namespace qsig {

// Tokens are the atoms of quoting: a quote can drop tokens but never split
// one. They are raw bytes, not text; the tree layer hashes them as-is.
using token = std::string;
using token_sequence = std::vector<token>;

// Identifier of the only splitting rule currently defined: split on Unicode
// whitespace, collapse runs, keep everything else byte-for-byte.
inline constexpr std::string_view default_tokenizer_id = "ws-v1";

// Marker inserted where tokens were omitted: bracketed horizontal ellipsis.
inline constexpr std::string_view default_marker = "[\xE2\x80\xA6]";

namespace detail {

constexpr bool is_whitespace_codepoint(std::uint32_t cp) {
  return (cp >= 0x09 && cp <= 0x0d) || cp == 0x20 || cp == 0x85 || cp == 0xa0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200a) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202f || cp == 0x205f || cp == 0x3000;
}

// Marks a byte that is not part of any valid UTF-8 sequence. Above the
// Unicode range, so it can never be classified as whitespace: malformed bytes
// stick to the token they sit in instead of splitting it.
inline constexpr std::uint32_t invalid_byte_codepoint = 0x110000;

// Decodes one UTF-8 sequence at `pos`. On malformed input a single opaque
// byte is consumed, so arbitrary binary still tokenizes deterministically
// instead of failing.
inline std::pair<std::uint32_t, std::size_t> decode_utf8(std::string_view text,
                                                         std::size_t pos) {
  const auto byte = [&](std::size_t i) -> std::uint32_t {
    return static_cast<unsigned char>(text[i]);
  };
  const std::uint32_t b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};

  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {invalid_byte_codepoint, 1};  // stray continuation or invalid lead
  }
  if (pos + len > text.size()) return {invalid_byte_codepoint, 1};
  for (std::size_t i = 1; i < len; ++i) {
    if ((byte(pos + i) & 0xc0) != 0x80) return {invalid_byte_codepoint, 1};
    cp = (cp << 6) | (byte(pos + i) & 0x3f);
  }
  // Overlong encodings decode to small codepoints; rejecting them keeps two
  // distinct byte strings from tokenizing identically.
  static constexpr std::uint32_t min_cp[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < min_cp[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
    return {invalid_byte_codepoint, 1};
  }
  return {cp, len};
}

}  // namespace detail

inline bool tokenizer_known(std::string_view id) { return id == default_tokenizer_id; }

// Splits on runs of Unicode whitespace. Total: any byte string, valid UTF-8
// or not, yields the same token sequence every time. An empty result means
// the text cannot be signed; callers decide how loudly to say so.
inline token_sequence tokenize(std::string_view text) {
  token_sequence out;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto [cp, len] = detail::decode_utf8(text, pos);
    if (detail::is_whitespace_codepoint(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(pos, len));
    }
    pos += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

inline token_sequence tokenize_with(std::string_view tokenizer_id, std::string_view text) {
  if (!tokenizer_known(tokenizer_id)) {
    throw error(errc::unknown_tokenizer, std::string(tokenizer_id));
  }
  return tokenize(text);
}

// A marker has to survive a tokenize round trip as exactly one token equal to
// itself, otherwise rendered quotes could not be re-derived.
inline void validate_marker(std::string_view marker) {
  token_sequence parsed = tokenize(marker);
  if (parsed.size() != 1 || parsed.front() != marker) {
    throw error(errc::bad_argument, "marker must be a single whitespace-free token");
  }
}

// Lays out quoted tokens with one marker per gap, single spaces between
// items. Gap positions are indices into the original message; the marker for
// a gap lands after however many quoted tokens precede that gap.
inline std::string render_quote(const token_sequence& tokens,
                                const std::vector<gap_descriptor>& gaps,
                                std::string_view marker = default_marker) {
  validate_marker(marker);
  std::vector<std::string_view> items;
  items.reserve(tokens.size() + gaps.size());
  std::size_t missing_before = 0;
  std::size_t next_token = 0;
  for (const auto& gap : gaps) {
    if (gap.position < missing_before) {
      throw error(errc::bad_argument, "gap positions unsorted or overlapping");
    }
    const std::size_t slot = gap.position - missing_before;
    if (slot > tokens.size()) {
      throw error(errc::bad_argument, "gap position beyond quoted tokens");
    }
    while (next_token < slot) items.push_back(tokens[next_token++]);
    items.push_back(marker);
    missing_before += gap.missing;
  }
  while (next_token < tokens.size()) items.push_back(tokens[next_token++]);

  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ' ';
    out += items[i];
  }
  return out;
}

// Inverse of rendering, as far as the token layer is concerned: tokenize the
// rendered text and drop marker tokens. A message token that happens to equal
// the marker is indistinguishable from a gap, which is why signing-side
// callers should pick a marker absent from the message.
inline token_sequence strip_gap_markers(const token_sequence& tokens,
                                        std::string_view marker = default_marker) {
  token_sequence out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t != marker) out.push_back(t);
  }
  return out;
}

}  // namespace qsig
