#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qsig/error.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/quoter.hpp"
#include "qsig/sigscheme.hpp"
#include "qsig/tokenizer.hpp"

namespace qsig {

// Conventional name for envelope files; nothing in the codec depends on it.
inline constexpr std::string_view envelope_extension = ".qsig";

// Unpadded base64url. Strict on the way in: padding characters, foreign
// characters, impossible lengths, and nonzero spill bits are all rejected,
// so every byte string has exactly one accepted encoding. Envelope equality
// then coincides with byte equality, which round-trip tests rely on.
inline std::string base64url_encode(std::string_view bytes) {
  static constexpr char alphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                            (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                            static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(alphabet[(v >> 18) & 0x3f]);
    out.push_back(alphabet[(v >> 12) & 0x3f]);
    out.push_back(alphabet[(v >> 6) & 0x3f]);
    out.push_back(alphabet[v & 0x3f]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 4;
    out.push_back(alphabet[(v >> 6) & 0x3f]);
    out.push_back(alphabet[v & 0x3f]);
  } else if (rest == 2) {
    const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 10) |
                            (static_cast<unsigned char>(bytes[i + 1]) << 2);
    out.push_back(alphabet[(v >> 12) & 0x3f]);
    out.push_back(alphabet[(v >> 6) & 0x3f]);
    out.push_back(alphabet[v & 0x3f]);
  }
  return out;
}

inline std::string base64url_decode(std::string_view text) {
  const auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
  };
  if (text.size() % 4 == 1) {
    throw error(errc::envelope_bad_base64, "impossible base64url length");
  }
  std::string out;
  out.reserve(text.size() / 4 * 3 + 2);
  std::uint32_t acc = 0;
  std::size_t bits = 0;
  for (char c : text) {
    const int v = value_of(c);
    if (v < 0) throw error(errc::envelope_bad_base64, "character outside base64url");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xff));
    }
  }
  if ((acc & ((1u << bits) - 1)) != 0) {
    throw error(errc::envelope_bad_base64, "nonzero trailing bits");
  }
  return out;
}

namespace detail {

// Largest token count an envelope may claim. The verifier materializes a
// 2n-1 node skeleton from n before looking at anything else, so an
// unbounded n would let a tiny envelope demand an enormous allocation.
inline constexpr std::uint64_t max_envelope_tokens = std::uint64_t{1} << 32;

inline const nlohmann::ordered_json& require_field(const nlohmann::ordered_json& j,
                                                   const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw error(errc::envelope_missing_field, name);
  return *it;
}

inline std::string require_string(const nlohmann::ordered_json& j, const char* name) {
  const auto& field = require_field(j, name);
  if (!field.is_string()) {
    throw error(errc::envelope_bad_field_type, std::string(name) + " must be a string");
  }
  return field.get<std::string>();
}

inline std::uint64_t require_uint(const nlohmann::ordered_json& j, const char* name) {
  const auto& field = require_field(j, name);
  if (!field.is_number_unsigned()) {
    throw error(errc::envelope_bad_field_type,
                std::string(name) + " must be a non-negative integer");
  }
  return field.get<std::uint64_t>();
}

}  // namespace detail

// One line of JSON with a fixed field order and no whitespace. Digests and
// signature bytes travel as unpadded base64url, indices as [begin, end)
// pairs. Encoding the same signature twice gives identical bytes.
inline std::string encode(const quote_signature& sig) {
  nlohmann::ordered_json j;
  j["version"] = sig.version;
  j["hash_id"] = sig.hash_id;
  j["scheme_id"] = sig.scheme_id;
  j["tokenizer_id"] = sig.tokenizer_id;
  j["n"] = sig.n;
  auto indices = nlohmann::ordered_json::array();
  for (const auto& r : sig.indices.ranges()) {
    indices.push_back({r.begin, r.end});
  }
  j["indices"] = std::move(indices);
  auto path = nlohmann::ordered_json::array();
  for (const auto& d : sig.path) path.push_back(base64url_encode(d.bytes));
  j["path"] = std::move(path);
  j["root_sig"] = base64url_encode(sig.root_sig.bytes);
  return j.dump();
}

// Strict inverse of encode. Every malformed input class gets its own error
// code; nothing is repaired or guessed, because a verifier that quietly fixes
// an envelope is a verifier that can be steered.
inline quote_signature decode(std::string_view text) {
  const auto j = nlohmann::ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw error(errc::envelope_syntax, "not a JSON object");
  }
  static constexpr const char* known_fields[] = {
      "version", "hash_id", "scheme_id", "tokenizer_id", "n", "indices", "path",
      "root_sig"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* f : known_fields) known = known || item.key() == f;
    if (!known) throw error(errc::envelope_unexpected_field, item.key());
  }

  const std::uint64_t version = detail::require_uint(j, "version");
  if (version != envelope_version) {
    throw error(errc::envelope_unsupported_version, std::to_string(version));
  }

  std::string hash_id = detail::require_string(j, "hash_id");
  if (!hash_known(hash_id)) throw error(errc::unknown_hash, hash_id);
  std::string scheme_id = detail::require_string(j, "scheme_id");
  if (!scheme_known(scheme_id)) throw error(errc::unknown_scheme, scheme_id);
  std::string tokenizer_id = detail::require_string(j, "tokenizer_id");
  if (!tokenizer_known(tokenizer_id)) {
    throw error(errc::unknown_tokenizer, tokenizer_id);
  }

  const std::uint64_t n = detail::require_uint(j, "n");
  if (n == 0) throw error(errc::envelope_bad_value, "n must be positive");
  if (n > detail::max_envelope_tokens) {
    throw error(errc::envelope_bad_value, "n is implausibly large");
  }

  const auto& indices_field = detail::require_field(j, "indices");
  if (!indices_field.is_array()) {
    throw error(errc::envelope_bad_field_type, "indices must be an array");
  }
  std::vector<index_range> ranges;
  ranges.reserve(indices_field.size());
  for (const auto& pair : indices_field) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      throw error(errc::envelope_bad_field_type,
                  "each index range must be a pair of non-negative integers");
    }
    ranges.push_back({pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>()});
  }
  index_set indices = index_set::checked(std::move(ranges));
  if (indices.max_index() >= n) {
    throw error(errc::envelope_index_out_of_bounds,
                "index " + std::to_string(indices.max_index()) + " with n = " +
                    std::to_string(n));
  }

  const auto& path_field = detail::require_field(j, "path");
  if (!path_field.is_array()) {
    throw error(errc::envelope_bad_field_type, "path must be an array");
  }
  if (path_field.size() > (n + 1) / 2) {
    throw error(errc::envelope_path_too_long,
                std::to_string(path_field.size()) + " digests for n = " +
                    std::to_string(n));
  }
  const std::size_t digest_size = digest_size_of(hash_id);
  std::vector<digest> path;
  path.reserve(path_field.size());
  for (const auto& entry : path_field) {
    if (!entry.is_string()) {
      throw error(errc::envelope_bad_field_type, "path entries must be strings");
    }
    digest d{base64url_decode(entry.get<std::string>())};
    if (d.bytes.size() != digest_size) {
      throw error(errc::envelope_digest_length,
                  "digest is " + std::to_string(d.bytes.size()) + " bytes, " +
                      hash_id + " needs " + std::to_string(digest_size));
    }
    path.push_back(std::move(d));
  }

  std::string sig_bytes = base64url_decode(detail::require_string(j, "root_sig"));
  if (sig_bytes.empty()) {
    throw error(errc::envelope_bad_value, "root_sig must not be empty");
  }

  return quote_signature{static_cast<std::uint32_t>(version),
                         std::move(hash_id),
                         scheme_id,
                         std::move(tokenizer_id),
                         n,
                         std::move(indices),
                         std::move(path),
                         root_signature{std::move(scheme_id), std::move(sig_bytes)}};
}

}  // namespace qsig
