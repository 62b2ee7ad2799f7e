#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsig {

// Every failure the library can raise, one code per distinguishable cause.
// The split matters at the boundaries: decode failures map to "malformed
// envelope" (CLI exit 4), verification failures to "invalid" (exit 1), and
// file problems to I/O (exit 3). Keeping them in one enum lets call sites
// branch on category without string matching.
enum class errc {
  // domain / argument errors
  empty_message,
  empty_selection,
  index_out_of_range,
  token_count_mismatch,
  not_full_message,
  bad_argument,

  // registry lookups
  unknown_hash,
  unknown_scheme,
  unknown_tokenizer,

  // key handling
  malformed_key,

  // envelope decoding, one code per malformed class
  envelope_syntax,
  envelope_unsupported_version,
  envelope_missing_field,
  envelope_bad_field_type,
  envelope_unexpected_field,
  envelope_bad_base64,
  envelope_bad_ranges,
  envelope_index_out_of_bounds,
  envelope_digest_length,
  envelope_path_too_long,
  envelope_bad_value,

  // quote-signature structure discovered during reconstruction
  path_too_short,
  path_too_long,

  // well-formed quote whose root signature fails under the given key
  signature_rejected,

  io_error,
  internal,
};

constexpr std::string_view to_string(errc code) {
  switch (code) {
    case errc::empty_message: return "empty-message";
    case errc::empty_selection: return "empty-selection";
    case errc::index_out_of_range: return "index-out-of-range";
    case errc::token_count_mismatch: return "token-count-mismatch";
    case errc::not_full_message: return "not-full-message";
    case errc::bad_argument: return "bad-argument";
    case errc::unknown_hash: return "unknown-hash";
    case errc::unknown_scheme: return "unknown-scheme";
    case errc::unknown_tokenizer: return "unknown-tokenizer";
    case errc::malformed_key: return "malformed-key";
    case errc::envelope_syntax: return "envelope-syntax";
    case errc::envelope_unsupported_version: return "envelope-unsupported-version";
    case errc::envelope_missing_field: return "envelope-missing-field";
    case errc::envelope_bad_field_type: return "envelope-bad-field-type";
    case errc::envelope_unexpected_field: return "envelope-unexpected-field";
    case errc::envelope_bad_base64: return "envelope-bad-base64";
    case errc::envelope_bad_ranges: return "envelope-bad-ranges";
    case errc::envelope_index_out_of_bounds: return "envelope-index-out-of-bounds";
    case errc::envelope_digest_length: return "envelope-digest-length";
    case errc::envelope_path_too_long: return "envelope-path-too-long";
    case errc::envelope_bad_value: return "envelope-bad-value";
    case errc::path_too_short: return "path-too-short";
    case errc::path_too_long: return "path-too-long";
    case errc::signature_rejected: return "signature-rejected";
    case errc::io_error: return "io-error";
    case errc::internal: return "internal";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

  // True for every code that means "the envelope or quote structure cannot
  // be interpreted", as opposed to "interpreted fine but the signature is bad".
  bool malformed() const noexcept {
    switch (code_) {
      case errc::envelope_syntax:
      case errc::envelope_unsupported_version:
      case errc::envelope_missing_field:
      case errc::envelope_bad_field_type:
      case errc::envelope_unexpected_field:
      case errc::envelope_bad_base64:
      case errc::envelope_bad_ranges:
      case errc::envelope_index_out_of_bounds:
      case errc::envelope_digest_length:
      case errc::envelope_path_too_long:
      case errc::envelope_bad_value:
      case errc::path_too_short:
      case errc::path_too_long:
      case errc::token_count_mismatch:
      case errc::index_out_of_range:
        return true;
      default:
        return false;
    }
  }

 private:
  errc code_;
};

}  // namespace qsig
