// Command-line front end: sign token streams, cut quotes out of signed
// messages, narrow existing quotes, and verify any of it against a public
// key. Exit codes: 0 success or valid, 1 invalid signature, 2 usage,
// 3 I/O or key trouble, 4 malformed envelope.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsig/qsig.hpp"

namespace {

// Argument-level mistakes, as opposed to qsig::error conditions discovered
// while doing the work. These always exit 2.
struct usage_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_writable(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw usage_failure("refusing to overwrite " + path.string() + " without --force");
  }
}

std::size_t parse_count(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long value = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw usage_failure(std::string(what) + " is not a non-negative integer: " + text);
  }
}

// --tokens 0,2,5 and --range 3..7 (half-open), combinable; the union is the
// selection.
qsig::index_set parse_selection(const std::string& tokens_csv,
                                const std::vector<std::string>& range_specs) {
  std::vector<qsig::index_range> ranges;
  if (!tokens_csv.empty()) {
    std::size_t start = 0;
    while (start <= tokens_csv.size()) {
      const std::size_t comma = tokens_csv.find(',', start);
      const std::string item =
          tokens_csv.substr(start, comma == std::string::npos ? comma : comma - start);
      if (item.empty()) throw usage_failure("empty entry in --tokens");
      const std::size_t index = parse_count(item, "--tokens entry");
      ranges.push_back({index, index + 1});
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  for (const std::string& spec : range_specs) {
    const std::size_t dots = spec.find("..");
    if (dots == std::string::npos) {
      throw usage_failure("--range wants the form a..b (half-open), got: " + spec);
    }
    const std::size_t begin = parse_count(spec.substr(0, dots), "--range start");
    const std::size_t end = parse_count(spec.substr(dots + 2), "--range end");
    if (begin >= end) throw usage_failure("--range is empty: " + spec);
    ranges.push_back({begin, end});
  }
  if (ranges.empty()) {
    throw usage_failure("select tokens with --tokens and/or --range");
  }
  return qsig::index_set::from_ranges(std::move(ranges));
}

void check_marker(const std::string& marker) {
  try {
    qsig::validate_marker(marker);
  } catch (const qsig::error& e) {
    throw usage_failure(e.what());
  }
}

int cmd_keygen(const std::string& scheme, const std::string& out_secret,
               const std::string& out_public, bool force) {
  if (!qsig::scheme_known(scheme)) throw usage_failure("unknown scheme: " + scheme);
  ensure_writable(out_secret, force);
  ensure_writable(out_public, force);
  const qsig::key_pair pair = qsig::generate_key_pair(scheme);
  qsig::save_secret_key(out_secret, pair.secret);
  qsig::save_public_key(out_public, pair.pub);
  std::cout << "secret-key: " << out_secret << '\n';
  std::cout << "public-key: " << out_public << '\n';
  return 0;
}

int cmd_sign(const std::string& in, const std::string& key_path, const std::string& out,
             const std::string& hash_id, const std::string& tokenizer_id, bool force) {
  if (!qsig::hash_known(hash_id)) throw usage_failure("unknown hash: " + hash_id);
  if (!qsig::tokenizer_known(tokenizer_id)) {
    throw usage_failure("unknown tokenizer: " + tokenizer_id);
  }
  ensure_writable(out, force);
  const qsig::token_sequence tokens = qsig::tokenize(qsig::read_file(in));
  if (tokens.empty()) {
    throw qsig::error(qsig::errc::empty_message, "no tokens in " + in);
  }
  const qsig::secret_key key = qsig::load_secret_key(key_path);
  const auto h = qsig::make_hash(hash_id);
  const qsig::quote_signature sig = qsig::sign_message(tokens, key, *h, tokenizer_id);
  qsig::write_file(out, qsig::encode(sig));
  std::cout << "tokens: " << tokens.size() << '\n';
  std::cout << "envelope: " << out << '\n';
  return 0;
}

int cmd_quote(const std::string& in, const std::string& sig_path,
              const std::string& tokens_csv, const std::vector<std::string>& range_specs,
              const std::string& out_text, const std::string& out_sig,
              const std::string& marker, const std::string& pub_path, bool force) {
  check_marker(marker);
  const qsig::index_set selection = parse_selection(tokens_csv, range_specs);
  ensure_writable(out_text, force);
  ensure_writable(out_sig, force);

  const qsig::quote_signature parent = qsig::decode(qsig::read_file(sig_path));
  const auto h = qsig::make_hash(parent.hash_id);

  // Full-message input is used verbatim; quote input first loses its gap
  // markers so the remaining tokens line up with the envelope's index set.
  qsig::token_sequence input_tokens = qsig::tokenize(qsig::read_file(in));
  if (!parent.full_message()) {
    input_tokens = qsig::strip_gap_markers(input_tokens, marker);
  }

  // The parent must be consistent with the input before anything is derived
  // from it. With a public key that is a real verification; without one it is
  // the structural half only (the root signature cannot be checked).
  if (!pub_path.empty()) {
    const qsig::public_key pub = qsig::load_public_key(pub_path);
    const qsig::verification_report report = qsig::verify(input_tokens, parent, pub);
    if (!report.valid) {
      throw qsig::error(*report.failure,
                        "input does not verify against --sig: " + report.failure_detail);
    }
  } else {
    qsig::reconstruct_root(input_tokens, parent.n, parent.indices, parent.path, *h);
  }

  if (selection.max_index() >= input_tokens.size()) {
    throw usage_failure("selection reaches token " + std::to_string(selection.max_index()) +
                        " but the input has " + std::to_string(input_tokens.size()));
  }
  const qsig::quote_signature derived =
      parent.full_message() ? qsig::quote(input_tokens, selection, parent, *h)
                            : qsig::subquote(input_tokens, parent, selection, *h);

  qsig::token_sequence kept;
  for (std::size_t position : selection.to_indices()) {
    kept.push_back(input_tokens[position]);
  }
  const std::string rendered =
      qsig::render_quote(kept, derived.indices.gaps(derived.n), marker);

  qsig::write_file(out_text, rendered + "\n");
  qsig::write_file(out_sig, qsig::encode(derived));
  std::cout << "quote: " << out_text << '\n';
  std::cout << "envelope: " << out_sig << '\n';
  return 0;
}

int cmd_verify(const std::string& quote_path, const std::string& sig_path,
               const std::string& pub_path, const std::string& report_out,
               const std::string& marker) {
  check_marker(marker);
  const qsig::quote_signature sig = qsig::decode(qsig::read_file(sig_path));
  const qsig::public_key pub = qsig::load_public_key(pub_path);
  const qsig::token_sequence tokens =
      qsig::strip_gap_markers(qsig::tokenize(qsig::read_file(quote_path)), marker);

  const qsig::verification_report report = qsig::verify(tokens, sig, pub);
  const std::string text = qsig::to_text(report);
  std::cout << text;
  if (!report_out.empty()) qsig::write_file(report_out, text);

  if (report.valid) return 0;
  // Failures that mean "these inputs do not fit together structurally" get
  // the malformed exit; a clean reconstruction whose signature fails gets the
  // invalid exit, as does a quote file whose token count is off.
  if (*report.failure == qsig::errc::signature_rejected ||
      *report.failure == qsig::errc::token_count_mismatch) {
    return 1;
  }
  return 4;
}

int cmd_inspect(const std::string& sig_path) {
  const qsig::quote_signature sig = qsig::decode(qsig::read_file(sig_path));
  std::cout << "version: " << sig.version << '\n';
  std::cout << "hash: " << sig.hash_id << '\n';
  std::cout << "scheme: " << sig.scheme_id << '\n';
  std::cout << "tokenizer: " << sig.tokenizer_id << '\n';
  std::cout << "n: " << sig.n << '\n';
  std::cout << "indices: " << qsig::to_string(sig.indices) << '\n';
  std::cout << "quoted: " << sig.indices.count() << '\n';
  std::cout << "contiguous: " << (sig.indices.contiguous() ? "true" : "false") << '\n';
  std::cout << "full-message: " << (sig.full_message() ? "true" : "false") << '\n';
  std::cout << "path-digests: " << sig.path.size() << '\n';
  for (std::size_t i = 0; i < sig.path.size(); ++i) {
    std::cout << "path[" << i << "]: " << sig.path[i].hex() << '\n';
  }
  std::cout << "root-sig: " << qsig::base64url_encode(sig.root_sig.bytes) << '\n';
  return 0;
}

int cmd_bounds(std::size_t n, std::size_t t, bool contiguous, bool exhaustive,
               std::uint64_t samples, std::uint64_t seed) {
  if (exhaustive && samples > 0) {
    throw usage_failure("--exhaustive and --sample are alternatives, pick one");
  }
  if (!exhaustive && samples == 0) {
    // No search requested: report the closed-form bound alone.
    try {
      std::size_t bound;
      if (contiguous) {
        bound = qsig::bound_contiguous(n);
      } else if (t == 0) {
        bound = qsig::bound_worst_quote(n);
      } else {
        bound = qsig::bound_arbitrary(n, t);
      }
      std::cout << "bound: " << bound << '\n';
      return 0;
    } catch (const qsig::error& e) {
      throw usage_failure(e.what());
    }
  }

  qsig::bound_report report;
  try {
    report = exhaustive ? qsig::exhaustive_worst_case(n, t, contiguous)
                        : qsig::sampled_worst_case(n, t, contiguous, samples, seed);
  } catch (const qsig::error& e) {
    if (e.code() == qsig::errc::bad_argument) {
      throw usage_failure(std::string(e.what()) +
                          (exhaustive ? "; try --sample <count>" : ""));
    }
    throw;
  }
  std::cout << qsig::bounds_csv_header() << '\n' << qsig::to_csv_row(report) << '\n';
  if (report.observed_max > report.bound) {
    std::cerr << "error: internal: observed maximum exceeds the bound\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quotable signatures over whitespace-separated tokens"};
  app.require_subcommand(1);

  std::string scheme{qsig::default_scheme_id};
  std::string hash_id{qsig::default_hash_id};
  std::string tokenizer_id{qsig::default_tokenizer_id};
  std::string marker{qsig::default_marker};
  std::string in, out, key_path, pub_path, sig_path, quote_path;
  std::string out_text, out_sig, report_out, tokens_csv;
  std::vector<std::string> range_specs;
  bool force = false;
  bool contiguous = false;
  bool exhaustive = false;
  std::size_t n = 0;
  std::size_t t = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;

  CLI::App* keygen = app.add_subcommand("keygen", "generate a signing key pair");
  keygen->add_option("--scheme", scheme, "signature scheme identifier")
      ->capture_default_str();
  keygen->add_option("--out-secret", key_path, "where to write the secret key")
      ->required();
  keygen->add_option("--out-public", pub_path, "where to write the public key")
      ->required();
  keygen->add_flag("--force", force, "overwrite existing files");

  CLI::App* sign = app.add_subcommand("sign", "sign a whole message file");
  sign->add_option("--in", in, "message file")->required();
  sign->add_option("--key", key_path, "secret key file")->required();
  sign->add_option("--out", out, "where to write the signature envelope")->required();
  sign->add_option("--hash", hash_id, "hash function identifier")->capture_default_str();
  sign->add_option("--tokenizer", tokenizer_id, "tokenizer identifier")
      ->capture_default_str();
  sign->add_flag("--force", force, "overwrite existing files");

  CLI::App* quote = app.add_subcommand(
      "quote", "derive a quote signature from a signed message or another quote");
  quote->add_option("--in", in, "message file, or quote text when narrowing a quote")
      ->required();
  quote->add_option("--sig", sig_path, "envelope covering --in")->required();
  quote->add_option("--tokens", tokens_csv, "comma-separated 0-based token indices");
  quote->add_option("--range", range_specs,
                    "half-open token range a..b, may repeat");
  quote->add_option("--out-text", out_text, "where to write the rendered quote")
      ->required();
  quote->add_option("--out-sig", out_sig, "where to write the quote envelope")
      ->required();
  quote->add_option("--marker", marker, "gap marker token")
      ->envname("QSIG_MARKER")
      ->capture_default_str();
  quote->add_option("--pub", pub_path,
                    "public key; verify --in against --sig before quoting");
  quote->add_flag("--force", force, "overwrite existing files");

  CLI::App* verify = app.add_subcommand("verify", "verify a quote against a public key");
  verify->add_option("--quote", quote_path, "rendered quote text file")->required();
  verify->add_option("--sig", sig_path, "quote envelope")->required();
  verify->add_option("--pub", pub_path, "public key file")->required();
  verify->add_option("--report", report_out, "also write the report here");
  verify->add_option("--marker", marker, "gap marker token")
      ->envname("QSIG_MARKER")
      ->capture_default_str();

  CLI::App* bounds = app.add_subcommand(
      "bounds", "verification-path size bounds, closed-form or searched");
  bounds->add_option("--n", n, "message size in tokens")->required();
  bounds->add_option("--t", t, "quote size in tokens (omit for any size)");
  bounds->add_flag("--contiguous", contiguous, "restrict to contiguous quotes");
  bounds->add_flag("--exhaustive", exhaustive, "enumerate every quote shape");
  bounds->add_option("--sample", samples, "random-search with this many samples");
  bounds->add_option("--seed", seed, "random-search seed")->capture_default_str();

  CLI::App* inspect = app.add_subcommand("inspect", "dump envelope fields");
  inspect->add_option("--sig", sig_path, "envelope file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*keygen) return cmd_keygen(scheme, key_path, pub_path, force);
    if (*sign) return cmd_sign(in, key_path, out, hash_id, tokenizer_id, force);
    if (*quote) {
      return cmd_quote(in, sig_path, tokens_csv, range_specs, out_text, out_sig, marker,
                       pub_path, force);
    }
    if (*verify) return cmd_verify(quote_path, sig_path, pub_path, report_out, marker);
    if (*bounds) return cmd_bounds(n, t, contiguous, exhaustive, samples, seed);
    if (*inspect) return cmd_inspect(sig_path);
    std::cerr << "error: usage: no subcommand\n";
    return 2;
  } catch (const usage_failure& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const qsig::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case qsig::errc::io_error:
      case qsig::errc::malformed_key:
      case qsig::errc::internal:
        return 3;
      case qsig::errc::signature_rejected:
        return 1;
      case qsig::errc::unknown_hash:
      case qsig::errc::unknown_scheme:
      case qsig::errc::unknown_tokenizer:
        // Identifiers from the command line are validated up front, so an
        // unknown identifier escaping here came out of an envelope.
        return 4;
      default:
        return e.malformed() ? 4 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 3;
  }
}
