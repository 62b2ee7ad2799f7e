#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <random>
#include <string>
#include <vector>

#include "qsig/codec.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/quoter.hpp"
#include "qsig/sigscheme.hpp"
#include "qsig/testkit.hpp"
#include "qsig/tokenizer.hpp"

using qsig::base64url_decode;
using qsig::base64url_encode;
using qsig::decode;
using qsig::digest;
using qsig::encode;
using qsig::error;
using qsig::errc;
using qsig::index_set;
using qsig::quote_signature;

namespace {

// Envelope of the mid-message single-token quote of the eight token sample
// sentence, signed with the all-0x42 test secret key. Deterministic signing
// makes this reproducible byte for byte.
constexpr const char* golden_quote =
    R"({"version":1,"hash_id":"sha-256","scheme_id":"ed25519","tokenizer_id":"ws-v1",)"
    R"("n":8,"indices":[[4,5]],)"
    R"("path":["AH9Oz5lbw282npxbqjRwx1lkZ1ispQD7jf6yV13p8Jw",)"
    R"("okNLRrCllJEwXa_QL-iee9cxkAETWAnZHJe7mVeI4lI",)"
    R"("sdin6117_nPhV9Ny0_o3LbkzWp8ZjK7H_biphATeBZo"],)"
    R"("root_sig":"ocpIrxahvGOCp4qECxcibCkf2k02LQ11fPsJCmyRhY8qge21WwiatXD3H-pruEND)"
    R"(WctBcwD5b8GBoEJ1vP82Dg"})";

quote_signature make_golden() {
  const auto scheme = qsig::make_scheme("ed25519");
  const qsig::key_pair kp = scheme->derive(std::string(32, '\x42'));
  const qsig::sha256_hash h;
  const qsig::token_sequence msg =
      qsig::tokenize("The quick brown fox jumps over the dog");
  return qsig::quote(msg, index_set::single(4), qsig::sign_message(msg, kp.secret, h), h);
}

errc decode_failure(const std::string& text) {
  try {
    decode(text);
  } catch (const error& e) {
    return e.code();
  }
  throw std::runtime_error("decode unexpectedly succeeded");
}

// Parse, apply an edit to the JSON tree, re-serialize, and report how decode
// rejects the result.
template <typename Edit>
errc decode_failure_after(Edit&& edit) {
  auto j = nlohmann::ordered_json::parse(golden_quote);
  edit(j);
  return decode_failure(j.dump());
}

std::string random_bytes(std::mt19937_64& rng, std::size_t size) {
  std::string out(size, '\0');
  for (auto& b : out) b = static_cast<char>(rng());
  return out;
}

}  // namespace

TEST_CASE("base64url round trips and matches known vectors") {
  CHECK(base64url_encode("") == "");
  CHECK(base64url_encode("f") == "Zg");
  CHECK(base64url_encode("fo") == "Zm8");
  CHECK(base64url_encode("foo") == "Zm9v");
  CHECK(base64url_encode("foob") == "Zm9vYg");
  CHECK(base64url_encode("fooba") == "Zm9vYmE");
  CHECK(base64url_encode("foobar") == "Zm9vYmFy");
  CHECK(base64url_encode("\xfb\xff") == "-_8");

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string bytes = random_bytes(rng, rng() % 67);
    CHECK(base64url_decode(base64url_encode(bytes)) == bytes);
  }
}

TEST_CASE("base64url rejects everything but the canonical form") {
  const auto rejected = [](const char* text) {
    CHECK_THROWS_MATCHES(base64url_decode(text), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                           return e.code() == errc::envelope_bad_base64;
                         }));
  };
  rejected("Zg==");  // padding
  rejected("a");     // impossible length
  rejected("Zh");    // nonzero trailing bits
  rejected("Zm9vYmE=");
  rejected("+m9v");  // '+' is plain base64, not base64url
  rejected("/m9v");
  rejected("Zm 9");
  rejected("Zm\n");
}

TEST_CASE("the golden envelope is stable byte for byte") {
  const quote_signature q = make_golden();
  CHECK(encode(q) == golden_quote);
  CHECK(encode(q) == encode(q));
  CHECK(decode(golden_quote) == q);
}

TEST_CASE("a full-message envelope has an empty path array") {
  const auto scheme = qsig::make_scheme("ed25519");
  const qsig::key_pair kp = scheme->derive(std::string(32, '\x42'));
  const quote_signature full =
      qsig::sign_message(qsig::tokenize("The quick brown fox jumps over the dog"),
                         kp.secret);
  const std::string text = encode(full);
  CHECK(text.find("\"path\":[]") != std::string::npos);
  CHECK(text.find("\"indices\":[[0,8]]") != std::string::npos);
  CHECK(decode(text) == full);
}

TEST_CASE("random envelopes survive an encode-decode round trip") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    std::vector<digest> path;
    const std::size_t path_len = rng() % ((n + 1) / 2 + 1);
    for (std::size_t i = 0; i < path_len; ++i) {
      path.push_back(digest{random_bytes(rng, 32)});
    }
    const quote_signature sig{1,
                              "sha-256",
                              "ed25519",
                              "ws-v1",
                              n,
                              qsig::testkit::random_index_set(rng, n),
                              std::move(path),
                              {"ed25519", random_bytes(rng, 1 + rng() % 80)}};

    CHECK(decode(encode(sig)) == sig);
  }
}

TEST_CASE("syntactic garbage is an envelope syntax error") {
  CHECK(decode_failure("") == errc::envelope_syntax);
  CHECK(decode_failure("not json") == errc::envelope_syntax);
  CHECK(decode_failure("[1,2]") == errc::envelope_syntax);
  CHECK(decode_failure("\"string\"") == errc::envelope_syntax);
  CHECK(decode_failure(std::string(golden_quote).substr(0, 40)) ==
        errc::envelope_syntax);
}

TEST_CASE("every missing field is reported as missing") {
  for (const char* field : {"version", "hash_id", "scheme_id", "tokenizer_id",
                            "n", "indices", "path", "root_sig"}) {
    CAPTURE(field);
    CHECK(decode_failure_after([&](auto& j) { j.erase(field); }) ==
          errc::envelope_missing_field);
  }
}

TEST_CASE("unknown fields are rejected, not ignored") {
  CHECK(decode_failure_after([](auto& j) { j["note"] = "hi"; }) ==
        errc::envelope_unexpected_field);
}

TEST_CASE("wrongly typed fields are rejected") {
  CHECK(decode_failure_after([](auto& j) { j["version"] = "1"; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["n"] = -8; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["n"] = 8.5; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["hash_id"] = 7; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["indices"] = "0-8"; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["indices"] = {{0}}; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["indices"] = {{0, -1}}; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["path"] = "abc"; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["path"] = {5}; }) ==
        errc::envelope_bad_field_type);
  CHECK(decode_failure_after([](auto& j) { j["root_sig"] = 5; }) ==
        errc::envelope_bad_field_type);
}

TEST_CASE("version, registry, and value checks each have their code") {
  CHECK(decode_failure_after([](auto& j) { j["version"] = 99; }) ==
        errc::envelope_unsupported_version);
  CHECK(decode_failure_after([](auto& j) { j["hash_id"] = "md5"; }) ==
        errc::unknown_hash);
  CHECK(decode_failure_after([](auto& j) { j["scheme_id"] = "rsa"; }) ==
        errc::unknown_scheme);
  CHECK(decode_failure_after([](auto& j) { j["tokenizer_id"] = "bytes"; }) ==
        errc::unknown_tokenizer);
  CHECK(decode_failure_after([](auto& j) { j["n"] = 0; }) ==
        errc::envelope_bad_value);
  CHECK(decode_failure_after([](auto& j) {
          j["n"] = std::uint64_t{1} << 33;
        }) == errc::envelope_bad_value);
  CHECK(decode_failure_after([](auto& j) { j["root_sig"] = ""; }) ==
        errc::envelope_bad_value);
}

TEST_CASE("non-canonical index ranges are rejected") {
  const auto bad_ranges = [](std::vector<std::vector<std::uint64_t>> ranges) {
    return decode_failure_after([&](auto& j) { j["indices"] = ranges; });
  };
  CHECK(bad_ranges({}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{3, 3}}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{5, 2}}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{2, 3}, {0, 1}}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{0, 3}, {2, 5}}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{0, 2}, {2, 4}}) == errc::envelope_bad_ranges);
  CHECK(bad_ranges({{0, 9}}) == errc::envelope_index_out_of_bounds);
  CHECK(bad_ranges({{7, 9}}) == errc::envelope_index_out_of_bounds);
}

TEST_CASE("path digests are validated before use") {
  // 31 bytes: right alphabet, wrong digest size.
  const std::string short_digest = base64url_encode(std::string(31, 'x'));
  CHECK(decode_failure_after([&](auto& j) { j["path"][0] = short_digest; }) ==
        errc::envelope_digest_length);
  CHECK(decode_failure_after([](auto& j) { j["path"][0] = "===="; }) ==
        errc::envelope_bad_base64);
  CHECK(decode_failure_after([](auto& j) { j["root_sig"] = "!!"; }) ==
        errc::envelope_bad_base64);

  // More digests than any quote of n tokens can require.
  CHECK(decode_failure_after([](auto& j) {
          const auto d = j["path"][0];
          j["path"] = {d, d, d, d, d};
        }) == errc::envelope_path_too_long);
}

TEST_CASE("decode failures all classify as malformed envelopes") {
  for (errc code : {errc::envelope_syntax, errc::envelope_missing_field,
                    errc::envelope_bad_field_type, errc::envelope_unexpected_field,
                    errc::envelope_bad_base64, errc::envelope_bad_ranges,
                    errc::envelope_index_out_of_bounds, errc::envelope_digest_length,
                    errc::envelope_path_too_long, errc::envelope_bad_value,
                    errc::envelope_unsupported_version}) {
    CHECK(error(code, "").malformed());
  }
}
