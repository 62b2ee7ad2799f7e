#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "qsig/error.hpp"
#include "qsig/file_io.hpp"
#include "qsig/hash.hpp"

namespace qsig {

struct public_key {
  std::string scheme_id;
  std::string bytes;
  friend bool operator==(const public_key&, const public_key&) = default;
};

struct secret_key {
  std::string scheme_id;
  std::string bytes;
  friend bool operator==(const secret_key&, const secret_key&) = default;
};

struct key_pair {
  secret_key secret;
  public_key pub;
};

// Classical signature over a tree root digest. One of these covers the whole
// message; quoting reuses it unchanged, which is the entire point.
struct root_signature {
  std::string scheme_id;
  std::string bytes;
  friend bool operator==(const root_signature&, const root_signature&) = default;
};

// The signing backend is interchangeable as long as it is existentially
// unforgeable; nothing above this interface knows which scheme is in play.
class signature_scheme {
 public:
  virtual ~signature_scheme() = default;

  virtual std::string_view id() const noexcept = 0;
  virtual key_pair generate() const = 0;
  // Deterministic pair from existing secret bytes; also how the public half
  // is recovered from a stored secret key.
  virtual key_pair derive(std::string_view secret_bytes) const = 0;
  virtual root_signature sign(const digest& root, const secret_key& key) const = 0;
  // False for any failure: wrong key, wrong root, or byte-level damage to
  // either. Verification never throws on bad cryptographic material.
  virtual bool verify(const digest& root, const root_signature& sig,
                      const public_key& key) const = 0;
};

namespace detail {

struct evp_pkey_free {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct evp_pkey_ctx_free {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct evp_md_ctx_free {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};

using evp_pkey_ptr = std::unique_ptr<EVP_PKEY, evp_pkey_free>;
using evp_pkey_ctx_ptr = std::unique_ptr<EVP_PKEY_CTX, evp_pkey_ctx_free>;
using evp_md_ctx_ptr = std::unique_ptr<EVP_MD_CTX, evp_md_ctx_free>;

}  // namespace detail

class ed25519_scheme final : public signature_scheme {
 public:
  static constexpr std::size_t key_size = 32;
  static constexpr std::size_t signature_size = 64;

  std::string_view id() const noexcept override { return "ed25519"; }

  key_pair generate() const override {
    detail::evp_pkey_ctx_ptr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr));
    if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1) {
      throw error(errc::internal, "ed25519 keygen init failed");
    }
    EVP_PKEY* raw = nullptr;
    if (EVP_PKEY_keygen(ctx.get(), &raw) != 1) {
      throw error(errc::internal, "ed25519 keygen failed");
    }
    detail::evp_pkey_ptr pkey(raw);
    return pair_from_pkey(*pkey);
  }

  key_pair derive(std::string_view secret_bytes) const override {
    detail::evp_pkey_ptr pkey = load_private(secret_bytes);
    return pair_from_pkey(*pkey);
  }

  root_signature sign(const digest& root, const secret_key& key) const override {
    if (key.scheme_id != id()) {
      throw error(errc::unknown_scheme, "key scheme is " + key.scheme_id);
    }
    detail::evp_pkey_ptr pkey = load_private(key.bytes);
    detail::evp_md_ctx_ptr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) {
      throw error(errc::internal, "ed25519 sign init failed");
    }
    unsigned char sig[signature_size];
    std::size_t sig_len = sizeof(sig);
    if (EVP_DigestSign(ctx.get(), sig, &sig_len,
                       reinterpret_cast<const unsigned char*>(root.bytes.data()),
                       root.bytes.size()) != 1) {
      throw error(errc::internal, "ed25519 signing failed");
    }
    return root_signature{std::string(id()),
                          std::string(reinterpret_cast<char*>(sig), sig_len)};
  }

  bool verify(const digest& root, const root_signature& sig,
              const public_key& key) const override {
    if (key.scheme_id != id() || sig.scheme_id != id()) return false;
    if (key.bytes.size() != key_size || sig.bytes.size() != signature_size) return false;
    detail::evp_pkey_ptr pkey(EVP_PKEY_new_raw_public_key(
        EVP_PKEY_ED25519, nullptr,
        reinterpret_cast<const unsigned char*>(key.bytes.data()), key.bytes.size()));
    if (!pkey) return false;
    detail::evp_md_ctx_ptr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) {
      return false;
    }
    return EVP_DigestVerify(ctx.get(),
                            reinterpret_cast<const unsigned char*>(sig.bytes.data()),
                            sig.bytes.size(),
                            reinterpret_cast<const unsigned char*>(root.bytes.data()),
                            root.bytes.size()) == 1;
  }

 private:
  detail::evp_pkey_ptr load_private(std::string_view secret_bytes) const {
    if (secret_bytes.size() != key_size) {
      throw error(errc::malformed_key, "ed25519 secret key must be 32 bytes");
    }
    detail::evp_pkey_ptr pkey(EVP_PKEY_new_raw_private_key(
        EVP_PKEY_ED25519, nullptr,
        reinterpret_cast<const unsigned char*>(secret_bytes.data()),
        secret_bytes.size()));
    if (!pkey) throw error(errc::malformed_key, "ed25519 secret key rejected");
    return pkey;
  }

  key_pair pair_from_pkey(EVP_PKEY& pkey) const {
    unsigned char secret[key_size];
    unsigned char pub[key_size];
    std::size_t secret_len = sizeof(secret);
    std::size_t pub_len = sizeof(pub);
    if (EVP_PKEY_get_raw_private_key(&pkey, secret, &secret_len) != 1 ||
        EVP_PKEY_get_raw_public_key(&pkey, pub, &pub_len) != 1) {
      throw error(errc::internal, "ed25519 raw key extraction failed");
    }
    key_pair pair;
    pair.secret = {std::string(id()), std::string(reinterpret_cast<char*>(secret), secret_len)};
    pair.pub = {std::string(id()), std::string(reinterpret_cast<char*>(pub), pub_len)};
    return pair;
  }
};

inline constexpr std::string_view default_scheme_id = "ed25519";

inline bool scheme_known(std::string_view id) { return id == "ed25519"; }

inline std::unique_ptr<signature_scheme> make_scheme(std::string_view id) {
  if (id == "ed25519") return std::make_unique<ed25519_scheme>();
  throw error(errc::unknown_scheme, std::string(id));
}

inline key_pair generate_key_pair(std::string_view scheme_id = default_scheme_id) {
  return make_scheme(scheme_id)->generate();
}

inline root_signature sign_digest(const digest& root, const secret_key& key) {
  return make_scheme(key.scheme_id)->sign(root, key);
}

inline bool verify_digest(const digest& root, const root_signature& sig,
                          const public_key& key) {
  if (sig.scheme_id != key.scheme_id || !scheme_known(key.scheme_id)) return false;
  return make_scheme(key.scheme_id)->verify(root, sig, key);
}

// Key files carry the scheme identifier on the first line, then the raw key
// bytes verbatim. The id line is what stops an ed25519 key from being fed to
// some future scheme whose keys happen to share a length.
namespace detail {

inline std::string encode_key_file(std::string_view scheme_id, std::string_view bytes) {
  std::string out;
  out.reserve(scheme_id.size() + 1 + bytes.size());
  out.append(scheme_id);
  out.push_back('\n');
  out.append(bytes);
  return out;
}

inline std::pair<std::string, std::string> decode_key_file(std::string_view blob,
                                                           const char* what) {
  const std::size_t nl = blob.find('\n');
  if (nl == std::string_view::npos) {
    throw error(errc::malformed_key, std::string(what) + " has no scheme line");
  }
  std::string scheme_id(blob.substr(0, nl));
  if (!scheme_known(scheme_id)) throw error(errc::unknown_scheme, scheme_id);
  std::string bytes(blob.substr(nl + 1));
  if (bytes.size() != ed25519_scheme::key_size) {
    throw error(errc::malformed_key, std::string(what) + " has wrong key length");
  }
  return {std::move(scheme_id), std::move(bytes)};
}

}  // namespace detail

inline void save_secret_key(const std::filesystem::path& path, const secret_key& key) {
  write_file(path, detail::encode_key_file(key.scheme_id, key.bytes));
}

inline void save_public_key(const std::filesystem::path& path, const public_key& key) {
  write_file(path, detail::encode_key_file(key.scheme_id, key.bytes));
}

inline secret_key load_secret_key(const std::filesystem::path& path) {
  auto [scheme_id, bytes] = detail::decode_key_file(read_file(path), "secret key file");
  return secret_key{std::move(scheme_id), std::move(bytes)};
}

inline public_key load_public_key(const std::filesystem::path& path) {
  auto [scheme_id, bytes] = detail::decode_key_file(read_file(path), "public key file");
  return public_key{std::move(scheme_id), std::move(bytes)};
}

}  // namespace qsig
