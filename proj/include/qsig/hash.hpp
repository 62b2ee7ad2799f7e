#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "qsig/error.hpp"

namespace qsig {

// Raw digest bytes. Not hex: digests feed straight back into hash preimages,
// so the byte form is the canonical one and hex is only for display.
struct digest {
  std::string bytes;

  friend bool operator==(const digest&, const digest&) = default;

  std::string hex() const {
    static constexpr char alphabet[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
      out.push_back(alphabet[b >> 4]);
      out.push_back(alphabet[b & 0x0f]);
    }
    return out;
  }
};

// Interface kept deliberately tiny: one preimage in, one digest out. Tree
// code builds the full preimage (tag byte plus payload) before calling, so
// one call here is exactly one hash evaluation. Cost accounting in tests and
// the verifier relies on that equivalence.
class hash_function {
 public:
  virtual ~hash_function() = default;

  virtual std::string_view id() const noexcept = 0;
  virtual std::size_t digest_size() const noexcept = 0;
  virtual digest hash(std::string_view preimage) const = 0;
};

class sha256_hash final : public hash_function {
 public:
  std::string_view id() const noexcept override { return "sha-256"; }
  std::size_t digest_size() const noexcept override { return 32; }

  digest hash(std::string_view preimage) const override {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int out_len = 0;
    if (EVP_Digest(preimage.data(), preimage.size(), out, &out_len, EVP_sha256(),
                   nullptr) != 1) {
      throw error(errc::internal, "sha-256 evaluation failed");
    }
    return digest{std::string(reinterpret_cast<char*>(out), out_len)};
  }
};

// Wraps another hash function and counts evaluations. The verifier exposes
// hash-count queries through this, and tests use it to pin down exact cost
// claims (2n-1 per tree build, and so on).
class counting_hash final : public hash_function {
 public:
  explicit counting_hash(const hash_function& inner) : inner_(inner) {}

  std::string_view id() const noexcept override { return inner_.id(); }
  std::size_t digest_size() const noexcept override { return inner_.digest_size(); }

  digest hash(std::string_view preimage) const override {
    ++count_;
    return inner_.hash(preimage);
  }

  std::uint64_t count() const noexcept { return count_; }
  void reset() noexcept { count_ = 0; }

 private:
  const hash_function& inner_;
  mutable std::uint64_t count_ = 0;
};

inline constexpr std::string_view default_hash_id = "sha-256";

inline bool hash_known(std::string_view id) { return id == "sha-256"; }

inline std::unique_ptr<hash_function> make_hash(std::string_view id) {
  if (id == "sha-256") return std::make_unique<sha256_hash>();
  throw error(errc::unknown_hash, std::string(id));
}

// Digest size lookup without constructing the function; decode uses this to
// validate path entries before anything else touches them.
inline std::size_t digest_size_of(std::string_view id) {
  if (id == "sha-256") return 32;
  throw error(errc::unknown_hash, std::string(id));
}

}  // namespace qsig
