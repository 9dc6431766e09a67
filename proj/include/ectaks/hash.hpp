#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace ectaks {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

// Pluggable 256-bit hash primitive. Every symmetric component (keyed hash,
// key derivation, keystream) is built on top of this interface.
class Hash256 {
 public:
  virtual ~Hash256() = default;
  virtual std::size_t block_size() const = 0;
  virtual void reset() = 0;
  virtual void update(ByteView data) = 0;
  virtual Digest finish() = 0;
  virtual std::unique_ptr<Hash256> clone() const = 0;
};

// SHA-256 backed by OpenSSL's EVP interface.
class Sha256 final : public Hash256 {
 public:
  Sha256();
  ~Sha256() override;
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  std::size_t block_size() const override { return 64; }
  void reset() override;
  void update(ByteView data) override;
  Digest finish() override;
  std::unique_ptr<Hash256> clone() const override { return std::make_unique<Sha256>(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Digest hash(const Hash256& prototype, ByteView data);

// HMAC over the given primitive; `parts` are concatenated as the message.
Digest hmac(const Hash256& prototype, ByteView key, std::initializer_list<ByteView> parts);

bool constant_time_equal(ByteView a, ByteView b);

}  // namespace ectaks
