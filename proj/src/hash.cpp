#include "ectaks/hash.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <stdexcept>

namespace ectaks {

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr) throw std::bad_alloc();
  reset();
}

Sha256::~Sha256() { EVP_MD_CTX_free(impl_->ctx); }

void Sha256::reset() {
  if (EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_DigestInit_ex failed");
  }
}

void Sha256::update(ByteView data) {
  if (data.empty()) return;
  if (EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) {
    throw std::runtime_error("EVP_DigestUpdate failed");
  }
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("EVP_DigestFinal_ex failed");
  }
  reset();
  return out;
}

Digest hash(const Hash256& prototype, ByteView data) {
  auto h = prototype.clone();
  h->update(data);
  return h->finish();
}

Digest hmac(const Hash256& prototype, ByteView key, std::initializer_list<ByteView> parts) {
  auto h = prototype.clone();
  const std::size_t block = h->block_size();

  Bytes k(block, 0);
  if (key.size() > block) {
    h->update(key);
    const Digest kd = h->finish();
    std::copy(kd.begin(), kd.end(), k.begin());
  } else {
    std::copy(key.begin(), key.end(), k.begin());
  }

  Bytes pad(block);
  for (std::size_t i = 0; i < block; ++i) pad[i] = k[i] ^ 0x36;
  h->update(pad);
  for (ByteView part : parts) h->update(part);
  const Digest inner = h->finish();

  for (std::size_t i = 0; i < block; ++i) pad[i] = k[i] ^ 0x5c;
  h->update(pad);
  h->update(inner);
  return h->finish();
}

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace ectaks
