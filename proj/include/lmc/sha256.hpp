#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "lmc/provider.hpp"

namespace lmc {

/// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view bytes);
  Sha256& update_u64(std::uint64_t v);  // little-endian
  Fingerprint finish();

 private:
  void* ctx_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace lmc
