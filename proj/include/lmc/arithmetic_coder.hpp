#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmc/provider.hpp"
#include "lmc/window_plan.hpp"

namespace lmc {

inline constexpr std::uint32_t kFrequencyBits = 16;
inline constexpr std::uint32_t kFrequencyTotal = 1u << kFrequencyBits;

/// Integer frequencies summing to exactly 2^16, each at least 1.
struct QuantizedPmf {
  std::vector<std::uint32_t> freqs;
  std::vector<std::uint32_t> cumulative;  // size() == freqs.size() + 1
  std::uint32_t total = kFrequencyTotal;

  std::size_t size() const { return freqs.size(); }
  /// -log2(freq / total).
  double code_length_bits(TokenId symbol) const;
  /// Symbol whose cumulative range contains `target` (< total).
  TokenId symbol_for(std::uint32_t target) const;
  void validate() const;
};

/// Largest-remainder rounding of `dist` to 2^16 with a floor of one count
/// per symbol; ties go to the lower token id. Throws ContractViolation when
/// the vocabulary is larger than 2^16.
QuantizedPmf quantize_pmf(const NextTokenDistribution& dist);

/// Range coder over a 56-bit window held in 64-bit registers with byte-wise
/// renormalization. Carries are propagated back into the buffered output.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total = kFrequencyTotal);
  /// Emits the shortest tail that pins down the final interval and strips
  /// trailing zero bytes (the decoder reads zeros past the end).
  std::vector<std::uint8_t> finish();

 private:
  void propagate_carry();

  std::uint64_t low_ = 0;
  std::uint64_t range_ = std::uint64_t{1} << 56;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  /// Scaled target for the next symbol, clamped to [0, total).
  std::uint32_t target(std::uint32_t total = kFrequencyTotal);
  void consume(std::uint32_t cum, std::uint32_t freq, std::uint32_t total = kFrequencyTotal);

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = std::uint64_t{1} << 56;
  std::uint64_t scale_ = 0;
};

struct CodingOptions {
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
};

/// Output of `encode`. The payload is a raw range-coder bitstream; the
/// container adds what decode needs to refuse a mismatched model.
struct CompressedBlob {
  std::vector<std::uint8_t> payload;
  std::uint64_t token_count = 0;
  std::uint64_t token_digest = 0;  // see token_digest()
  std::string provider_name;
  Fingerprint fingerprint{};

  std::size_t bit_length() const { return payload.size() * 8; }

  /// Container: 8-byte magic, version byte, u32-LE length + provider name,
  /// 32-byte fingerprint, u64-LE token count, u64-LE token digest, payload
  /// to end of buffer.
  std::vector<std::uint8_t> serialize() const;
  static CompressedBlob parse(std::span<const std::uint8_t> bytes);
};

inline constexpr char kBlobMagic[8] = {'L', 'M', 'C', 'B', 'L', 'O', 'B', '\x1a'};
inline constexpr std::uint8_t kBlobVersion = 1;

/// Ideal code lengths collected while encoding.
struct EncodeStats {
  double quantized_bits = 0.0;  // Σ -log2 q(x_i)
  double model_bits = 0.0;      // Σ -log2 p(x_i) before quantization
  std::uint32_t min_freq_used = kFrequencyTotal;
};

/// First 8 bytes (little-endian) of SHA-256 over the tokens as u32-LE.
std::uint64_t token_digest(std::span<const TokenId> tokens);

/// Binds the model fingerprint to the window plan parameters.
Fingerprint blob_fingerprint(const Provider& provider, const CodingOptions& options);

/// Each token is coded under the provider's (floored, quantized) conditional
/// given the preceding tokens of its scoring window, following the same
/// sliding-window plan as the BPC engine.
CompressedBlob encode(std::span<const TokenId> tokens, const Provider& provider,
                      const CodingOptions& options = {}, EncodeStats* stats = nullptr);

/// Throws FingerprintMismatch for a blob produced by another model or plan
/// and CorruptionError when the payload is not the exact encoding of the
/// decoded tokens (truncation, bit flips).
std::vector<TokenId> decode(const CompressedBlob& blob, const Provider& provider,
                            const CodingOptions& options = {});

}  // namespace lmc
