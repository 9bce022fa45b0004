#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmc/provider.hpp"

namespace lmc {

struct NGramModelSpec {
  /// Number of preceding bytes used as context (0 = unigram).
  int order = 3;
  double smoothing_alpha = 1.0;
  std::size_t max_context = std::size_t{1} << 20;

  static constexpr int kMaxOrder = 7;
  void validate() const;
};

/// Byte-level n-gram model with additive smoothing:
///
///   p(b | c) = (count(c·b) + α) / (count(c) + 256·α)
///
/// where c is the last min(order, available) bytes of the context and
/// count(c) counts occurrences of c that are followed by another byte.
/// Counts are kept for every context length 0..order so that positions near
/// the start of a document back off to the context they actually have.
/// Training texts are counted independently (no n-grams span two texts).
/// The model is immutable once constructed.
class NGramModel final : public Provider {
 public:
  static constexpr std::size_t kVocabSize = 256;

  explicit NGramModel(NGramModelSpec spec = {});
  NGramModel(NGramModelSpec spec, std::span<const std::string> training_texts);
  NGramModel(NGramModelSpec spec, std::string_view training_text);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  const NGramModelSpec& spec() const { return spec_; }

  TokenizedDocument tokenize(std::string_view doc_id,
                             std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> tokens) const override;
  NextTokenDistribution next_token_logprobs(
      std::span<const TokenId> context) const override;
  std::vector<double> score_window(std::span<const TokenId> tokens,
                                   std::size_t score_from) const override;
  Fingerprint fingerprint() const override { return fingerprint_; }

  /// p(next | context) as a plain probability.
  double probability(std::span<const TokenId> context, TokenId next) const;

  /// Raw counts for the exact context `ctx` (its full length is used).
  std::uint64_t context_count(std::span<const std::uint8_t> ctx) const;
  std::uint64_t continuation_count(std::span<const std::uint8_t> ctx,
                                   std::uint8_t next) const;

  /// Bytes of `data` as token ids, no UTF-8 validation (used for raw files).
  static std::vector<TokenId> bytes_to_tokens(std::string_view data);

 private:
  struct Entry {
    std::uint64_t total = 0;
    std::uint32_t first = 0;  // into children_
    std::uint32_t size = 0;
  };
  struct Child {
    std::uint8_t byte;
    std::uint64_t count;
  };

  void train(std::span<const std::string_view> texts);
  const Entry* find(std::span<const TokenId> context) const;
  std::uint64_t count_in(const Entry* e, TokenId next) const;

  NGramModelSpec spec_;
  ProviderDescriptor descriptor_;
  Fingerprint fingerprint_{};
  std::unordered_map<std::uint64_t, Entry> contexts_;
  std::vector<Child> children_;
};

}  // namespace lmc
