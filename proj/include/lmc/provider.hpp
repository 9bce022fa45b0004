#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmc {

class NGramModel;

using TokenId = std::uint32_t;
using Fingerprint = std::array<std::uint8_t, 32>;

enum class LogprobBase { natural, base2 };

struct ProviderDescriptor {
  std::string name;
  std::size_t vocab_size = 0;
  std::size_t max_context = 0;
  LogprobBase logprob_base = LogprobBase::base2;

  /// Throws ContractViolation unless vocab_size >= 2 and max_context >= 1.
  void validate() const;
};

struct TokenizedDocument {
  std::string doc_id;
  std::string text;
  std::vector<TokenId> tokens;
  std::size_t char_count = 0;
};

/// Log-probabilities (bits) over the whole vocabulary for one position.
class NextTokenDistribution {
 public:
  NextTokenDistribution() = default;
  explicit NextTokenDistribution(std::vector<double> logprobs_bits);

  /// Converts natural-log values to bits, rejecting NaN and positive entries.
  static NextTokenDistribution from_natural_log(std::span<const double> nats);

  std::span<const double> logprobs() const { return logprobs_; }
  std::size_t size() const { return logprobs_.size(); }
  double operator[](std::size_t i) const { return logprobs_[i]; }

  /// Σ 2^logprob, computed with a compensated sum.
  double total_probability() const;

  /// Lifts every entry to at least `floor_bits` (default 2^-60) and
  /// renormalizes so the distribution is usable by an entropy coder.
  /// Returns a copy unchanged when no entry is below the floor.
  NextTokenDistribution floored(double floor_bits = -60.0) const&;
  NextTokenDistribution floored(double floor_bits = -60.0) &&;

 private:
  friend class NGramModel;  // builds normalized tables without re-checking

  std::vector<double> logprobs_;
};

inline constexpr double kProbabilityFloorBits = -60.0;

/// Converts a natural-log probability to bits.
double nats_to_bits(double nats);

/// A source of autoregressive next-token probabilities.
///
/// Implementations must be safe to call concurrently from several threads.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual const ProviderDescriptor& descriptor() const = 0;

  /// Tokenizes `text`; `doc_id` is only used for error messages and is
  /// copied into the result.
  virtual TokenizedDocument tokenize(std::string_view doc_id,
                                     std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const TokenId> tokens) const = 0;

  /// Distribution of the token following `context` (which may be empty).
  virtual NextTokenDistribution next_token_logprobs(
      std::span<const TokenId> context) const = 0;

  /// Per-token NLL in bits for tokens[score_from..], each conditioned on
  /// every earlier token of `tokens`. The default goes through
  /// next_token_logprobs one position at a time.
  virtual std::vector<double> score_window(std::span<const TokenId> tokens,
                                           std::size_t score_from) const;

  /// Identifies the exact model; used to refuse mismatched decodes.
  virtual Fingerprint fingerprint() const = 0;

  /// Tokens of context the provider can actually use for a window plan.
  /// Defaults to max_context.
  virtual std::size_t usable_context() const { return descriptor().max_context; }

 protected:
  /// Shared precondition checks for score_window / next_token_logprobs.
  void check_window(std::span<const TokenId> tokens, std::size_t score_from) const;
  void check_context(std::span<const TokenId> context) const;
  /// Length only, for providers that validate the ids they actually read.
  void check_context_length(std::size_t length) const;
};

/// Context length actually used for window plans: min(usable, requested).
std::size_t effective_context(const Provider& provider, std::size_t requested);

}  // namespace lmc
