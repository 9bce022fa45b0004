#pragma once

#include <optional>
#include <string>

#include "lmc/provider.hpp"

namespace lmc {

struct RemoteConfig {
  std::string url;  // e.g. http://127.0.0.1:8080
  int timeout_ms = 30000;
  int retries = 2;
};

/// Client for the JSON-over-HTTP log-prob protocol:
///
///   GET  /v1/info        -> {"name", "vocab_size", "max_context", ["bos_token"]}
///   POST /v1/tokenize    {"text"}                 -> {"tokens"}
///   POST /v1/detokenize  {"tokens"}               -> {"text"}
///   POST /v1/score       {"tokens", "score_from"} -> {"logprobs"}   (natural log)
///   POST /v1/next_token  {"tokens"}               -> {"logprobs"}   (optional, full vocab)
///
/// Payloads are converted to bits on receipt. A fresh connection is used per
/// request, so one instance can be shared across worker threads.
class RemoteProvider final : public Provider {
 public:
  explicit RemoteProvider(RemoteConfig config);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  TokenizedDocument tokenize(std::string_view doc_id,
                             std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> tokens) const override;
  NextTokenDistribution next_token_logprobs(
      std::span<const TokenId> context) const override;
  std::vector<double> score_window(std::span<const TokenId> tokens,
                                   std::size_t score_from) const override;
  Fingerprint fingerprint() const override { return fingerprint_; }

  /// One slot is reserved for the begin-of-sequence token when the server
  /// declares one.
  std::size_t usable_context() const override;

  std::optional<TokenId> bos_token() const { return bos_; }
  const RemoteConfig& config() const { return config_; }

 private:
  std::string post(const std::string& path, const std::string& body) const;
  std::string get(const std::string& path) const;

  RemoteConfig config_;
  ProviderDescriptor descriptor_;
  std::optional<TokenId> bos_;
  Fingerprint fingerprint_{};
};

}  // namespace lmc
