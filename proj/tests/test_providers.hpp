#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lmc/errors.hpp"
#include "lmc/provider.hpp"
#include "lmc/sha256.hpp"
#include "lmc/utf8.hpp"

namespace lmc::fakes {

/// Byte-level tokenizer shared by the test models.
class ByteProviderBase : public Provider {
 public:
  ByteProviderBase(std::string name, std::size_t vocab, std::size_t max_context) {
    desc_.name = std::move(name);
    desc_.vocab_size = vocab;
    desc_.max_context = max_context;
    Sha256 h;
    h.update(desc_.name);
    h.update_u64(vocab);
    h.update_u64(max_context);
    fp_ = h.finish();
  }
  const ProviderDescriptor& descriptor() const override { return desc_; }
  TokenizedDocument tokenize(std::string_view doc_id, std::string_view text) const override {
    auto chars = utf8::count_scalars(text);
    if (!chars) throw TokenizationError("bad utf-8 in " + std::string(doc_id));
    TokenizedDocument d{std::string(doc_id), std::string(text), {}, *chars};
    for (unsigned char c : text) d.tokens.push_back(c);
    return d;
  }
  std::string detokenize(std::span<const TokenId> tokens) const override {
    std::string s;
    for (auto t : tokens) s.push_back(static_cast<char>(t));
    return s;
  }
  Fingerprint fingerprint() const override { return fp_; }

 protected:
  ProviderDescriptor desc_;
  Fingerprint fp_{};
};

class UniformProvider final : public ByteProviderBase {
 public:
  explicit UniformProvider(std::size_t vocab = 256, std::size_t max_context = 1 << 20)
      : ByteProviderBase("uniform-" + std::to_string(vocab), vocab, max_context) {}
  NextTokenDistribution next_token_logprobs(std::span<const TokenId> context) const override {
    check_context(context);
    return NextTokenDistribution(std::vector<double>(desc_.vocab_size, -std::log2(double(desc_.vocab_size))));
  }
};

/// Puts all mass on (last + 1) mod vocab; token 0 starts a sequence.
class DeterministicProvider final : public ByteProviderBase {
 public:
  explicit DeterministicProvider(std::size_t vocab = 256) : ByteProviderBase("deterministic", vocab, 1 << 20) {}
  NextTokenDistribution next_token_logprobs(std::span<const TokenId> context) const override {
    check_context(context);
    std::vector<double> lp(desc_.vocab_size, -std::numeric_limits<double>::infinity());
    lp[context.empty() ? 0 : (context.back() + 1) % desc_.vocab_size] = 0.0;
    return NextTokenDistribution(std::move(lp));
  }
};

/// Fixed distribution regardless of context.
class StaticProvider final : public ByteProviderBase {
 public:
  explicit StaticProvider(std::vector<double> probs, std::string name = "static")
      : ByteProviderBase(std::move(name), probs.size(), 1 << 20) {
    for (double p : probs) logprobs_.push_back(std::log2(p));
  }
  NextTokenDistribution next_token_logprobs(std::span<const TokenId> context) const override {
    check_context(context);
    return NextTokenDistribution(logprobs_);
  }

 private:
  std::vector<double> logprobs_;
};

/// Fails on documents whose first byte is '!'.
class FlakyProvider final : public ByteProviderBase {
 public:
  FlakyProvider() : ByteProviderBase("flaky", 256, 1 << 20) {}
  NextTokenDistribution next_token_logprobs(std::span<const TokenId> context) const override {
    if (!context.empty() && context.front() == '!') throw TransportError("connection reset");
    return NextTokenDistribution(std::vector<double>(256, -8.0));
  }
};

}  // namespace lmc::fakes
