#include "lmc/arithmetic_coder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>

#include "lmc/errors.hpp"
#include "lmc/numeric.hpp"
#include "lmc/sha256.hpp"

namespace lmc {

namespace {

constexpr std::uint64_t kTop = std::uint64_t{1} << 56;
constexpr std::uint64_t kBottom = std::uint64_t{1} << 48;
constexpr int kWindowBytes = 7;

}  // namespace

// ---------------------------------------------------------------------------
// Quantization

double QuantizedPmf::code_length_bits(TokenId symbol) const {
  return std::log2(static_cast<double>(total)) - std::log2(static_cast<double>(freqs.at(symbol)));
}

TokenId QuantizedPmf::symbol_for(std::uint32_t target) const {
  // First cumulative entry strictly greater than target, minus one.
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return static_cast<TokenId>(std::distance(cumulative.begin(), it) - 1);
}

void QuantizedPmf::validate() const {
  if (freqs.empty() || cumulative.size() != freqs.size() + 1) {
    throw ContractViolation("quantized pmf: inconsistent sizes");
  }
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i] < 1) throw ContractViolation("quantized pmf: zero frequency");
    if (cumulative[i] != sum) throw ContractViolation("quantized pmf: bad cumulative table");
    sum += freqs[i];
  }
  if (sum != total || cumulative.back() != total) throw ContractViolation("quantized pmf: bad total");
}

QuantizedPmf quantize_pmf(const NextTokenDistribution& dist) {
  const std::size_t n = dist.size();
  if (n == 0) throw ContractViolation("cannot quantize an empty distribution");
  if (n > kFrequencyTotal) {
    throw ContractViolation("vocabulary of " + std::to_string(n) + " symbols exceeds the coder's " +
                            std::to_string(kFrequencyTotal) + "-count precision");
  }
  // Scratch space reused across calls; the coder quantizes once per token.
  thread_local std::vector<double> ideal, rem;
  thread_local std::vector<std::int64_t> freq;
  thread_local std::vector<std::uint32_t> order;
  ideal.resize(n);
  rem.resize(n);
  freq.resize(n);
  CompensatedSum mass;
  double last_lp = 1.0, last_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] != last_lp) {
      last_lp = dist[i];
      last_p = std::exp2(last_lp);
    }
    ideal[i] = last_p;
    mass.add(last_p);
  }
  const double scale = static_cast<double>(kFrequencyTotal) / mass.value();

  std::int64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ideal[i] *= scale;
    const auto whole = static_cast<std::int64_t>(ideal[i]);  // ideal >= 0
    freq[i] = whole < 1 ? 1 : whole;
    rem[i] = ideal[i] - static_cast<double>(freq[i]);
    sum += freq[i];
  }

  const auto total = static_cast<std::int64_t>(kFrequencyTotal);
  if (sum < total) {
    // Largest remainders first; the lower id wins a tie.
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto need = static_cast<std::size_t>(total - sum);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(need), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        return rem[a] != rem[b] ? rem[a] > rem[b] : a < b;
                      });
    // The comparator is a strict total order, so the first `need` entries
    // are exactly the winners whatever their internal order.
    for (std::size_t k = 0; k < need; ++k) ++freq[order[k]];
  } else if (sum > total) {
    // Floors pushed us over: take counts back from the most over-allocated
    // symbols that can spare one.
    using Item = std::pair<double, std::size_t>;  // (freq - ideal, id)
    const auto cmp = [](const Item& a, const Item& b) {
      return a.first != b.first ? a.first < b.first : a.second > b.second;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < n; ++i) {
      if (freq[i] > 1) heap.emplace(static_cast<double>(freq[i]) - ideal[i], i);
    }
    for (std::int64_t excess = sum - total; excess > 0; --excess) {
      const auto [over, i] = heap.top();
      heap.pop();
      --freq[i];
      if (freq[i] > 1) heap.emplace(static_cast<double>(freq[i]) - ideal[i], i);
    }
  }

  QuantizedPmf q;
  q.freqs.resize(n);
  q.cumulative.resize(n + 1);
  std::uint32_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    q.freqs[i] = static_cast<std::uint32_t>(freq[i]);
    q.cumulative[i] = acc;
    acc += q.freqs[i];
  }
  q.cumulative[n] = acc;
  return q;
}

// ---------------------------------------------------------------------------
// Range coder

void RangeEncoder::propagate_carry() {
  for (std::size_t i = out_.size(); i > 0; --i) {
    if (++out_[i - 1] != 0) return;
  }
  throw std::logic_error("range coder carry escaped the stream");
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  const std::uint64_t r = range_ / total;
  low_ += r * cum;
  range_ = (cum + freq == total) ? range_ - r * cum : r * freq;
  if (low_ >= kTop) {
    low_ -= kTop;
    propagate_carry();
  }
  while (range_ <= kBottom) {
    out_.push_back(static_cast<std::uint8_t>(low_ >> 48));
    low_ = (low_ << 8) & (kTop - 1);
    range_ <<= 8;
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  // Shortest value v in [low, low + range) whose bits below the top k of
  // the window are all zero.
  const unsigned __int128 hi = static_cast<unsigned __int128>(low_) + range_;
  int k = 0;
  std::uint64_t v = 0;
  for (; k <= 56; ++k) {
    const std::uint64_t unit = std::uint64_t{1} << (56 - k);
    const unsigned __int128 candidate =
        (static_cast<unsigned __int128>(low_) + unit - 1) / unit * unit;
    if (candidate < hi) {
      v = static_cast<std::uint64_t>(candidate);
      break;
    }
  }
  if (v >= kTop) {
    v -= kTop;
    propagate_carry();
  }
  for (int emitted = 0; emitted < k; emitted += 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> (48 - emitted)));
  }
  while (!out_.empty() && out_.back() == 0) out_.pop_back();
  low_ = 0;
  range_ = kTop;
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload) : in_(payload) {
  for (int i = 0; i < kWindowBytes; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  const std::uint8_t b = pos_ < in_.size() ? in_[pos_] : 0;
  ++pos_;
  return b;
}

std::uint32_t RangeDecoder::target(std::uint32_t total) {
  scale_ = range_ / total;
  const std::uint64_t t = code_ / scale_;
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(t, total - 1));
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  code_ -= scale_ * cum;
  range_ = (cum + freq == total) ? range_ - scale_ * cum : scale_ * freq;
  if (code_ >= range_) throw CorruptionError("bitstream is inconsistent with the model");
  while (range_ <= kBottom) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

// ---------------------------------------------------------------------------
// Container

std::vector<std::uint8_t> CompressedBlob::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 1 + 4 + provider_name.size() + 32 + 16 + payload.size());
  const auto put = [&out](const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) out.push_back(p[i]);
  };
  const auto put_le = [&out](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(kBlobMagic, sizeof(kBlobMagic));
  out.push_back(kBlobVersion);
  put_le(provider_name.size(), 4);
  put(provider_name.data(), provider_name.size());
  put(fingerprint.data(), fingerprint.size());
  put_le(token_count, 8);
  put_le(token_digest, 8);
  put(payload.data(), payload.size());
  return out;
}

CompressedBlob CompressedBlob::parse(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto need = [&](std::size_t n) {
    if (bytes.size() - pos < n) throw CorruptionError("compressed blob header is truncated");
  };
  need(sizeof(kBlobMagic));
  if (std::memcmp(bytes.data(), kBlobMagic, sizeof(kBlobMagic)) != 0) {
    throw DataError("not a compressed blob (bad magic)");
  }
  pos += sizeof(kBlobMagic);
  need(1);
  if (bytes[pos] != kBlobVersion) {
    throw DataError("unsupported blob version " + std::to_string(bytes[pos]));
  }
  ++pos;
  need(4);
  std::uint32_t name_len = 0;
  for (int i = 0; i < 4; ++i) name_len |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
  pos += 4;
  need(name_len);
  CompressedBlob blob;
  blob.provider_name.assign(reinterpret_cast<const char*>(bytes.data() + pos), name_len);
  pos += name_len;
  need(blob.fingerprint.size());
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), blob.fingerprint.size(), blob.fingerprint.begin());
  pos += blob.fingerprint.size();
  need(8);
  for (int i = 0; i < 8; ++i) blob.token_count |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
  pos += 8;
  need(8);
  for (int i = 0; i < 8; ++i) blob.token_digest |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
  pos += 8;
  blob.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return blob;
}

// ---------------------------------------------------------------------------
// Model-driven coding

std::uint64_t token_digest(std::span<const TokenId> tokens) {
  Sha256 hash;
  for (TokenId t : tokens) {
    const std::uint8_t le[4] = {static_cast<std::uint8_t>(t), static_cast<std::uint8_t>(t >> 8),
                                static_cast<std::uint8_t>(t >> 16), static_cast<std::uint8_t>(t >> 24)};
    hash.update(std::span<const std::uint8_t>(le, 4));
  }
  const Fingerprint f = hash.finish();
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(f[i]) << (8 * i);
  return v;
}

namespace {

struct Plan {
  std::size_t context;
  std::size_t stride;
};

Plan coding_plan(const Provider& provider, const CodingOptions& options) {
  const std::size_t ctx = effective_context(provider, options.context);
  if (ctx < 2) throw ContractViolation("coding needs a context of at least 2 tokens");
  return {ctx, effective_stride(ctx, options.stride)};
}

}  // namespace

Fingerprint blob_fingerprint(const Provider& provider, const CodingOptions& options) {
  const Plan p = coding_plan(provider, options);
  const Fingerprint model = provider.fingerprint();
  Sha256 hash;
  hash.update("lmc.blob.v1");
  hash.update(std::span<const std::uint8_t>(model.data(), model.size()));
  hash.update_u64(p.context);
  hash.update_u64(p.stride);
  return hash.finish();
}

CompressedBlob encode(std::span<const TokenId> tokens, const Provider& provider,
                      const CodingOptions& options, EncodeStats* stats) {
  const Plan p = coding_plan(provider, options);
  const WindowPlan plan = plan_windows(tokens.size(), p.context, p.stride);
  const std::size_t vocab = provider.descriptor().vocab_size;

  RangeEncoder enc;
  EncodeStats local;
  for (const Window& w : plan.windows) {
    for (std::size_t i = w.score_from; i < w.end; ++i) {
      if (tokens[i] >= vocab) {
        throw ContractViolation("token id " + std::to_string(tokens[i]) + " outside vocabulary");
      }
      const auto dist = provider.next_token_logprobs(tokens.subspan(w.start, i - w.start));
      const auto floored = dist.floored(kProbabilityFloorBits);
      const QuantizedPmf q = quantize_pmf(floored);
      const TokenId t = tokens[i];
      enc.encode(q.cumulative[t], q.freqs[t]);
      local.quantized_bits += q.code_length_bits(t);
      local.model_bits += 0.0 - floored[t];
      local.min_freq_used = std::min(local.min_freq_used, q.freqs[t]);
    }
  }

  CompressedBlob blob;
  blob.payload = enc.finish();
  blob.token_count = tokens.size();
  blob.token_digest = token_digest(tokens);
  blob.provider_name = provider.descriptor().name;
  blob.fingerprint = blob_fingerprint(provider, options);
  if (stats != nullptr) *stats = local;
  return blob;
}

std::vector<TokenId> decode(const CompressedBlob& blob, const Provider& provider,
                            const CodingOptions& options) {
  if (blob.fingerprint != blob_fingerprint(provider, options)) {
    throw FingerprintMismatch("blob was encoded by '" + blob.provider_name +
                              "' under a different model or window plan than '" +
                              provider.descriptor().name + "'");
  }
  // Every symbol costs at least -log2(65535/65536) bits, which bounds how
  // many tokens a payload of this size can hold.
  const double max_tokens = (static_cast<double>(blob.payload.size()) * 8.0 + 64.0) *
                            static_cast<double>(kFrequencyTotal) * std::numbers::ln2;
  if (static_cast<double>(blob.token_count) > max_tokens) {
    throw CorruptionError("token count " + std::to_string(blob.token_count) +
                          " is impossible for a payload of " + std::to_string(blob.payload.size()) + " bytes");
  }
  const Plan p = coding_plan(provider, options);
  const WindowPlan plan = plan_windows(blob.token_count, p.context, p.stride);

  RangeDecoder dec(blob.payload);
  RangeEncoder shadow;
  std::vector<TokenId> tokens;
  tokens.reserve(std::min<std::uint64_t>(blob.token_count, std::uint64_t{1} << 20));
  for (const Window& w : plan.windows) {
    for (std::size_t i = w.score_from; i < w.end; ++i) {
      const std::span<const TokenId> ctx(tokens.data() + w.start, i - w.start);
      const QuantizedPmf q = quantize_pmf(provider.next_token_logprobs(ctx).floored(kProbabilityFloorBits));
      const TokenId t = q.symbol_for(dec.target());
      dec.consume(q.cumulative[t], q.freqs[t]);
      shadow.encode(q.cumulative[t], q.freqs[t]);
      tokens.push_back(t);
    }
  }
  if (shadow.finish() != blob.payload || token_digest(tokens) != blob.token_digest) {
    throw CorruptionError("payload does not match the decoded token stream (truncated or corrupted)");
  }
  return tokens;
}

}  // namespace lmc
