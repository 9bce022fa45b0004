#include "lmc/ngram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "lmc/errors.hpp"
#include "lmc/sha256.hpp"
#include "lmc/utf8.hpp"

namespace lmc {

namespace {

// Context key: length in the top byte, bytes packed below with the most
// recent byte in the lowest 8 bits.
template <typename T>
std::uint64_t context_key(std::span<const T> ctx) {
  std::uint64_t key = static_cast<std::uint64_t>(ctx.size()) << 56;
  for (std::size_t j = 0; j < ctx.size(); ++j) {
    key |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(ctx[j])) << (8 * (ctx.size() - 1 - j));
  }
  return key;
}

}  // namespace

void NGramModelSpec::validate() const {
  if (order < 0 || order > kMaxOrder) {
    throw ContractViolation("n-gram order must be in [0, " + std::to_string(kMaxOrder) + "], got " +
                            std::to_string(order));
  }
  if (!(smoothing_alpha > 0.0) || !std::isfinite(smoothing_alpha)) {
    throw ContractViolation("smoothing alpha must be a positive finite number");
  }
  if (max_context < 1) throw ContractViolation("max_context must be >= 1");
}

NGramModel::NGramModel(NGramModelSpec spec) : NGramModel(spec, std::span<const std::string>{}) {}

NGramModel::NGramModel(NGramModelSpec spec, std::string_view training_text) : spec_(spec) {
  spec_.validate();
  const std::string_view texts[] = {training_text};
  train(texts);
}

NGramModel::NGramModel(NGramModelSpec spec, std::span<const std::string> training_texts)
    : spec_(spec) {
  spec_.validate();
  std::vector<std::string_view> views(training_texts.begin(), training_texts.end());
  train(views);
}

void NGramModel::train(std::span<const std::string_view> texts) {
  descriptor_.name = "ngram-o" + std::to_string(spec_.order);
  descriptor_.vocab_size = kVocabSize;
  descriptor_.max_context = spec_.max_context;
  descriptor_.logprob_base = LogprobBase::base2;

  Sha256 hash;
  hash.update("lmc.ngram.v1");
  hash.update_u64(static_cast<std::uint64_t>(spec_.order));
  hash.update_u64(std::bit_cast<std::uint64_t>(spec_.smoothing_alpha));
  hash.update_u64(spec_.max_context);
  hash.update_u64(texts.size());

  std::unordered_map<std::uint64_t, std::vector<Child>> building;
  const auto order = static_cast<std::size_t>(spec_.order);
  for (std::string_view text : texts) {
    hash.update_u64(text.size());
    hash.update(text);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const auto next = static_cast<std::uint8_t>(text[i]);
      const std::size_t longest = std::min(order, i);
      for (std::size_t len = 0; len <= longest; ++len) {
        auto& children = building[context_key(std::span<const char>(text.data() + i - len, len))];
        auto it = std::find_if(children.begin(), children.end(),
                               [next](const Child& c) { return c.byte == next; });
        if (it == children.end()) {
          children.push_back({next, 1});
        } else {
          ++it->count;
        }
      }
    }
  }
  fingerprint_ = hash.finish();

  contexts_.reserve(building.size());
  for (auto& [key, children] : building) {
    std::sort(children.begin(), children.end(),
              [](const Child& a, const Child& b) { return a.byte < b.byte; });
    Entry e;
    e.first = static_cast<std::uint32_t>(children_.size());
    e.size = static_cast<std::uint32_t>(children.size());
    for (const Child& c : children) {
      e.total += c.count;
      children_.push_back(c);
    }
    contexts_.emplace(key, e);
  }
}

const NGramModel::Entry* NGramModel::find(std::span<const TokenId> context) const {
  const std::size_t len = std::min(context.size(), static_cast<std::size_t>(spec_.order));
  for (TokenId t : context.last(len)) {
    if (t >= kVocabSize) throw ContractViolation("token id " + std::to_string(t) + " is not a byte");
  }
  const auto it = contexts_.find(context_key(context.last(len)));
  return it == contexts_.end() ? nullptr : &it->second;
}

std::uint64_t NGramModel::count_in(const Entry* e, TokenId next) const {
  if (e == nullptr) return 0;
  const auto begin = children_.begin() + e->first;
  const auto end = begin + e->size;
  const auto it = std::lower_bound(begin, end, next,
                                   [](const Child& c, TokenId b) { return c.byte < b; });
  return (it != end && it->byte == next) ? it->count : 0;
}

TokenizedDocument NGramModel::tokenize(std::string_view doc_id, std::string_view text) const {
  const auto chars = utf8::count_scalars(text);
  if (!chars) {
    throw TokenizationError("document '" + std::string(doc_id) + "' is not valid UTF-8");
  }
  TokenizedDocument doc;
  doc.doc_id = std::string(doc_id);
  doc.text = std::string(text);
  doc.tokens = bytes_to_tokens(text);
  doc.char_count = *chars;
  return doc;
}

std::string NGramModel::detokenize(std::span<const TokenId> tokens) const {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t >= kVocabSize) throw ContractViolation("token id " + std::to_string(t) + " is not a byte");
    out.push_back(static_cast<char>(t));
  }
  return out;
}

std::vector<TokenId> NGramModel::bytes_to_tokens(std::string_view data) {
  std::vector<TokenId> tokens(data.size());
  std::transform(data.begin(), data.end(), tokens.begin(),
                 [](char c) { return static_cast<TokenId>(static_cast<std::uint8_t>(c)); });
  return tokens;
}

NextTokenDistribution NGramModel::next_token_logprobs(std::span<const TokenId> context) const {
  check_context_length(context.size());
  const Entry* e = find(context);
  const double alpha = spec_.smoothing_alpha;
  const double denom = static_cast<double>(e ? e->total : 0) + static_cast<double>(kVocabSize) * alpha;
  std::vector<double> lp(kVocabSize, std::log2(alpha / denom));
  if (e != nullptr) {
    for (std::uint32_t k = 0; k < e->size; ++k) {
      const Child& c = children_[e->first + k];
      lp[c.byte] = std::log2((static_cast<double>(c.count) + alpha) / denom);
    }
  }
  NextTokenDistribution d;
  d.logprobs_ = std::move(lp);
  return d;
}

double NGramModel::probability(std::span<const TokenId> context, TokenId next) const {
  const Entry* e = find(context);
  const double alpha = spec_.smoothing_alpha;
  const double denom = static_cast<double>(e ? e->total : 0) + static_cast<double>(kVocabSize) * alpha;
  return (static_cast<double>(count_in(e, next)) + alpha) / denom;
}

std::vector<double> NGramModel::score_window(std::span<const TokenId> tokens,
                                             std::size_t score_from) const {
  check_window(tokens, score_from);
  std::vector<double> nll;
  nll.reserve(tokens.size() - score_from);
  for (std::size_t i = score_from; i < tokens.size(); ++i) {
    nll.push_back(0.0 - std::log2(probability(tokens.first(i), tokens[i])));
  }
  return nll;
}

std::uint64_t NGramModel::context_count(std::span<const std::uint8_t> ctx) const {
  if (ctx.size() > static_cast<std::size_t>(spec_.order)) {
    throw ContractViolation("context longer than model order");
  }
  const auto it = contexts_.find(context_key(ctx));
  return it == contexts_.end() ? 0 : it->second.total;
}

std::uint64_t NGramModel::continuation_count(std::span<const std::uint8_t> ctx,
                                             std::uint8_t next) const {
  if (ctx.size() > static_cast<std::size_t>(spec_.order)) {
    throw ContractViolation("context longer than model order");
  }
  const auto it = contexts_.find(context_key(ctx));
  return count_in(it == contexts_.end() ? nullptr : &it->second, next);
}

}  // namespace lmc
