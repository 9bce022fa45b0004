#include "lmc/provider.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "lmc/errors.hpp"
#include "lmc/numeric.hpp"

namespace lmc {

void ProviderDescriptor::validate() const {
  if (vocab_size < 2) throw ContractViolation("provider '" + name + "': vocab_size must be >= 2");
  if (max_context < 1) throw ContractViolation("provider '" + name + "': max_context must be >= 1");
}

namespace {

constexpr double kNormalizationTolerance = 1e-6;

double probability_mass(std::span<const double> logprobs) {
  CompensatedSum s;
  for (double lp : logprobs) s.add(std::exp2(lp));
  return s.value();
}

}  // namespace

double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

NextTokenDistribution::NextTokenDistribution(std::vector<double> logprobs_bits)
    : logprobs_(std::move(logprobs_bits)) {
  for (double lp : logprobs_) {
    if (std::isnan(lp) || lp > 0.0) {
      throw ContractViolation("log-probability must be <= 0, got " + std::to_string(lp));
    }
  }
  const double mass = probability_mass(logprobs_);
  if (std::abs(mass - 1.0) > kNormalizationTolerance) {
    throw ContractViolation("distribution not normalized: total probability " + std::to_string(mass));
  }
}

NextTokenDistribution NextTokenDistribution::from_natural_log(std::span<const double> nats) {
  std::vector<double> bits;
  bits.reserve(nats.size());
  for (double v : nats) {
    if (std::isnan(v) || v > 0.0) {
      throw ProtocolError("provider returned invalid natural-log probability " + std::to_string(v));
    }
    bits.push_back(nats_to_bits(v));
  }
  const double mass = probability_mass(bits);
  if (std::abs(mass - 1.0) > kNormalizationTolerance) {
    throw ProtocolError("provider distribution not normalized: total probability " + std::to_string(mass));
  }
  NextTokenDistribution d;
  d.logprobs_ = std::move(bits);
  return d;
}

double NextTokenDistribution::total_probability() const { return probability_mass(logprobs_); }

NextTokenDistribution NextTokenDistribution::floored(double floor_bits) && {
  if (std::all_of(logprobs_.begin(), logprobs_.end(), [&](double lp) { return lp >= floor_bits; })) {
    return std::move(*this);
  }
  return std::as_const(*this).floored(floor_bits);
}

NextTokenDistribution NextTokenDistribution::floored(double floor_bits) const& {
  if (std::all_of(logprobs_.begin(), logprobs_.end(), [&](double lp) { return lp >= floor_bits; })) return *this;
  std::vector<double> lifted(logprobs_.size());
  for (std::size_t i = 0; i < lifted.size(); ++i) lifted[i] = std::max(logprobs_[i], floor_bits);
  const double shift = std::log2(probability_mass(lifted));
  for (double& lp : lifted) lp = std::min(0.0, lp - shift);
  NextTokenDistribution d;
  d.logprobs_ = std::move(lifted);
  return d;
}

void Provider::check_context_length(std::size_t length) const {
  const auto& d = descriptor();
  if (length > d.max_context) {
    throw ContractViolation("context of " + std::to_string(length) + " tokens exceeds max_context " +
                            std::to_string(d.max_context) + " of provider '" + d.name + "'");
  }
}

void Provider::check_context(std::span<const TokenId> context) const {
  check_context_length(context.size());
  const auto& d = descriptor();
  for (TokenId t : context) {
    if (t >= d.vocab_size) {
      throw ContractViolation("token id " + std::to_string(t) + " outside vocabulary of '" + d.name + "'");
    }
  }
}

void Provider::check_window(std::span<const TokenId> tokens, std::size_t score_from) const {
  if (score_from >= tokens.size()) {
    throw ContractViolation("score_from " + std::to_string(score_from) + " must be < window length " +
                            std::to_string(tokens.size()));
  }
  check_context(tokens);
}

std::vector<double> Provider::score_window(std::span<const TokenId> tokens,
                                           std::size_t score_from) const {
  check_window(tokens, score_from);
  std::vector<double> nll;
  nll.reserve(tokens.size() - score_from);
  for (std::size_t i = score_from; i < tokens.size(); ++i) {
    const auto dist = next_token_logprobs(tokens.first(i));
    nll.push_back(0.0 - dist[tokens[i]]);
  }
  return nll;
}

std::size_t effective_context(const Provider& provider, std::size_t requested) {
  return std::min(provider.usable_context(), requested);
}

}  // namespace lmc
