#include "lmc/remote_provider.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lmc/errors.hpp"
#include "lmc/sha256.hpp"
#include "lmc/utf8.hpp"

namespace lmc {

using nlohmann::json;

namespace {

json parse_body(const std::string& body, const std::string& path) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(path + ": response is not JSON: " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ProtocolError(path + ": response lacks \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ProtocolError(path + ": bad \"" + key + "\": " + e.what());
  }
}

std::vector<double> logprobs_to_bits(const std::vector<double>& nats, const std::string& path) {
  std::vector<double> bits;
  bits.reserve(nats.size());
  for (double v : nats) {
    if (std::isnan(v) || v > 0.0) {
      throw ProtocolError(path + ": invalid log-probability " + std::to_string(v));
    }
    bits.push_back(nats_to_bits(v));
  }
  return bits;
}

}  // namespace

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw ContractViolation("remote provider URL is empty");
  while (!config_.url.empty() && config_.url.back() == '/') config_.url.pop_back();

  const json info = parse_body(get("/v1/info"), "/v1/info");
  descriptor_.name = field<std::string>(info, "name", "/v1/info");
  descriptor_.vocab_size = field<std::size_t>(info, "vocab_size", "/v1/info");
  descriptor_.max_context = field<std::size_t>(info, "max_context", "/v1/info");
  descriptor_.logprob_base = LogprobBase::natural;
  try {
    descriptor_.validate();
  } catch (const ContractViolation& e) {
    throw ProtocolError(std::string("/v1/info: ") + e.what());
  }
  if (info.contains("bos_token") && !info["bos_token"].is_null()) {
    bos_ = field<TokenId>(info, "bos_token", "/v1/info");
    if (*bos_ >= descriptor_.vocab_size) throw ProtocolError("/v1/info: bos_token outside vocabulary");
    if (descriptor_.max_context < 2) throw ProtocolError("/v1/info: max_context leaves no room beside bos_token");
  }

  Sha256 hash;
  hash.update("lmc.remote.v1");
  hash.update_u64(descriptor_.name.size());
  hash.update(descriptor_.name);
  hash.update_u64(descriptor_.vocab_size);
  hash.update_u64(descriptor_.max_context);
  hash.update_u64(bos_ ? static_cast<std::uint64_t>(*bos_) + 1 : 0);
  fingerprint_ = hash.finish();
}

std::size_t RemoteProvider::usable_context() const {
  return bos_ ? descriptor_.max_context - 1 : descriptor_.max_context;
}

namespace {

template <typename Call>
std::string with_retries(const RemoteConfig& cfg, const std::string& path, Call&& call) {
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << std::min(attempt, 6)));
    httplib::Client client(cfg.url);
    client.set_connection_timeout(std::chrono::milliseconds(cfg.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(cfg.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(cfg.timeout_ms));
    httplib::Result res = call(client);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError(path + ": HTTP " + std::to_string(res->status) + " " + res->body);
    }
    return res->body;
  }
  throw TransportError(path + " at " + cfg.url + " failed after " + std::to_string(cfg.retries + 1) +
                       " attempt(s): " + last_error);
}

}  // namespace

std::string RemoteProvider::get(const std::string& path) const {
  return with_retries(config_, path, [&](httplib::Client& c) { return c.Get(path); });
}

std::string RemoteProvider::post(const std::string& path, const std::string& body) const {
  return with_retries(config_, path,
                      [&](httplib::Client& c) { return c.Post(path, body, "application/json"); });
}

TokenizedDocument RemoteProvider::tokenize(std::string_view doc_id, std::string_view text) const {
  const auto chars = utf8::count_scalars(text);
  if (!chars) throw TokenizationError("document '" + std::string(doc_id) + "' is not valid UTF-8");
  TokenizedDocument doc;
  doc.doc_id = std::string(doc_id);
  doc.text = std::string(text);
  doc.char_count = *chars;
  try {
    const json res = parse_body(post("/v1/tokenize", json{{"text", doc.text}}.dump()), "/v1/tokenize");
    doc.tokens = field<std::vector<TokenId>>(res, "tokens", "/v1/tokenize");
  } catch (const TransportError& e) {
    throw TransportError("document '" + doc.doc_id + "': " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError("document '" + doc.doc_id + "': " + e.what());
  }
  for (TokenId t : doc.tokens) {
    if (t >= descriptor_.vocab_size) {
      throw ProtocolError("document '" + doc.doc_id + "': token id " + std::to_string(t) +
                          " outside vocabulary");
    }
  }
  return doc;
}

std::string RemoteProvider::detokenize(std::span<const TokenId> tokens) const {
  const json req{{"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}};
  const json res = parse_body(post("/v1/detokenize", req.dump()), "/v1/detokenize");
  return field<std::string>(res, "text", "/v1/detokenize");
}

NextTokenDistribution RemoteProvider::next_token_logprobs(std::span<const TokenId> context) const {
  if (context.size() > usable_context()) {
    throw ContractViolation("context of " + std::to_string(context.size()) + " tokens exceeds usable context " +
                            std::to_string(usable_context()) + " of '" + descriptor_.name + "'");
  }
  check_context(context);
  std::vector<TokenId> sent;
  sent.reserve(context.size() + 1);
  if (bos_) sent.push_back(*bos_);
  sent.insert(sent.end(), context.begin(), context.end());
  const json res = parse_body(post("/v1/next_token", json{{"tokens", sent}}.dump()), "/v1/next_token");
  const auto nats = field<std::vector<double>>(res, "logprobs", "/v1/next_token");
  if (nats.size() != descriptor_.vocab_size) {
    throw ProtocolError("/v1/next_token: expected " + std::to_string(descriptor_.vocab_size) +
                        " log-probs, got " + std::to_string(nats.size()));
  }
  return NextTokenDistribution::from_natural_log(nats);
}

std::vector<double> RemoteProvider::score_window(std::span<const TokenId> tokens,
                                                 std::size_t score_from) const {
  if (tokens.size() > usable_context()) {
    throw ContractViolation("window of " + std::to_string(tokens.size()) + " tokens exceeds usable context " +
                            std::to_string(usable_context()) + " of '" + descriptor_.name + "'");
  }
  check_window(tokens, score_from);
  // A window that scores from position 0 starts the document; it gets the
  // declared begin-of-sequence token, which is never scored itself.
  std::vector<TokenId> sent;
  std::size_t sent_from = score_from;
  if (bos_ && score_from == 0) {
    sent.push_back(*bos_);
    sent_from = 1;
  }
  sent.insert(sent.end(), tokens.begin(), tokens.end());
  const json req{{"tokens", sent}, {"score_from", sent_from}};
  const json res = parse_body(post("/v1/score", req.dump()), "/v1/score");
  const auto nats = field<std::vector<double>>(res, "logprobs", "/v1/score");
  const std::size_t expected = tokens.size() - score_from;
  if (nats.size() != expected) {
    throw ProtocolError("/v1/score: expected " + std::to_string(expected) + " log-probs, got " +
                        std::to_string(nats.size()));
  }
  auto bits = logprobs_to_bits(nats, "/v1/score");
  for (double& b : bits) b = 0.0 - b;
  return bits;
}

}  // namespace lmc
