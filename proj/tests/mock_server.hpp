#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace lmc::fakes {

/// In-process log-prob server: byte tokenizer, uniform 256-way model in
/// natural log.
class MockServer {
 public:
  struct Options {
    std::size_t max_context = 4096;
    bool emit_nan = false;
    int fail_first = 0;  // answer 503 to this many /v1/score calls
    std::optional<int> bos;
  };

  explicit MockServer(Options opt) : opt_(opt) {
    using nlohmann::json;
    srv_.Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
      json j{{"name", "mock-uniform"}, {"vocab_size", 256 + (opt_.bos ? 1 : 0)}, {"max_context", opt_.max_context}};
      if (opt_.bos) j["bos_token"] = *opt_.bos;
      res.set_content(j.dump(), "application/json");
    });
    srv_.Post("/v1/tokenize", [](const httplib::Request& req, httplib::Response& res) {
      const auto text = json::parse(req.body).at("text").get<std::string>();
      json toks = json::array();
      for (unsigned char c : text) toks.push_back(int(c));
      res.set_content(json{{"tokens", toks}}.dump(), "application/json");
    });
    srv_.Post("/v1/detokenize", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      std::string s;
      for (int t : body.at("tokens")) s.push_back(static_cast<char>(t));
      res.set_content(json{{"text", s}}.dump(), "application/json");
    });
    srv_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      if (fails_.fetch_add(1) < opt_.fail_first) {
        res.status = 503;
        return;
      }
      const auto j = json::parse(req.body);
      const std::size_t n = j.at("tokens").size();
      const std::size_t from = j.at("score_from");
      if (n > opt_.max_context) {
        res.status = 400;
        return;
      }
      ++score_calls;
      json lp = json::array();
      for (std::size_t i = from; i < n; ++i) {
        lp.push_back(opt_.emit_nan ? json(nullptr) : json(-std::log(256.0)));
      }
      std::string body = json{{"logprobs", lp}}.dump();
      if (opt_.emit_nan) {
        for (std::size_t p; (p = body.find("null")) != std::string::npos;) body.replace(p, 4, "NaN");
      }
      res.set_content(body, "application/json");
    });
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~MockServer() {
    srv_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> score_calls{0};

 private:
  Options opt_;
  httplib::Server srv_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> fails_{0};
};

}  // namespace lmc::fakes
