#include <gtest/gtest.h>

#include "lmc/bpc.hpp"
#include "lmc/errors.hpp"
#include "lmc/remote_provider.hpp"
#include "mock_server.hpp"

using namespace lmc;

TEST(Remote, InfoAndTokenize) {
  fakes::MockServer srv({});
  RemoteProvider p({srv.url(), 2000, 0});
  EXPECT_EQ(p.descriptor().name, "mock-uniform");
  EXPECT_EQ(p.descriptor().vocab_size, 256u);
  auto d = p.tokenize("x", "\xc3\xa9");
  EXPECT_EQ(d.tokens, (std::vector<TokenId>{195, 169}));
  EXPECT_EQ(d.char_count, 1u);
  EXPECT_EQ(p.detokenize(d.tokens), "\xc3\xa9");
}

TEST(Remote, ConvertsNatsToBits) {
  fakes::MockServer srv({});
  RemoteProvider p({srv.url(), 2000, 0});
  std::vector<TokenId> t{1, 2, 3};
  auto nll = p.score_window(t, 1);
  ASSERT_EQ(nll.size(), 2u);
  EXPECT_NEAR(nll[0], 8.0, 1e-12);
}

TEST(Remote, NaNIsProtocolError) {
  fakes::MockServer::Options o;
  o.emit_nan = true;
  fakes::MockServer srv(o);
  RemoteProvider p({srv.url(), 2000, 0});
  std::vector<TokenId> t{1, 2};
  EXPECT_THROW(p.score_window(t, 0), ProtocolError);
}

TEST(Remote, RetriesTransientFailures) {
  fakes::MockServer::Options o;
  o.fail_first = 2;
  fakes::MockServer srv(o);
  RemoteProvider p({srv.url(), 2000, 2});
  std::vector<TokenId> t{1, 2};
  EXPECT_EQ(p.score_window(t, 0).size(), 2u);
}

TEST(Remote, ExhaustedRetries) {
  fakes::MockServer::Options o;
  o.fail_first = 10;
  fakes::MockServer srv(o);
  RemoteProvider p({srv.url(), 2000, 1});
  std::vector<TokenId> t{1, 2};
  EXPECT_THROW(p.score_window(t, 0), ProviderError);
}

TEST(Remote, UnreachableIsTransportError) {
  EXPECT_THROW(RemoteProvider({"http://127.0.0.1:1", 300, 0}), TransportError);
}

TEST(Remote, SmallContextIsHonored) {
  fakes::MockServer::Options o;
  o.max_context = 512;
  fakes::MockServer srv(o);
  RemoteProvider p({srv.url(), 2000, 0});
  std::vector<Document> docs{{"d", std::string(3000, 'q')}};
  auto r = evaluate_corpus(docs, p);
  EXPECT_EQ(r.context, 512u);
  EXPECT_NEAR(r.corpus_bpc, 8.0, 1e-12);
}

TEST(Remote, BosReservesSlot) {
  fakes::MockServer::Options o;
  o.max_context = 100;
  o.bos = 256;
  fakes::MockServer srv(o);
  RemoteProvider p({srv.url(), 2000, 0});
  EXPECT_EQ(p.usable_context(), 99u);
  std::vector<Document> docs{{"d", std::string(1000, 'q')}};
  auto r = evaluate_corpus(docs, p);
  EXPECT_EQ(r.context, 99u);
  EXPECT_EQ(r.total_tokens, 1000u);
}
