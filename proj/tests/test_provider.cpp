#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lmc/errors.hpp"
#include "lmc/ngram.hpp"
#include "test_providers.hpp"

using namespace lmc;

namespace {
std::vector<TokenId> bytes(std::string_view s) { return NGramModel::bytes_to_tokens(s); }
}  // namespace

TEST(Tokenize, ByteIdentity) {
  NGramModel m;
  auto d = m.tokenize("d", "ab");
  EXPECT_EQ(d.tokens, (std::vector<TokenId>{97, 98}));
  EXPECT_EQ(d.char_count, 2u);
  EXPECT_EQ(d.doc_id, "d");
}

TEST(Tokenize, EmptyText) {
  NGramModel m;
  auto d = m.tokenize("d", "");
  EXPECT_TRUE(d.tokens.empty());
  EXPECT_EQ(d.char_count, 0u);
}

TEST(Tokenize, MultiByteScalar) {
  NGramModel m;
  auto d = m.tokenize("d", "\xc3\xa9");
  EXPECT_EQ(d.tokens, (std::vector<TokenId>{195, 169}));
  EXPECT_EQ(d.char_count, 1u);
  EXPECT_EQ(m.detokenize(d.tokens), "\xc3\xa9");
}

TEST(Tokenize, InvalidUtf8NamesDocument) {
  NGramModel m;
  try {
    m.tokenize("doc-42", "\xff");
    FAIL();
  } catch (const TokenizationError& e) {
    EXPECT_NE(std::string(e.what()).find("doc-42"), std::string::npos);
  }
}

TEST(NGram, SmoothedCountsOrderOne) {
  NGramModel m({1, 1.0}, std::string_view("aaab"));
  const auto ctx = bytes("a");
  EXPECT_DOUBLE_EQ(m.probability(ctx, 'a'), 3.0 / 259.0);
  EXPECT_DOUBLE_EQ(m.probability(ctx, 'b'), 2.0 / 259.0);
  EXPECT_DOUBLE_EQ(m.probability(ctx, 'z'), 1.0 / 259.0);
  const std::uint8_t a = 'a';
  EXPECT_EQ(m.context_count({&a, 1}), 3u);
  EXPECT_EQ(m.continuation_count({&a, 1}, 'a'), 2u);
}

TEST(NGram, UntrainedIsUniform) {
  NGramModel m({1, 1.0});
  auto d = m.next_token_logprobs(bytes("q"));
  ASSERT_EQ(d.size(), 256u);
  for (double lp : d.logprobs()) EXPECT_DOUBLE_EQ(lp, -8.0);
}

TEST(NGram, DistributionNormalized) {
  NGramModel m({3, 0.5}, std::string_view("the quick brown fox jumps over the lazy dog"));
  auto d = m.next_token_logprobs(bytes("the "));
  EXPECT_NEAR(d.total_probability(), 1.0, 1e-12);
}

TEST(NGram, OrderZeroHandCount) {
  // p(a) = 3/259, p(b) = 2/259; the sum is frozen from tests/oracles/derive.py.
  NGramModel m({0, 1.0}, std::string_view("aab"));
  auto nll = m.score_window(bytes("ab"), 0);
  ASSERT_EQ(nll.size(), 2u);
  EXPECT_DOUBLE_EQ(nll[0], -std::log2(3.0 / 259.0));
  EXPECT_DOUBLE_EQ(nll[1], -std::log2(2.0 / 259.0));
  EXPECT_NEAR(nll[0] + nll[1], 13.448654074651952, 1e-12);
}

TEST(NGram, ScoreWindowMatchesNextToken) {
  NGramModel m({2, 1.0}, std::string_view("abcabcabd"));
  const auto toks = bytes("abcab");
  auto nll = m.score_window(toks, 2);
  ASSERT_EQ(nll.size(), 3u);
  for (std::size_t i = 2; i < toks.size(); ++i) {
    auto d = m.next_token_logprobs(std::span(toks).first(i));
    EXPECT_NEAR(nll[i - 2], -d[toks[i]], 1e-12);
  }
}

TEST(NGram, SeparateTextsDoNotJoin) {
  std::vector<std::string> texts{"ab", "cd"};
  NGramModel m({1, 1.0}, texts);
  const std::uint8_t b = 'b';
  EXPECT_EQ(m.continuation_count({&b, 1}, 'c'), 0u);
}

TEST(NGram, RejectsBadSpec) {
  EXPECT_THROW(NGramModel({8, 1.0}), ContractViolation);
  EXPECT_THROW(NGramModel({2, 0.0}), ContractViolation);
}

TEST(NGram, FingerprintDependsOnTraining) {
  NGramModel a({2, 1.0}, std::string_view("abc"));
  NGramModel b({2, 1.0}, std::string_view("abd"));
  NGramModel c({2, 1.0}, std::string_view("abc"));
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.fingerprint(), c.fingerprint());
}

TEST(Provider, ContextTooLong) {
  fakes::UniformProvider u(256, 4);
  std::vector<TokenId> ctx(5, 1);
  EXPECT_THROW(u.next_token_logprobs(ctx), ContractViolation);
  EXPECT_THROW(u.score_window(ctx, 0), ContractViolation);
}

TEST(Provider, UniformWindow) {
  fakes::UniformProvider u;
  auto nll = u.score_window(bytes("abcd"), 0);
  EXPECT_EQ(nll, (std::vector<double>{8, 8, 8, 8}));
}

TEST(Provider, DeterministicIsFree) {
  fakes::DeterministicProvider d;
  std::vector<TokenId> t{0, 1, 2, 3, 4};
  for (double v : d.score_window(t, 0)) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(std::signbit(d.score_window(t, 0)[0]));
}

TEST(Distribution, NaturalLogConversion) {
  std::vector<double> nats{-std::log(2.0), -std::log(2.0)};
  auto d = NextTokenDistribution::from_natural_log(nats);
  EXPECT_DOUBLE_EQ(d[0], -1.0);
}

TEST(Distribution, RejectsNaNAndPositive) {
  std::vector<double> bad{std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(NextTokenDistribution::from_natural_log(bad), ProtocolError);
  std::vector<double> pos{0.5, -1.0};
  EXPECT_THROW(NextTokenDistribution::from_natural_log(pos), ProtocolError);
  EXPECT_THROW(NextTokenDistribution({-1.0, -2.0}), ContractViolation);
}

TEST(Distribution, FlooredKeepsNormalization) {
  NextTokenDistribution d({0.0, -std::numeric_limits<double>::infinity()});
  auto f = d.floored();
  EXPECT_NEAR(f.total_probability(), 1.0, 1e-15);
  EXPECT_NEAR(f[1], -60.0, 1e-9);
}
