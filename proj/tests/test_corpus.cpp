#include <gtest/gtest.h>

#include <set>

#include "lmc/corpus.hpp"
#include "lmc/errors.hpp"

using namespace lmc;

namespace {
std::vector<Document> pool(std::size_t n, std::size_t len, const std::string& source = "web") {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back({source + "-" + std::to_string(i), std::string(len, 'a' + i % 26), source,
                    "2023-0" + std::to_string(1 + i % 9) + "-15"});
  }
  return docs;
}
}  // namespace

TEST(Sample, ForcedSelection) {
  auto docs = pool(1, 1000);
  SamplingSpec spec;
  spec.target_chars = 1000;
  auto m = sample_documents(docs, spec);
  EXPECT_EQ(m.document_ids, (std::vector<std::string>{"web-0"}));
  EXPECT_EQ(m.total_chars, 1000u);
}

TEST(Sample, Deterministic) {
  auto docs = pool(200, 100);
  SamplingSpec spec;
  spec.target_chars = 5000;
  spec.seed = 9;
  auto a = sample_documents(docs, spec);
  auto b = sample_documents(docs, spec);
  EXPECT_EQ(a.document_ids, b.document_ids);
  spec.seed = 10;
  EXPECT_NE(sample_documents(docs, spec).document_ids, a.document_ids);
}

TEST(Sample, StopsAtTarget) {
  auto docs = pool(200, 100);
  SamplingSpec spec;
  spec.target_chars = 5050;
  auto m = sample_documents(docs, spec);
  EXPECT_EQ(m.total_chars, 5100u);
  EXPECT_EQ(m.max_unit_chars, 100u);
  std::set<std::string> ids(m.document_ids.begin(), m.document_ids.end());
  EXPECT_EQ(ids.size(), m.document_ids.size());
  ASSERT_TRUE(m.time_period.has_value());
}

TEST(Sample, ShortfallIsNamed) {
  auto docs = pool(3, 10);
  SamplingSpec spec;
  spec.target_chars = 1000;
  try {
    sample_documents(docs, spec, "c", "web");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("30"), std::string::npos);
  }
}

TEST(Segments, ExactFit) {
  std::vector<Document> files{{"f", std::string(8192, 'x'), "code", "", "r", "a.py"}};
  EXPECT_EQ(segment_repositories(files, 8192).size(), 1u);
}

TEST(Segments, DivisionRemainder) {
  std::vector<Document> files{{"f1", std::string(12000, 'x'), "code", "", "r", "b.py"},
                              {"f2", std::string(8000, 'y'), "code", "", "r", "a.py"}};
  auto segs = segment_repositories(files, 8192);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].char_count, 8192u);
  EXPECT_EQ(segs[1].char_count, 8192u);
  EXPECT_EQ(segs[2].char_count, 3616u);
  EXPECT_EQ(segs[0].id, "r#0");
  EXPECT_EQ(segs[0].text.substr(0, 8000), std::string(8000, 'y'));
}

TEST(Segments, CutsOnScalars) {
  std::string text;
  for (int i = 0; i < 5; ++i) text += "\xc3\xa9";
  std::vector<Document> files{{"f", text, "code", "", "r", "a"}};
  auto segs = segment_repositories(files, 2);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].text, "\xc3\xa9\xc3\xa9");
  EXPECT_EQ(segs[2].char_count, 1u);
}

TEST(Segments, NeedRepo) {
  std::vector<Document> files{{"f", "x"}};
  EXPECT_THROW(segment_repositories(files), DataError);
}

TEST(Mix, SingleSourceIsIdentity) {
  auto units = document_units(pool(50, 100));
  std::vector<MixSource> src{{"web", units}};
  std::vector<double> w{1.0};
  auto m = mix_corpora(src, w, 2000, 4);
  SamplingSpec spec;
  spec.target_chars = 2000;
  spec.seed = derive_seed(4, 0);
  EXPECT_EQ(m.document_ids, sample_units(units, spec, "x", "web").document_ids);
}

TEST(Mix, HalfAndHalf) {
  std::vector<MixSource> src{{"a", document_units(pool(400, 7000, "a"))}, {"b", document_units(pool(400, 9000, "b"))}};
  std::vector<double> w{0.5, 0.5};
  auto m = mix_corpora(src, w, 2'000'000, 1);
  ASSERT_EQ(m.components.size(), 2u);
  EXPECT_GE(m.components[0].total_chars, 1'000'000u);
  EXPECT_LT(m.components[0].total_chars, 1'000'000u + 7000);
  EXPECT_GE(m.components[1].total_chars, 1'000'000u);
  EXPECT_LT(m.components[1].total_chars, 1'000'000u + 9000);
}

TEST(Mix, Reproducible) {
  std::vector<MixSource> src{{"a", document_units(pool(100, 50, "a"))}, {"b", document_units(pool(100, 50, "b"))}};
  std::vector<double> w{0.3, 0.7};
  EXPECT_EQ(mix_corpora(src, w, 3000, 8).document_ids, mix_corpora(src, w, 3000, 8).document_ids);
  std::vector<double> bad{0.3, 0.3};
  EXPECT_THROW(mix_corpora(src, bad, 3000, 8), ContractViolation);
}

TEST(Sweep, OneSize) {
  auto units = document_units(pool(1000, 100));
  std::vector<std::uint64_t> sizes{50'000};
  auto e = size_sweep(units, sizes, 1, 0);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_GE(e[0].manifest.total_chars, 50'000u);
}

TEST(Sweep, RepeatsUseDistinctSeeds) {
  auto units = document_units(pool(1000, 100));
  std::vector<std::uint64_t> sizes{5'000};
  auto e = size_sweep(units, sizes, 3, 77);
  ASSERT_EQ(e.size(), 3u);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < e.size(); ++i) {
    seeds.insert(e[i].manifest.spec.seed);
    EXPECT_EQ(e[i].manifest.spec.seed, derive_seed(77, i));
  }
  EXPECT_EQ(seeds.size(), 3u);
  EXPECT_EQ(default_size_ladder().size(), 5u);
}

TEST(Materialize, FollowsManifest) {
  auto units = document_units(pool(10, 5));
  CorpusManifest m;
  m.document_ids = {"web-3", "web-1"};
  auto got = materialize(m, units);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].id, "web-3");
  m.document_ids = {"nope"};
  EXPECT_THROW(materialize(m, units), DataError);
}

TEST(Rng, BoundedDrawsArePortable) {
  SamplingRng r(42);
  std::vector<std::uint64_t> got;
  for (int i = 0; i < 5; ++i) got.push_back(r.below(10));
  SamplingRng r2(42);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(r2.below(10), got[i]);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(3), 3u);
}
