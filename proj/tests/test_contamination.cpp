#include <gtest/gtest.h>

#include <cmath>

#include "lmc/contamination.hpp"
#include "lmc/errors.hpp"
#include "lmc/ngram.hpp"

using namespace lmc;

TEST(MinK, ConstantSequence) {
  std::vector<double> v(10, 2.0);
  EXPECT_EQ(min_k_score(v, 20), 2.0);
}

TEST(MinK, PicksLargestNll) {
  std::vector<double> v{0.1, 0.5, 1.0, 2.0, 4.0};
  EXPECT_EQ(min_k_count(5, 20), 1u);
  EXPECT_EQ(min_k_score(v, 20), 4.0);
}

TEST(MinK, FullAverage) {
  std::vector<double> v{1, 3};
  EXPECT_EQ(min_k_score(v, 100), 2.0);
}

TEST(MinK, Preconditions) {
  std::vector<double> empty;
  EXPECT_THROW(min_k_score(empty, 20), ContractViolation);
  std::vector<double> v{1};
  EXPECT_THROW(min_k_score(v, 0), ContractViolation);
  EXPECT_THROW(min_k_score(v, 101), ContractViolation);
  EXPECT_EQ(min_k_count(3, 20), 1u);
  EXPECT_EQ(min_k_count(10, 25), 2u);
}

TEST(Outliers, AllEqual) {
  auto r = flag_outliers({{"a", 3.0}, {"b", 3.0}, {"c", 3.0}});
  EXPECT_TRUE(r.flagged.empty());
}

TEST(Outliers, FlagsLowModel) {
  auto r = flag_outliers({{"a", 5.0}, {"b", 5.1}, {"c", 4.9}, {"d", 1.0}});
  EXPECT_EQ(r.flagged, (std::set<std::string>{"d"}));
  EXPECT_DOUBLE_EQ(r.median, 4.95);
  EXPECT_NEAR(r.mad, 0.1, 1e-12);
  EXPECT_NEAR(r.threshold, 4.65, 1e-12);
}

TEST(Outliers, NeedsThree) {
  EXPECT_THROW(flag_outliers({{"a", 1.0}, {"b", 2.0}}), ContractViolation);
}

TEST(Density, IntegratesToOne) {
  std::vector<double> s{1, 2, 2.5, 3, 7};
  auto c = gaussian_kde(s, 200);
  ASSERT_EQ(c.x.size(), 200u);
  double area = 0;
  for (std::size_t i = 1; i < c.x.size(); ++i) area += 0.5 * (c.density[i] + c.density[i - 1]) * (c.x[i] - c.x[i - 1]);
  EXPECT_NEAR(area, 1.0, 1e-3);
  EXPECT_GT(silverman_bandwidth(s), 0.0);
}

TEST(Density, DegenerateSample) {
  std::vector<double> s{2, 2, 2};
  EXPECT_DOUBLE_EQ(silverman_bandwidth(s), 0.9 * std::pow(3.0, -0.2));
  EXPECT_EQ(gaussian_kde(s).x.size(), 200u);
}

TEST(ScoreBenchmark, SeenTextScoresLower) {
  const std::string seen = "the cat sat on the mat while the dog slept by the door";
  NGramModel m({3, 0.1}, std::string_view(seen));
  std::vector<BenchmarkExample> ex{{"seen", seen, Split::train}, {"fresh", "quantum zebras juggle vexing fjords", Split::test}};
  auto r = score_benchmark(ex, m);
  ASSERT_EQ(r.per_example.size(), 2u);
  EXPECT_EQ(r.per_example[0].example_id, "fresh");
  EXPECT_LT(r.mean_score(Split::train), r.mean_score(Split::test));
  EXPECT_EQ(r.scores().size(), 2u);
}

TEST(Split, Parse) {
  EXPECT_EQ(parse_split("train"), Split::train);
  EXPECT_STREQ(to_string(Split::test), "test");
  EXPECT_THROW(parse_split("dev"), DataError);
}
