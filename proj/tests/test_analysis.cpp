#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lmc/analysis.hpp"
#include "lmc/errors.hpp"
#include "lmc/reproduce.hpp"

using namespace lmc;

TEST(Pearson, Collinear) {
  std::vector<Point> p{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(pearson(p), 1.0);
}

TEST(Pearson, CovarianceOracle) {
  std::vector<Point> p{{1, 2}, {2, 1}, {3, 4}, {4, 3}};
  EXPECT_NEAR(pearson(p), 0.6, 1e-15);
}

TEST(Pearson, Degenerate) {
  std::vector<Point> flat{{1, 2}, {2, 2}, {3, 2}};
  EXPECT_THROW(pearson(flat), DataError);
  std::vector<Point> two{{1, 2}, {2, 3}};
  EXPECT_THROW(pearson(two), DataError);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<Point> p(30);
  for (auto& q : p) q = {n(rng), n(rng)};
  const double r = pearson(p);
  auto t = p;
  for (auto& q : t) q = {3 * q.x + 1, 0.5 * q.y - 2};
  EXPECT_NEAR(pearson(t), r, 1e-12);
  for (auto& q : t) q.x = -q.x;
  EXPECT_NEAR(pearson(t), -r, 1e-12);
}

TEST(FitLinear, CollinearHasZeroRmse) {
  std::vector<Point> p{{0, 1}, {1, 3}, {2, 5}};
  auto f = fit_linear(p);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.rmse, 0.0, 1e-12);
}

TEST(FitLinear, ResidualsSumToZeroAndRmseIsOptimal) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<Point> p(50);
  for (auto& q : p) {
    const double x = n(rng);
    q = {x, -0.5 * x + 0.3 * n(rng)};
  }
  auto f = fit_linear(p);
  double resid = 0;
  for (auto& q : p) resid += q.y - f.predict(q.x);
  EXPECT_NEAR(resid, 0.0, 1e-9);
  for (double ds = -0.2; ds <= 0.2; ds += 0.05) {
    for (double di = -0.2; di <= 0.2; di += 0.05) {
      double sse = 0;
      for (auto& q : p) {
        const double e = q.y - ((f.slope + ds) * q.x + f.intercept + di);
        sse += e * e;
      }
      EXPECT_GE(std::sqrt(sse / p.size()) + 1e-12, f.rmse);
    }
  }
}

TEST(FitLinear, DegenerateX) {
  std::vector<Point> p{{1, 1}, {1, 2}};
  EXPECT_THROW(fit_linear(p), DataError);
}

TEST(Average, TableRows) {
  std::vector<std::string> b{"h", "a", "n", "t", "m"};
  std::vector<ModelObservation> obs{
      {"Llama-2-70b", 0.527, {{"h", .838}, {"a", .676}, {"n", .376}, {"t", .721}, {"m", .546}}, {}},
      {"Deepseek-llm-7b", 0.6, {{"h", .761}, {"a", .525}, {"n", .201}, {"t", .529}, {"m", .431}}, {}}};
  auto avg = average_scores(obs, b);
  EXPECT_NEAR(avg["Llama-2-70b"], 0.631, 0.0005);
  EXPECT_NEAR(avg["Deepseek-llm-7b"], 0.489, 0.0005);
  std::vector<std::string> one{"h"};
  EXPECT_EQ(average_scores(obs, one)["Llama-2-70b"], 0.838);
  std::vector<std::string> missing{"zzz"};
  try {
    average_scores(obs, missing);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("zzz"), std::string::npos);
  }
}

TEST(AverageBpc, Unweighted) {
  auto m = average_bpc({{"a", {0.5, 0.7, 0.9}}});
  EXPECT_NEAR(m["a"], 0.7, 1e-15);
}

namespace {
std::vector<ModelObservation> toy() {
  std::vector<ModelObservation> o;
  for (int i = 0; i < 6; ++i) {
    o.push_back({"m" + std::to_string(i), 0.5 + 0.1 * i, {{"b", 0.8 - 0.1 * i + 0.01 * (i % 2)}}, {}});
  }
  o.push_back({"cheat", 0.9, {{"b", 0.95}}, {"contaminated"}});
  return o;
}
}  // namespace

TEST(ExcludeAndFit, NoFlagsEqualsPlainFit) {
  auto o = toy();
  o.pop_back();
  std::vector<std::string> b{"b"};
  auto fs = exclude_and_fit(o, b, true);
  std::vector<Point> pts;
  for (auto& m : o) pts.push_back({m.bpc, m.scores["b"]});
  auto f = fit_linear(pts);
  EXPECT_EQ(fs.per_benchmark[0].fit.pearson_rho, f.pearson_rho);
  EXPECT_EQ(fs.per_benchmark[0].fit.rmse, f.rmse);
}

TEST(ExcludeAndFit, FlaggedKeptAsOutlier) {
  auto o = toy();
  std::vector<std::string> b{"b"};
  auto honored = exclude_and_fit(o, b, true);
  auto ignored = exclude_and_fit(o, b, false);
  EXPECT_EQ(honored.average.fit.n, 6u);
  EXPECT_EQ(ignored.average.fit.n, 7u);
  EXPECT_GT(std::abs(honored.average.fit.pearson_rho), std::abs(ignored.average.fit.pearson_rho));
  bool marked = false;
  for (auto& p : honored.average.points) marked |= p.model == "cheat" && p.outlier;
  EXPECT_TRUE(marked);
  EXPECT_EQ(honored.average.points.size(), 7u);
}

TEST(ExcludeAndFit, TooFewRemaining) {
  auto o = toy();
  std::vector<std::string> b{"b"};
  EXPECT_THROW(exclude_and_fit(o, b, true, {"m0", "m1", "m2", "m3"}), DataError);
}

TEST(Fixtures, KnowledgeAverage) {
  auto areas = load_fixture_areas(LMC_FIXTURE_DIR);
  ASSERT_EQ(areas.size(), 3u);
  auto fs = exclude_and_fit(areas[0].observations, areas[0].benchmarks, true);
  EXPECT_NEAR(fs.average.fit.pearson_rho, -0.933, 0.002);
  EXPECT_NEAR(fs.average.fit.rmse, 0.019, 0.002);
  auto cs = exclude_and_fit(areas[1].observations, areas[1].benchmarks, true);
  EXPECT_NEAR(cs.average.fit.pearson_rho, -0.947, 0.002);
  EXPECT_NEAR(cs.average.fit.rmse, 0.038, 0.002);
}

TEST(Fixtures, ReportedAverageColumnAgrees) {
  for (const auto& area : load_fixture_areas(LMC_FIXTURE_DIR)) {
    auto avg = average_scores(area.observations, area.benchmarks);
    for (const auto& [model, reported] : area.reported_average) {
      EXPECT_NEAR(avg.at(model), reported, 0.0011) << area.area << " " << model;
    }
  }
}
